"""Population representation and real-coded variation operators.

Latin hypercube initialization, extended intermediate (blend-margin)
crossover, and uniform mutation. All operators take an explicit
``numpy.random.Generator`` and are deterministic given its state; the
batch forms used by the search strategies draw the same streams as the
single-vector forms applied row by row would not, so determinism is
per-entry-point, never mixed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .problems import SearchSpace


@dataclass(eq=False, slots=True)
class Individual:
    """One candidate solution.

    ``fitness`` memoizes the true objective value; ``official`` records
    whether that value was bought with a counted evaluation. The two are
    deliberately separate: the comparison oracle fills ``fitness`` for
    free, only the ledger may set ``official``.
    """

    genome: np.ndarray
    id: int
    fitness: float | None = None
    official: bool = False

    def __post_init__(self):
        if self.official and self.fitness is None:
            raise ValueError("an officially evaluated individual must carry its fitness")


@dataclass
class EvolutionConfig:
    """Variation-operator settings."""

    pop_size: int = 40
    pc: float = 0.7          # per-slot crossover probability
    pm: float = 0.3          # per-gene mutation probability
    gamma: float = 0.4       # blend margin of the crossover
    alpha_range: str = "standard"      # "standard" [-gamma, 1+gamma] | "literal" [gamma, 1+gamma]
    mutation_scheme: str = "per-individual"  # "per-individual" | "per-gene"

    def __post_init__(self):
        if self.pop_size < 1:
            raise ValueError("pop_size must be positive")
        if not 0.0 <= self.pc <= 1.0:
            raise ValueError(f"pc must be in [0, 1], got {self.pc}")
        if not 0.0 <= self.pm <= 1.0:
            raise ValueError(f"pm must be in [0, 1], got {self.pm}")
        if self.gamma < 0.0:
            raise ValueError("gamma must be non-negative")
        if self.alpha_range not in ("standard", "literal"):
            raise ValueError(f"unknown alpha_range {self.alpha_range!r}")
        if self.mutation_scheme not in ("per-gene", "per-individual"):
            raise ValueError(f"unknown mutation_scheme {self.mutation_scheme!r}")


def lhs_sample(n: int, space: SearchSpace, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube sample of ``n`` points, shape (n, dim).

    Per dimension the n points occupy the n equal-width strata exactly
    once, uniformly placed within their stratum.
    """
    if n < 1:
        raise ValueError("n must be positive")
    strata = np.empty((n, space.dim))
    for j in range(space.dim):
        strata[:, j] = rng.permutation(n)
    u = rng.random((n, space.dim))
    width = (space.upper - space.lower) / n
    return space.lower + (strata + u) * width


def _draw_alphas(shape, config: EvolutionConfig, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(shape)
    if config.alpha_range == "standard":
        return -config.gamma + (1.0 + 2.0 * config.gamma) * u
    return config.gamma + u


def eix_crossover(
    v: np.ndarray,
    w: np.ndarray,
    config: EvolutionConfig,
    space: SearchSpace,
    rng: np.random.Generator,
) -> np.ndarray:
    """Coordinate-wise blend ``t_i = a_i v_i + (1 - a_i) w_i``.

    Each blend coefficient is drawn uniformly from the configured alpha
    range; the result is clamped to the bounds (coefficients outside
    [0, 1] can leave the box). Accepts single vectors or (n, dim) row
    batches of parents.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if v.shape != w.shape:
        raise ValueError(f"parent shape mismatch: {v.shape} vs {w.shape}")
    alphas = _draw_alphas(v.shape, config, rng)
    t = alphas * v + (1.0 - alphas) * w
    return np.clip(t, space.lower, space.upper)


def uniform_mutate(
    x: np.ndarray,
    pm: float,
    space: SearchSpace,
    rng: np.random.Generator,
    scheme: str = "per-gene",
) -> np.ndarray:
    """Resample genes uniformly within the bounds.

    "per-gene": each gene independently with probability ``pm``.
    "per-individual": with probability ``pm`` one random gene per row.
    """
    x = np.asarray(x, dtype=float)
    rows = x[None, :] if x.ndim == 1 else x
    n, dim = rows.shape
    if scheme == "per-gene":
        mask = rng.random((n, dim)) < pm
        fresh = space.lower + rng.random((n, dim)) * (space.upper - space.lower)
        out = np.where(mask, fresh, rows)
    elif scheme == "per-individual":
        mutate_row = rng.random(n) < pm
        gene = rng.integers(0, dim, size=n)
        fresh = space.lower[gene] + rng.random(n) * (space.upper[gene] - space.lower[gene])
        out = rows.copy()
        hit = np.nonzero(mutate_row)[0]
        out[hit, gene[hit]] = fresh[hit]
    else:
        raise ValueError(f"unknown mutation scheme {scheme!r}")
    return out[0] if x.ndim == 1 else out


def offspring_genomes(
    genomes: np.ndarray,
    config: EvolutionConfig,
    space: SearchSpace,
    rng: np.random.Generator,
) -> np.ndarray:
    """One offspring genome per parent slot, shape (N, dim).

    Slot i crosses parent i with a uniformly chosen distinct mate with
    probability ``pc`` (otherwise clones it), then mutates. Draw order is
    fixed (crossover coins, mates, blend coefficients, mutation) so the
    stream advances identically regardless of which slots cross.
    """
    n = genomes.shape[0]
    if n < 2 and config.pc > 0.0:
        raise ValueError("need at least 2 individuals for crossover")
    do_cross = rng.random(n) < config.pc
    if n >= 2:
        offsets = rng.integers(1, n, size=n)
    else:
        offsets = np.zeros(n, dtype=np.int64)
    mates = (np.arange(n) + offsets) % n
    blended = eix_crossover(genomes, genomes[mates], config, space, rng)
    blended = np.where(do_cross[:, None], blended, genomes)
    return uniform_mutate(blended, config.pm, space, rng, config.mutation_scheme)


def generate_offspring(
    population: list[Individual],
    config: EvolutionConfig,
    space: SearchSpace,
    rng: np.random.Generator,
    id_iter=None,
) -> list[tuple[Individual, int]]:
    """Generate one unevaluated offspring per population slot.

    Returns ``(offspring, parent_index)`` pairs with parent_index running
    0..N-1; the slot owner is the reference parent for later comparison.
    ``id_iter`` supplies individual ids (a trial passes its own counter).
    """
    if id_iter is None:
        id_iter = itertools.count()
    genomes = np.stack([ind.genome for ind in population])
    children = offspring_genomes(genomes, config, space, rng)
    return [
        (Individual(genome=children[i], id=next(id_iter)), i)
        for i in range(len(population))
    ]
