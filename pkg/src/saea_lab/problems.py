"""Benchmark landscapes with known optima.

Six minimization problems covering three landscape classes (unimodal,
simple multimodal, composition), each built as ``f(x) = f_star +
base(R (x - shift))`` with ``base >= 0`` and ``base(0) = 0``, so the
global optimum sits at ``shift`` with value ``f_star`` by construction.
Instances are deterministic in ``(problem_id, dim, seed)`` and immutable
after construction, so they can be evaluated concurrently from any
number of trials.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

OPTIMUM_TOL = 1e-9

DEFAULT_LOWER = -100.0
DEFAULT_UPPER = 100.0

# Fraction of the box (centered) in which generated shifts are placed;
# keeps the optimum away from the boundary so clamping cannot sit on it.
_SHIFT_INNER_FRACTION = 0.8


class ProblemId(enum.Enum):
    """The six benchmark problems."""

    F1 = "f1"
    F2 = "f2"
    F4 = "f4"
    F8 = "f8"
    F13 = "f13"
    F15 = "f15"


F_STAR = {
    ProblemId.F1: 100.0,
    ProblemId.F2: 200.0,
    ProblemId.F4: 400.0,
    ProblemId.F8: 800.0,
    ProblemId.F13: 1300.0,
    ProblemId.F15: 1500.0,
}

LANDSCAPE_CLASS = {
    ProblemId.F1: "unimodal",
    ProblemId.F2: "unimodal",
    ProblemId.F4: "simple-multimodal",
    ProblemId.F8: "simple-multimodal",
    ProblemId.F13: "composition",
    ProblemId.F15: "composition",
}

_PROBLEM_ORDINAL = {pid: i for i, pid in enumerate(ProblemId)}


@dataclass(frozen=True)
class SearchSpace:
    """Box-constrained design space."""

    dim: int
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != (self.dim,) or upper.shape != (self.dim,):
            raise ValueError("lower/upper must be vectors of length dim")
        if not np.all(lower < upper):
            raise ValueError("lower bound must be strictly below upper bound")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        # scalar fast path for the common uniform box
        uniform = bool(lower.min() == lower.max() and upper.min() == upper.max())
        object.__setattr__(self, "_uniform", uniform)

    @classmethod
    def box(cls, dim: int, lower: float = DEFAULT_LOWER, upper: float = DEFAULT_UPPER) -> "SearchSpace":
        return cls(dim, np.full(dim, float(lower)), np.full(dim, float(upper)))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        if self._uniform:
            return bool(x.min() >= self.lower[0] - tol and x.max() <= self.upper[0] + tol)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))


@dataclass(frozen=True)
class _Composition:
    """Weighted mix of shifted base functions.

    Component 0 is anchored at offset zero with bias zero, so the mix
    vanishes exactly at the problem optimum. Weights decay with a
    Gaussian of the squared distance to each component offset and carry
    a 1/dist factor (the usual composition convention) so the weight of
    the nearest component dominates completely at its offset; without
    that factor the foreign biases would leak ~1e-2 into the optimum.
    """

    names: tuple
    lambdas: tuple
    sigmas: tuple
    biases: tuple
    offsets: np.ndarray  # (n_components, dim), row 0 all zeros


@dataclass(frozen=True, eq=False)
class BenchmarkProblem:
    """Evaluable objective with known optimum ``f_star`` at ``shift``."""

    id: ProblemId
    space: SearchSpace
    f_star: float
    shift: np.ndarray
    rotation: np.ndarray
    landscape_class: str
    composition: _Composition | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.space.dim


# --- base functions: vectorized over rows, min 0 at the zero vector ---


def _bent_cigar(z):
    return z[:, 0] ** 2 + 1e6 * np.sum(z[:, 1:] ** 2, axis=1)


def _discus(z):
    return 1e6 * z[:, 0] ** 2 + np.sum(z[:, 1:] ** 2, axis=1)


def _rastrigin(z):
    return np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=1)


def _griewank_rosenbrock(z):
    # Chained Rosenbrock pairs fed through a one-dimensional Griewank;
    # expressed in w = z + 1 so the minimum lands at z = 0.
    w = z + 1.0
    w_next = np.roll(w, -1, axis=1)
    t = 100.0 * (w * w - w_next) ** 2 + (w - 1.0) ** 2
    return np.sum(t * t / 4000.0 - np.cos(t) + 1.0, axis=1)


def _elliptic(z):
    d = z.shape[1]
    exponents = np.arange(d) / max(d - 1, 1)
    return np.sum((1e6 ** exponents) * z * z, axis=1)


def _griewank(z):
    d = z.shape[1]
    return (
        np.sum(z * z, axis=1) / 4000.0
        - np.prod(np.cos(z / np.sqrt(np.arange(1, d + 1))), axis=1)
        + 1.0
    )


def _sphere(z):
    return np.sum(z * z, axis=1)


_BASE_FUNCTIONS = {
    "bent_cigar": _bent_cigar,
    "discus": _discus,
    "rastrigin": _rastrigin,
    "griewank_rosenbrock": _griewank_rosenbrock,
    "elliptic": _elliptic,
    "griewank": _griewank,
    "sphere": _sphere,
}

_SIMPLE_BASE = {
    ProblemId.F1: "bent_cigar",
    ProblemId.F2: "discus",
    ProblemId.F4: "rastrigin",
    ProblemId.F8: "griewank_rosenbrock",
}

# (base function, lambda, sigma, bias) per component; component 0 holds
# the global optimum (bias 0, offset 0).
_COMPOSITION_RECIPE = {
    ProblemId.F13: (
        ("rastrigin", 1.0, 10.0, 0.0),
        ("elliptic", 1e-6, 30.0, 100.0),
        ("bent_cigar", 1e-6, 50.0, 200.0),
    ),
    ProblemId.F15: (
        ("griewank", 1.0, 10.0, 0.0),
        ("rastrigin", 1.0, 30.0, 100.0),
        ("sphere", 1e-2, 50.0, 200.0),
    ),
}

_COMPOSITION_OFFSET_RANGE = 50.0


def _composition_value(comp: _Composition, z: np.ndarray) -> np.ndarray:
    dim = z.shape[1]
    n_comp = len(comp.names)
    terms = np.empty((n_comp, z.shape[0]))
    weights = np.empty((n_comp, z.shape[0]))
    for c in range(n_comp):
        y = z - comp.offsets[c]
        d2 = np.sum(y * y, axis=1)
        g = _BASE_FUNCTIONS[comp.names[c]](y)
        terms[c] = comp.lambdas[c] * g + comp.biases[c]
        # Clipping d2 keeps the 1/dist factor finite on an exact hit while
        # still letting it dominate all other weights by ~20 orders.
        weights[c] = np.exp(-d2 / (2.0 * dim * comp.sigmas[c] ** 2)) / np.sqrt(
            np.maximum(d2, 1e-40)
        )
    total = weights.sum(axis=0)
    flat = total == 0.0
    if np.any(flat):
        weights[:, flat] = 1.0
        total = weights.sum(axis=0)
    return np.sum(weights * terms, axis=0) / total


def _random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    # QR of a Gaussian matrix, sign-fixed so the factorization is unique.
    a = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def build_problem(
    problem_id: ProblemId,
    dim: int,
    seed: int,
    *,
    lower: float = DEFAULT_LOWER,
    upper: float = DEFAULT_UPPER,
    shift: np.ndarray | None = None,
    rotation: np.ndarray | None = None,
) -> BenchmarkProblem:
    """Construct a benchmark instance, deterministic in (id, dim, seed).

    ``shift`` and ``rotation`` override the generated data (e.g. loaded
    from an external data file via :func:`load_shift_rotation`); the
    generator stream is always advanced identically so overriding one
    piece leaves the others unchanged.
    """
    if dim < 2:
        raise ValueError(f"invalid dimension {dim}: need dim >= 2")
    space = SearchSpace.box(dim, lower, upper)
    rng = np.random.default_rng(
        np.random.SeedSequence((int(seed), _PROBLEM_ORDINAL[problem_id], int(dim)))
    )

    width = space.upper - space.lower
    margin = (1.0 - _SHIFT_INNER_FRACTION) / 2.0
    generated_shift = space.lower + (margin + _SHIFT_INNER_FRACTION * rng.random(dim)) * width
    generated_rotation = _random_rotation(dim, rng)

    composition = None
    if problem_id in _COMPOSITION_RECIPE:
        recipe = _COMPOSITION_RECIPE[problem_id]
        offsets = np.zeros((len(recipe), dim))
        for c in range(1, len(recipe)):
            offsets[c] = rng.uniform(
                -_COMPOSITION_OFFSET_RANGE, _COMPOSITION_OFFSET_RANGE, dim
            )
        offsets.setflags(write=False)
        composition = _Composition(
            names=tuple(r[0] for r in recipe),
            lambdas=tuple(r[1] for r in recipe),
            sigmas=tuple(r[2] for r in recipe),
            biases=tuple(r[3] for r in recipe),
            offsets=offsets,
        )

    if shift is None:
        shift = generated_shift
    else:
        shift = np.array(shift, dtype=float)
        if shift.shape != (dim,):
            raise ValueError("shift must be a vector of length dim")
        if not space.contains(shift):
            raise ValueError("shift must lie within the search bounds")
    if rotation is None:
        rotation = generated_rotation
    else:
        rotation = np.array(rotation, dtype=float)
        if rotation.shape != (dim, dim):
            raise ValueError("rotation must be a dim x dim matrix")
        if not np.allclose(rotation.T @ rotation, np.eye(dim), atol=OPTIMUM_TOL):
            raise ValueError("rotation must be orthogonal")

    shift = np.ascontiguousarray(shift)
    rotation = np.ascontiguousarray(rotation)
    shift.setflags(write=False)
    rotation.setflags(write=False)

    return BenchmarkProblem(
        id=problem_id,
        space=space,
        f_star=F_STAR[problem_id],
        shift=shift,
        rotation=rotation,
        landscape_class=LANDSCAPE_CLASS[problem_id],
        composition=composition,
    )


def evaluate_batch(problem: BenchmarkProblem, xs: np.ndarray) -> np.ndarray:
    """Evaluate a (n, dim) batch of points; returns the n objective values."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != problem.dim:
        raise ValueError(
            f"expected points of dimension {problem.dim}, got shape {xs.shape}"
        )
    assert problem.space.contains(xs), "point outside bounds; clamp before evaluating"
    z = (xs - problem.shift) @ problem.rotation.T
    if problem.composition is not None:
        base = _composition_value(problem.composition, z)
    else:
        base = _BASE_FUNCTIONS[_SIMPLE_BASE[problem.id]](z)
    return problem.f_star + base


def evaluate_true(problem: BenchmarkProblem, x: np.ndarray) -> float:
    """Evaluate a single point. Deterministic; free of side effects."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise ValueError(f"expected a vector of length {problem.dim}, got shape {x.shape}")
    return float(evaluate_batch(problem, x[None, :])[0])


def error_to_optimum(problem: BenchmarkProblem, value: float) -> float:
    """Gap between an objective value and the known optimum."""
    return value - problem.f_star


def load_shift_rotation(path) -> tuple[int, np.ndarray, np.ndarray]:
    """Read externally supplied shift/rotation data.

    Plain-text format: first line the dimension, second line ``dim``
    reals (the shift), then ``dim`` lines of ``dim`` reals (rotation
    rows), whitespace-separated.
    """
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty problem data file")
    dim = int(tokens[0])
    expected = 1 + dim + dim * dim
    if len(tokens) != expected:
        raise ValueError(
            f"{path}: expected {expected} values for dim {dim}, found {len(tokens)}"
        )
    values = np.array([float(t) for t in tokens[1:]])
    shift = values[:dim]
    rotation = values[dim:].reshape(dim, dim)
    return dim, shift, rotation
