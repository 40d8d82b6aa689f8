"""Rank statistics and multiple-comparison tests.

Kendall's tau-b for the accuracy-vs-performance correlation, the
Mann-Whitney U test for between-strategy comparisons (exact enumeration
for small samples, tie-corrected normal approximation otherwise), and
Tukey's HSD across accuracy groups backed by a studentized-range
quantile computed by direct numerical integration of its CDF.

All functions are pure and reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, ndtr
from scipy.stats import chi2

EXACT_MWU_LIMIT = 8  # largest min(sample size) handled by exact enumeration


def kendall_tau(xs, ys) -> float:
    """Tie-corrected (tau-b) rank correlation in [-1, 1].

    With one group of values constant the tie correction zeroes a
    denominator factor; the correlation is reported as 0.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError(f"invalid input: shapes {xs.shape} and {ys.shape}")
    n = len(xs)
    if n < 2:
        raise ValueError("invalid input: need at least 2 observations")
    iu = np.triu_indices(n, k=1)
    dx = np.sign(xs[:, None] - xs[None, :])[iu]
    dy = np.sign(ys[:, None] - ys[None, :])[iu]
    concordant_minus_discordant = float(np.sum(dx * dy))
    n0 = n * (n - 1) // 2
    ties_x = int(np.sum(dx == 0))
    ties_y = int(np.sum(dy == 0))
    denom = math.sqrt(float((n0 - ties_x) * (n0 - ties_y)))
    if denom == 0.0:
        return 0.0
    return concordant_minus_discordant / denom


@dataclass(frozen=True)
class MwuResult:
    """Two-sided Mann-Whitney verdict. ``u`` belongs to the first sample;
    ``better`` names the significantly lower-valued sample, if any."""

    u: float
    p: float
    significant: bool
    better: str | None  # "a" | "b" | None


def _midranks(pooled: np.ndarray) -> np.ndarray:
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(len(pooled))
    sorted_vals = pooled[order]
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_mwu_p(doubled_ranks: np.ndarray, n1: int, u2_observed: int) -> float:
    """Exact two-sided p under the permutation null, ties included.

    Counts size-n1 subsets of the pooled (doubled, hence integer)
    midranks by rank sum with a subset-sum table, then doubles the
    smaller tail of the induced U distribution.
    """
    total = int(doubled_ranks.sum())
    # dp[k][s]: subsets of size k with doubled-rank sum s; per item the
    # size index runs downward so the item is used at most once
    dp = np.zeros((n1 + 1, total + 1), dtype=float)
    dp[0, 0] = 1.0
    for r in doubled_ranks:
        r = int(r)
        for size in range(n1, 0, -1):
            dp[size, r:] += dp[size - 1, 0 : total + 1 - r]
    counts = dp[n1]
    n_subsets = counts.sum()
    # doubled U = doubled rank sum - n1 (n1 + 1)
    offset = n1 * (n1 + 1)
    sums = np.arange(total + 1)
    u2 = sums - offset
    lower = counts[u2 <= u2_observed].sum() / n_subsets
    upper = counts[u2 >= u2_observed].sum() / n_subsets
    return min(1.0, 2.0 * min(lower, upper))


def mann_whitney_u(a, b, alpha: float = 0.05, method: str = "auto") -> MwuResult:
    """Two-sided Mann-Whitney U test.

    U is computed from midrank sums. The p-value comes from exact
    enumeration when the smaller sample has at most 8 values, otherwise
    from the normal approximation with tie and continuity corrections.
    Two identical samples are not significant by definition.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples must be non-empty")
    if method not in ("auto", "exact", "normal"):
        raise ValueError(f"unknown method {method!r}")
    pooled = np.concatenate((a, b))
    ranks = _midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u = r1 - n1 * (n1 + 1) / 2.0

    if method == "exact" or (method == "auto" and min(n1, n2) <= EXACT_MWU_LIMIT):
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        p = _exact_mwu_p(doubled, n1, u2_observed=int(round(2.0 * u)))
    else:
        n = n1 + n2
        _, tie_counts = np.unique(pooled, return_counts=True)
        tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (n * (n - 1))
        var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
        if var <= 0.0:
            p = 1.0
        else:
            z = max(abs(u - n1 * n2 / 2.0) - 0.5, 0.0) / math.sqrt(var)
            p = min(1.0, 2.0 * float(ndtr(-z)))

    significant = p < alpha
    better = None
    if significant:
        med_a, med_b = float(np.median(a)), float(np.median(b))
        if med_a != med_b:
            better = "a" if med_a < med_b else "b"
        else:
            better = "a" if u < n1 * n2 / 2.0 else "b"
    return MwuResult(u=u, p=p, significant=significant, better=better)


def _chi_s_log_pdf(s: np.ndarray, df: int) -> np.ndarray:
    # density of chi_df / sqrt(df)
    return (
        math.log(2.0)
        + 0.5 * df * math.log(df / 2.0)
        - gammaln(df / 2.0)
        + (df - 1) * np.log(s)
        - 0.5 * df * s * s
    )


@lru_cache(maxsize=32)
def _quadrature_nodes(df: int):
    x_nodes, x_weights = np.polynomial.legendre.leggauss(240)
    x = 9.0 * x_nodes
    xw = 9.0 * x_weights
    phi = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    s_hi = math.sqrt(chi2.ppf(1.0 - 1e-14, df) / df)
    s_nodes, s_weights = np.polynomial.legendre.leggauss(200)
    s = 0.5 * s_hi * (s_nodes + 1.0)
    sw = 0.5 * s_hi * s_weights
    s_pdf = np.exp(_chi_s_log_pdf(s, df))
    return x, xw, phi, s, sw * s_pdf


def studentized_range_cdf(q: float, k: int, df: int) -> float:
    """P(Q <= q) for the studentized range of k groups with df error
    degrees of freedom, by Gauss-Legendre integration of

        integral over scale s of  P(range of k standard normals <= q s)

    against the chi_df / sqrt(df) density.
    """
    if q <= 0.0:
        return 0.0
    x, xw, phi, s, s_mass = _quadrature_nodes(df)
    r = q * s
    cdf_x = ndtr(x)
    inner = cdf_x[None, :] - ndtr(x[None, :] - r[:, None])
    range_cdf = k * np.dot(phi * xw, (inner ** (k - 1)).T)
    return float(np.dot(s_mass, np.clip(range_cdf, 0.0, 1.0)))


@lru_cache(maxsize=256)
def studentized_range_quantile(k: int, df: int, alpha: float) -> float:
    """Upper-alpha quantile of the studentized range distribution,
    located by bisection on the numerically integrated CDF."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if df < 1:
        raise ValueError("df must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    target = 1.0 - alpha
    lo, hi = 1e-6, 10.0
    while studentized_range_cdf(hi, k, df) < target:
        hi *= 2.0
        if hi > 1e4:
            raise RuntimeError(
                f"studentized range quantile failed to bracket: k={k} df={df} "
                f"alpha={alpha}, cdf({hi / 2}) = {studentized_range_cdf(hi / 2, k, df)}"
            )
    return float(brentq(lambda q: studentized_range_cdf(q, k, df) - target, lo, hi, xtol=1e-10))


@dataclass
class PairwiseVerdictMatrix:
    """All-pairs significance with direction.

    ``significant`` is symmetric with a False diagonal; ``direction``
    holds +1 where the row group is better (lower mean), -1 where the
    column group is, antisymmetrically, and 0 off significance.
    """

    labels: list[str]
    significant: np.ndarray
    direction: np.ndarray
    alpha: float

    def verdict(self, i: int, j: int) -> str:
        if not self.significant[i, j]:
            return "ns"
        return "row-better" if self.direction[i, j] > 0 else "col-better"


def tukey_hsd(groups: list[tuple[str, np.ndarray]], alpha: float = 0.05) -> PairwiseVerdictMatrix:
    """Tukey's honest-significant-difference test on a one-way layout.

    Pairwise critical ranges use the studentized range quantile at k
    groups and N - k degrees of freedom with the Tukey-Kramer correction
    for unequal group sizes. A zero pooled variance degenerates cleanly:
    unequal means are significant, equal means are not.
    """
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    labels = [name for name, _ in groups]
    data = [np.asarray(vals, dtype=float) for _, vals in groups]
    if any(len(v) < 2 for v in data):
        raise ValueError("every group needs at least 2 values")
    k = len(data)
    sizes = np.array([len(v) for v in data])
    means = np.array([v.mean() for v in data])
    n_total = int(sizes.sum())
    df = n_total - k
    sse = float(sum(np.sum((v - v.mean()) ** 2) for v in data))
    mse = sse / df

    significant = np.zeros((k, k), dtype=bool)
    direction = np.zeros((k, k), dtype=np.int8)
    q_crit = studentized_range_quantile(k, df, alpha) if mse > 0.0 else None
    for i in range(k):
        for j in range(i + 1, k):
            diff = means[i] - means[j]
            if mse == 0.0:
                sig = diff != 0.0
            else:
                crit = q_crit * math.sqrt(mse / 2.0 * (1.0 / sizes[i] + 1.0 / sizes[j]))
                sig = abs(diff) > crit
            if sig:
                significant[i, j] = significant[j, i] = True
                direction[i, j] = 1 if diff < 0 else -1
                direction[j, i] = -direction[i, j]
    return PairwiseVerdictMatrix(
        labels=labels, significant=significant, direction=direction, alpha=alpha
    )
