"""Pure-Python fallback for the noisy comparison sort kernel.

Semantically identical to the compiled ``_sort_ext.sort_core``: same
comparison schedule, same uniform-consumption order, same results.
Used when the extension is not built (or when SAEA_LAB_PURE_PYTHON is
set); roughly two orders of magnitude slower.
"""

from __future__ import annotations

import numpy as np


def sort_core(
    order: np.ndarray,
    fitness: np.ndarray,
    official: np.ndarray,
    uniforms: np.ndarray,
    accuracy: float,
) -> int:
    n = len(order)
    perm = order.tolist()
    fit = fitness.tolist()
    off = official.tolist()
    uni = uniforms.tolist()
    flip = 1.0 - accuracy
    k = 0
    for i in range(n):
        for j in range(n - 1 - i):
            a = perm[j]
            b = perm[j + 1]
            if off[a] and off[b]:
                if fit[a] > fit[b]:
                    perm[j] = b
                    perm[j + 1] = a
            else:
                left_is_better = fit[a] < fit[b]
                if uni[k] < flip:
                    left_is_better = not left_is_better
                k += 1
                if not left_is_better:
                    perm[j] = b
                    perm[j + 1] = a
    order[:] = perm
    return k
