# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the noisy comparison sort.

Must stay bit-for-bit interchangeable with ``_sort_pure.sort_core``;
the test suite and the kernel benchmark both assert agreement.
"""


def sort_core(long long[::1] order,
              const double[::1] fitness,
              const unsigned char[::1] official,
              const double[::1] uniforms,
              double accuracy):
    """Fixed-schedule bubble sort over a permutation array, in place.

    Pass i performs n-1-i adjacent comparisons. A pair of official
    individuals compares by exact fitness; any other pair consumes the
    next pre-drawn uniform and flips the true verdict when it falls
    below (1 - accuracy). Returns the number of noisy comparisons.
    """
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t i, j, a, b
    cdef Py_ssize_t k = 0
    cdef double flip = 1.0 - accuracy
    cdef bint left_is_better
    for i in range(n):
        for j in range(n - 1 - i):
            a = order[j]
            b = order[j + 1]
            if official[a] and official[b]:
                if fitness[a] > fitness[b]:
                    order[j] = b
                    order[j + 1] = a
            else:
                left_is_better = fitness[a] < fitness[b]
                if uniforms[k] < flip:
                    left_is_better = not left_is_better
                k += 1
                if not left_is_better:
                    order[j] = b
                    order[j + 1] = a
    return k
