# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simplex pivot loop.

Behavioural twin of ``_simplex_py.simplex_loop``; see that module for the
pivot-rule contract.  Kept dependency-free (typed memoryviews only) so the
build needs nothing beyond a C compiler.
"""

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def simplex_loop(double[:, ::1] T, long long[::1] basis, double eps, double piv_tol,
                 long max_iter, long stall_limit):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t n = T.shape[1] - 1
    cdef bint bland = False
    cdef long stall = 0
    cdef long it
    cdef Py_ssize_t i, j, col, row
    cdef double best, a, r, rmin, tie, pivot, factor

    for it in range(max_iter):
        # --- pricing ---
        col = -1
        if bland:
            for j in range(n):
                if T[m, j] < -eps:
                    col = j
                    break
        else:
            best = -eps
            for j in range(n):
                if T[m, j] < best:
                    best = T[m, j]
                    col = j
        if col < 0:
            return OPTIMAL

        # --- ratio test: minimum ratio over eligible pivots ---
        rmin = 0.0
        row = -1
        for i in range(m):
            a = T[i, col]
            if a > piv_tol:
                r = T[i, n] / a
                if row < 0 or r < rmin:
                    rmin = r
                    row = i
        if row < 0:
            return UNBOUNDED
        tie = 1e-9 * (1.0 + (rmin if rmin >= 0 else -rmin))
        if bland:
            # smallest basic variable index among ties (anti-cycling)
            for i in range(m):
                a = T[i, col]
                if a > piv_tol:
                    r = T[i, n] / a
                    if r <= rmin + tie and basis[i] < basis[row]:
                        row = i
        else:
            # largest pivot element among ties (numerical stability)
            for i in range(m):
                a = T[i, col]
                if a > piv_tol:
                    r = T[i, n] / a
                    if r <= rmin + tie and a > T[row, col]:
                        row = i

        if T[row, n] <= eps:
            stall += 1
            if stall > stall_limit:
                bland = True
        else:
            stall = 0

        # --- pivot ---
        pivot = T[row, col]
        for j in range(n + 1):
            T[row, j] /= pivot
        for i in range(m + 1):
            if i == row:
                continue
            factor = T[i, col]
            if factor != 0.0:
                for j in range(n + 1):
                    T[i, j] -= factor * T[row, j]
            T[i, col] = 0.0
        T[row, col] = 1.0
        basis[row] = col
    return ITERATION_LIMIT
