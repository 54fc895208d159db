"""Pure-numpy simplex pivot loop.

This is the fallback twin of the compiled kernel in ``_simplex_c.pyx``.  Both
implement the same pivot rules so that solver behaviour does not depend on
which one is loaded:

* pricing: Dantzig (most negative reduced cost, first index on ties), with a
  permanent switch to Bland's rule after too many consecutive degenerate
  pivots (anti-cycling guarantee);
* ratio test: minimum ratio over rows whose column entry exceeds ``piv_tol``
  (tiny pivots would amplify roundoff catastrophically); ties are broken by
  the largest pivot element for stability, or by smallest basic variable
  index once Bland's rule is active (termination guarantee).

The tableau ``T`` has shape (m+1, n+1): row m is the reduced-cost row of a
minimization problem, column n is the right-hand side, and ``T[m, n]`` holds
minus the current objective value.  ``basis[i]`` is the column basic in row i.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def simplex_loop(
    T: np.ndarray,
    basis: np.ndarray,
    eps: float,
    piv_tol: float,
    max_iter: int,
    stall_limit: int,
) -> int:
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    obj = T[m]
    bland = False
    stall = 0
    for _ in range(max_iter):
        if bland:
            neg = np.nonzero(obj[:n] < -eps)[0]
            if neg.size == 0:
                return OPTIMAL
            col = int(neg[0])
        else:
            col = int(np.argmin(obj[:n]))
            if obj[col] >= -eps:
                return OPTIMAL

        column = T[:m, col]
        eligible = column > piv_tol
        if not np.any(eligible):
            return UNBOUNDED
        ratios = np.full(m, np.inf)
        ratios[eligible] = T[:m, n][eligible] / column[eligible]
        rmin = float(ratios.min())
        tie = 1e-9 * (1.0 + abs(rmin))
        candidates = np.nonzero(ratios <= rmin + tie)[0]
        if bland:
            row = int(candidates[np.argmin(basis[candidates])])
        else:
            row = int(candidates[np.argmax(column[candidates])])

        if T[row, n] <= eps:
            stall += 1
            if stall > stall_limit:
                bland = True
        else:
            stall = 0

        pivot = T[row, col]
        T[row] /= pivot
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        basis[row] = col
    return ITERATION_LIMIT
