"""Dense two-phase primal simplex for margin maximization.

Solves

    maximize t  subject to  G u >= t * 1,  E u = f (optional),  t <= cap

with free variables ``u`` and ``t``.  The problem is feasible if and only if
the equality system alone is: given any u with E u = f, every small enough t
satisfies the margin rows.  A positive optimum certifies a strictly feasible
point of ``G u > 0`` on the affine set, which is how the package certifies
membership in open polyhedral regions.

The objective is bounded by construction (t <= cap), so a kernel report of
"unbounded" can only mean a numerically null improving column slipped past
the pricing threshold; the solve is then rebuilt from scratch with coarser
pricing.  Stopping early at a coarser threshold can only understate the
optimal margin, never overstate it, so certificates stay conservative.

The pivot loop is the hot kernel of the whole package: region enumeration
solves one LP per candidate pattern and the Monte Carlo grids solve one
medium-sized LP per trial.  A compiled Cython kernel is preferred when the
extension built; a numpy fallback with identical pivot rules is always
available.  Set ``RELUREGIONS_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _simplex_py
from .errors import InputError, InvariantViolation
from .linalg import DEFAULT_TOL, Tol, as_matrix, as_vector

__all__ = ["MarginResult", "lp_max_margin", "kernel_backend", "available_kernels"]

_PRICE_EPS = 1e-9  # reduced-cost threshold; escalated on numerical trouble
_PIVOT_TOL = 1e-8  # ratio-test eligibility: smaller pivots amplify roundoff

_KERNELS: dict[str, object] = {"python": _simplex_py.simplex_loop}
_BACKEND = "python"
if not os.environ.get("RELUREGIONS_PURE"):
    try:
        from . import _simplex_c

        _KERNELS["compiled"] = _simplex_c.simplex_loop
        _BACKEND = "compiled"
    except ImportError:
        pass


def kernel_backend() -> str:
    """Name of the pivot kernel selected at import ("compiled" or "python")."""
    return _BACKEND


def available_kernels() -> dict:
    return dict(_KERNELS)


@dataclass(frozen=True)
class MarginResult:
    """Outcome of a margin LP.

    ``feasible`` is False only when the equality system E u = f has no
    solution; in that case ``t`` and ``witness`` are meaningless.
    """

    feasible: bool
    t: float
    witness: np.ndarray | None


class _NumericalTrouble(Exception):
    pass


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0


def _solve_once(loop, G, E, f, cap, eps):
    m, k = G.shape
    p = 0 if E is None else E.shape[0]

    # Standard-form layout: u+ (k), u- (k), t+, t-, margin slacks (m),
    # cap slack, artificials (p).  All free variables are split.
    tp = 2 * k
    tm = 2 * k + 1
    s0 = 2 * k + 2
    sigma = s0 + m
    a0 = sigma + 1
    ncols = a0 + p
    nrows = m + p + 1

    T = np.zeros((nrows + 1, ncols + 1))
    basis = np.empty(nrows, dtype=np.int64)

    # Margin rows, written as  -G_i u + t + s_i = 0  so each slack starts basic.
    T[:m, 0:k] = -G
    T[:m, k : 2 * k] = G
    T[:m, tp] = 1.0
    T[:m, tm] = -1.0
    T[np.arange(m), s0 + np.arange(m)] = 1.0
    basis[:m] = s0 + np.arange(m)

    # Equality rows, sign-flipped so the right-hand side is nonnegative.
    for j in range(p):
        sign = 1.0 if f[j] >= 0.0 else -1.0
        r = m + j
        T[r, 0:k] = sign * E[j]
        T[r, k : 2 * k] = -sign * E[j]
        T[r, a0 + j] = 1.0
        T[r, ncols] = sign * f[j]
        basis[r] = a0 + j

    # Cap row: t + sigma = cap.
    r = m + p
    T[r, tp] = 1.0
    T[r, tm] = -1.0
    T[r, sigma] = 1.0
    T[r, ncols] = cap
    basis[r] = sigma

    stall_limit = 1000 + 2 * nrows
    max_iter = 200_000

    def run() -> None:
        status = loop(T, basis, eps, _PIVOT_TOL, max_iter, stall_limit)
        if status == _simplex_py.UNBOUNDED:
            raise _NumericalTrouble("numerically null improving column")
        if status == _simplex_py.ITERATION_LIMIT:
            raise InvariantViolation("simplex iteration limit exceeded")

    if p > 0:
        # Phase 1: minimize the artificial sum.
        T[nrows] = -T[m : m + p].sum(axis=0)
        T[nrows, a0:ncols] = 0.0
        run()
        infeas = -T[nrows, ncols]
        if infeas > 1e-8 * (1.0 + float(np.abs(f).sum())):
            return None
        # Pivot leftover artificials out of the basis; drop redundant rows.
        drop_rows = []
        for i in range(nrows):
            if basis[i] < a0:
                continue
            entering = -1
            for j in range(a0):
                if abs(T[i, j]) > _PIVOT_TOL:
                    entering = j
                    break
            if entering < 0:
                drop_rows.append(i)
                continue
            _pivot(T, i, entering)
            basis[i] = entering
        keep = [i for i in range(nrows) if i not in drop_rows]
        T = np.ascontiguousarray(np.delete(T[keep + [nrows]], np.s_[a0:ncols], axis=1))
        basis = basis[keep]
        nrows = len(keep)
        ncols = a0

    # Phase 2: maximize t, i.e. minimize -t+ + t-.
    T[nrows] = 0.0
    T[nrows, tp] = -1.0
    T[nrows, tm] = 1.0
    for i in range(nrows):
        cb = -1.0 if basis[i] == tp else (1.0 if basis[i] == tm else 0.0)
        if cb != 0.0:
            T[nrows] -= cb * T[i]
    run()

    x = np.zeros(ncols)
    x[basis] = T[np.arange(nrows), ncols]
    t_star = float(x[tp] - x[tm])
    witness = x[0:k] - x[k : 2 * k]
    return t_star, witness


def lp_max_margin(
    G,
    E=None,
    f=None,
    cap: float = 1.0,
    tol: Tol = DEFAULT_TOL,
    kernel: str | None = None,
) -> MarginResult:
    """Maximize the common margin t of ``G u >= t`` subject to ``E u = f``, ``t <= cap``.

    Rows of G are used as given; callers wanting geometrically meaningful
    margins should normalize rows first.  ``cap`` must be positive: the
    margin constraints are satisfiable at t = 0 for any u in the equality
    set, so the cap is what keeps the objective bounded.
    """
    G = as_matrix(G, name="G")
    _, k = G.shape
    if k < 1:
        raise InputError("G must have at least one column")
    if not (cap > 0.0):
        raise InputError(f"cap must be positive, got {cap!r}")
    if (E is None) != (f is None):
        raise InputError("E and f must be supplied together")
    if E is not None:
        E = as_matrix(E, name="E")
        f = as_vector(f, name="f")
        if E.shape[0] != f.shape[0]:
            raise InputError("E and f row counts differ")
        if E.shape[1] != k:
            raise InputError("E and G column counts differ")

    loop = _KERNELS[kernel] if kernel is not None else _KERNELS[_BACKEND]

    eps = _PRICE_EPS
    last = None
    for _ in range(3):
        try:
            outcome = _solve_once(loop, G, E, f, cap, eps)
        except _NumericalTrouble as trouble:
            last = trouble
            eps *= 100.0
            continue
        if outcome is None:
            return MarginResult(False, float("nan"), None)
        t_star, witness = outcome
        return MarginResult(True, t_star, witness)
    raise InvariantViolation(f"margin LP failed numerically after escalation: {last}")
