"""Counting, feasibility, and enumeration of activation regions.

A unit's candidate pattern is a binary vector over the data points; the
pattern is realizable exactly when the open cone
``{ w : (2 a_j - 1) <w, xhat_j> > 0 for all j }`` is non-empty, which is
decided by a margin LP.  Because units have independent parameters, a full
pattern matrix is realizable iff each of its rows is, and the number of
realizable per-unit patterns for data in general position follows the
classical hyperplane-arrangement count.  Realizable patterns are also the
vertex labels of the zonotope obtained as the Minkowski sum of the segments
[0, x_j]; both routes are implemented and tested against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import InputError
from .exact import RatMat, rational_rank
from .linalg import DEFAULT_TOL, Tol, as_matrix, embed_ones, normalize_rows
from .lp import lp_max_margin
from .model import ActivationPattern

__all__ = [
    "UnitPattern",
    "FeasibilityCert",
    "count_regions_general_position",
    "unit_pattern_feasible",
    "region_nonempty",
    "enumerate_feasible_unit_patterns",
    "zonotope_vertex_check",
    "certify_general_position",
]

ENUMERATION_LIMIT = 16


@dataclass(frozen=True)
class UnitPattern:
    """Activation indicator of a single unit over the dataset."""

    a: tuple
    bias_flag: bool = False

    def __post_init__(self) -> None:
        a = tuple(int(x) for x in self.a)
        if any(x not in (0, 1) for x in a):
            raise InputError("pattern entries must be 0 or 1")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class FeasibilityCert:
    """LP certificate for one unit pattern.

    When feasible, ``witness`` is a (w, b) pair (b None without bias) whose
    preactivation signs strictly realize the pattern with the stated margin.
    """

    feasible: bool
    witness: tuple | None
    margin: float


def count_regions_general_position(n: int, d: int, d1: int) -> int:
    """Number of non-empty activation regions for general-position data.

    Exact big-integer evaluation of ``(2 * sum_{k<d} C(n-1, k)) ** d1``; for
    n <= d this equals 2 ** (n * d1), every pattern being realizable.
    """
    if n < 1 or d < 1 or d1 < 1:
        raise InputError("n, d and d1 must all be at least 1")
    per_unit = 2 * sum(comb(n - 1, k) for k in range(d))
    return per_unit**d1


def _margin_rows(a, X: np.ndarray) -> np.ndarray:
    signs = 2.0 * np.asarray(a, dtype=float) - 1.0
    return normalize_rows(signs[:, None] * X.T)


def unit_pattern_feasible(u: UnitPattern, X, tol: Tol = DEFAULT_TOL) -> FeasibilityCert:
    """Decide whether a single unit can realize pattern ``u`` on ``X``.

    Solves the margin LP over the (row-normalized) sign-flipped data columns
    with cap 1; the constraint cone is scale-invariant, so margin 1 is
    attainable whenever any strictly feasible direction exists.  Feasible
    means margin strictly above ``lp_tol``: region membership is an open
    condition and boundary hits must not count.
    """
    X = as_matrix(X, name="X")
    if X.shape[1] != u.n:
        raise InputError(f"X has {X.shape[1]} columns but pattern has length {u.n}")
    Xh = embed_ones(X) if u.bias_flag else X
    G = _margin_rows(u.a, Xh)
    result = lp_max_margin(G, cap=1.0, tol=tol)
    margin = result.t
    if margin <= tol.lp_tol:
        return FeasibilityCert(False, None, margin)
    w = result.witness
    if u.bias_flag:
        witness = (w[:-1].copy(), float(w[-1]))
    else:
        witness = (w.copy(), None)
    return FeasibilityCert(True, witness, margin)


def region_nonempty(A: ActivationPattern, X, tol: Tol = DEFAULT_TOL) -> bool:
    """Whether the full pattern matrix is realizable.

    Units have independent parameters, so the region is a product of
    per-unit cones and is non-empty iff every row passes the unit LP.
    """
    X = as_matrix(X, name="X")
    return all(
        unit_pattern_feasible(UnitPattern(tuple(row), A.bias_flag), X, tol).feasible
        for row in A.A
    )


def enumerate_feasible_unit_patterns(
    X,
    limit: int = ENUMERATION_LIMIT,
    bias: bool = False,
    tol: Tol = DEFAULT_TOL,
    use_fast_path: bool = True,
) -> list[UnitPattern]:
    """All realizable per-unit patterns, in lexicographic order.

    Exhaustive scan of all 2**n candidates (one LP each), refused above
    ``limit`` points.  For one-dimensional data with a bias, realizable
    patterns are exactly the one-switch threshold patterns, so a sorted
    fast path returns them directly without any LP; ``use_fast_path=False``
    forces the LP route (the two are tested against each other).
    """
    X = as_matrix(X, name="X")
    n = X.shape[1]
    if n > limit:
        raise InputError(f"enumeration over 2^{n} patterns exceeds limit {limit}")

    if use_fast_path and bias and X.shape[0] == 1:
        x = X[0]
        if len(set(x.tolist())) == n:
            order = np.argsort(x, kind="stable")
            patterns = set()
            for k in range(n + 1):
                prefix = np.zeros(n, dtype=int)
                prefix[order[:k]] = 1  # unit active on the k smallest points
                patterns.add(tuple(prefix))
                patterns.add(tuple(1 - prefix))
            return [UnitPattern(a, True) for a in sorted(patterns)]

    out = []
    for code in range(2**n):
        a = tuple((code >> (n - 1 - j)) & 1 for j in range(n))
        if unit_pattern_feasible(UnitPattern(a, bias), X, tol).feasible:
            out.append(UnitPattern(a, bias))
    return sorted(out, key=lambda u: u.a)


def zonotope_vertex_check(S, X, tol: Tol = DEFAULT_TOL) -> bool:
    """Whether the subset sum over ``S`` is a vertex of sum_j [0, x_j].

    A Minkowski sum of segments has the subset sum of S as a vertex exactly
    when some direction w supports it strictly: <w, x_j> > 0 on S and < 0
    off S.  That strict feasibility is decided by the margin LP on the
    supporting-hyperplane rows.
    """
    X = as_matrix(X, name="X")
    n = X.shape[1]
    S = frozenset(int(j) for j in S)
    if S and (min(S) < 0 or max(S) >= n):
        raise InputError(f"subset indices must lie in [0, {n})")
    signs = np.array([1.0 if j in S else -1.0 for j in range(n)])
    G = normalize_rows(signs[:, None] * X.T)
    result = lp_max_margin(G, cap=1.0, tol=tol)
    return result.t > tol.lp_tol


def certify_general_position(X, max_n: int = 12) -> bool:
    """Exact general-position certificate for the columns of X.

    Checks, in rational arithmetic on the float-snapped entries, that every
    subset of min(d, n) columns has full rank; this implies any k <= d
    columns are linearly independent.  Guards the counting law, which holds
    only for general-position data; refuses more than ``max_n`` columns,
    the subset scan being exponential.
    """
    X = as_matrix(X, name="X")
    d, n = X.shape
    if n > max_n:
        raise InputError(f"general-position check limited to {max_n} columns, got {n}")
    k = min(d, n)
    for cols in combinations(range(n), k):
        sub = RatMat.from_floats(X[:, cols])
        if rational_rank(sub) < k:
            return False
    return True
