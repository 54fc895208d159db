"""Two-layer ReLU network with a frozen output head.

The network computes F(x) = v . relu(W x + b) with trainable first layer
(W, optionally b) and a fixed output vector v whose entries are all nonzero.
For a fixed dataset, parameter space splits into open polyhedral cones on
which every unit's active/inactive status is constant; each cone is recorded
as a binary pattern matrix with one row per unit and one column per data
point.  On such a cone the network output is linear in the parameters and
its Jacobian is the columnwise Kronecker product of the (v-scaled) pattern
columns with the (bias-embedded) input columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .linalg import DEFAULT_TOL, Tol, as_matrix, as_vector, embed_ones, khatri_rao, mat_rank

__all__ = [
    "Dataset",
    "Params",
    "ActivationPattern",
    "forward",
    "loss",
    "activation_pattern",
    "jacobian_columns",
    "jacobian_full_rank",
]


@dataclass(frozen=True)
class Dataset:
    """Input columns X (d0 x n) with targets y (length n)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        X = as_matrix(self.X, name="X")
        y = as_vector(self.y, name="y")
        if X.shape[1] != y.shape[0]:
            raise InputError(f"X has {X.shape[1]} columns but y has length {y.shape[0]}")
        if X.shape[1] < 1:
            raise InputError("dataset must contain at least one point")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def d0(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class Params:
    """First-layer weights W (d1 x d0), optional biases b, fixed head v.

    Every entry of v must be nonzero; a zero output weight would silently
    delete a unit and break the rank arguments downstream.
    """

    W: np.ndarray
    b: np.ndarray | None
    v: np.ndarray

    def __post_init__(self) -> None:
        W = as_matrix(self.W, name="W")
        v = as_vector(self.v, name="v")
        if v.shape[0] != W.shape[0]:
            raise InputError(f"v has length {v.shape[0]} but W has {W.shape[0]} rows")
        if np.any(v == 0.0):
            raise InputError("all entries of v must be nonzero")
        b = self.b
        if b is not None:
            b = as_vector(b, name="b")
            if b.shape[0] != W.shape[0]:
                raise InputError(f"b has length {b.shape[0]} but W has {W.shape[0]} rows")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "v", v)

    @property
    def d1(self) -> int:
        return self.W.shape[0]

    @property
    def d0(self) -> int:
        return self.W.shape[1]

    @property
    def has_bias(self) -> bool:
        return self.b is not None


@dataclass(frozen=True)
class ActivationPattern:
    """Binary unit-by-point activation matrix.

    ``bias_flag`` records whether the pattern refers to sign(w x + b) or to
    sign(<w, x>); it decides whether inputs are bias-embedded downstream.
    """

    A: np.ndarray
    bias_flag: bool = field(default=True)

    def __post_init__(self) -> None:
        A = np.asarray(self.A)
        if A.ndim != 2:
            raise InputError("pattern matrix must be 2-dimensional")
        if not np.all((A == 0) | (A == 1)):
            raise InputError("pattern entries must be 0 or 1")
        object.__setattr__(self, "A", A.astype(np.int8))

    @property
    def d1(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


def _preactivations(p: Params, X: np.ndarray) -> np.ndarray:
    if X.shape[0] != p.d0:
        raise InputError(f"X has {X.shape[0]} rows but W expects {p.d0}")
    pre = p.W @ X
    if p.b is not None:
        pre = pre + p.b[:, None]
    return pre


def forward(p: Params, X) -> np.ndarray:
    """Network outputs on every column of X."""
    X = as_matrix(X, name="X")
    return p.v @ np.maximum(_preactivations(p, X), 0.0)


def loss(p: Params, data: Dataset) -> float:
    """Squared-error loss, half the squared residual norm."""
    r = forward(p, data.X) - data.y
    return 0.5 * float(r @ r)


def activation_pattern(p: Params, X, tol: Tol = DEFAULT_TOL) -> tuple[ActivationPattern, bool]:
    """Activation pattern of ``p`` on ``X`` plus a boundary flag.

    The degenerate flag is set when any preactivation is within
    ``lp_tol`` (relative to its row/column scale) of zero: the parameter
    then sits on a region boundary and the pattern bit is meaningless.
    Monte Carlo drivers must resample such draws; regions are open sets and
    their boundaries carry no probability mass.
    """
    X = as_matrix(X, name="X")
    pre = _preactivations(p, X)
    if p.b is not None:
        row_scale = np.sqrt(np.sum(p.W**2, axis=1) + p.b**2)
        col_scale = np.sqrt(np.sum(X**2, axis=0) + 1.0)
    else:
        row_scale = np.linalg.norm(p.W, axis=1)
        col_scale = np.linalg.norm(X, axis=0)
    scale = np.outer(row_scale, col_scale)
    degenerate = bool(np.any(np.abs(pre) <= tol.lp_tol * scale))
    A = (pre > 0.0).astype(np.int8)
    return ActivationPattern(A, bias_flag=p.b is not None), degenerate


def jacobian_columns(A: ActivationPattern, X, v) -> np.ndarray:
    """Jacobian of the network output with respect to the first layer.

    Column j is ``(v * A[:, j]) kron xhat_j`` where xhat appends a trailing
    1 when the pattern carries a bias flag.  Rows follow the unit-major
    flattening (unit block = weight coordinates then bias).
    """
    X = as_matrix(X, name="X")
    v = as_vector(v, name="v")
    if np.any(v == 0.0):
        raise InputError("all entries of v must be nonzero")
    if v.shape[0] != A.d1:
        raise InputError(f"v has length {v.shape[0]} but pattern has {A.d1} rows")
    if X.shape[1] != A.n:
        raise InputError(f"X has {X.shape[1]} columns but pattern has {A.n}")
    Xh = embed_ones(X) if A.bias_flag else X
    return khatri_rao(v[:, None] * A.A, Xh)


def jacobian_full_rank(A: ActivationPattern, X, tol: Tol = DEFAULT_TOL) -> bool:
    """Whether the per-region Jacobian has rank n.

    The head v never changes this rank (scaling rows of the pattern by
    nonzero constants preserves the kernel of the Khatri-Rao product), so
    the test runs on the raw pattern.  A full-rank region contains no bad
    differentiable critical point: any critical point there is a global
    minimum of the squared loss.
    """
    X = as_matrix(X, name="X")
    if X.shape[1] != A.n:
        raise InputError(f"X has {X.shape[1]} columns but pattern has {A.n}")
    Xh = embed_ones(X) if A.bias_flag else X
    return mat_rank(khatri_rao(A.A.astype(float), Xh), tol) == A.n
