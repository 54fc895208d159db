"""Dense real linear algebra with explicit tolerances.

Everything here is a thin, contract-checked layer over numpy's SVD/lstsq
machinery.  All rank decisions in the package funnel through ``mat_rank`` so
that a single relative singular-value threshold governs them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "Tol",
    "DEFAULT_TOL",
    "as_matrix",
    "as_vector",
    "embed_ones",
    "normalize_rows",
    "mat_rank",
    "nullspace_basis",
    "least_squares_min_norm",
    "khatri_rao",
]


@dataclass(frozen=True)
class Tol:
    """Tolerance bundle used throughout the package.

    rank_tol
        Relative singular-value threshold for numerical rank.
    residual_tol
        Relative residual threshold deciding whether a least-squares fit
        counts as exact (zero loss).
    lp_tol
        Feasibility margin threshold: a linear-inequality system counts as
        strictly feasible only when the optimized margin exceeds this value
        after row normalization.
    """

    rank_tol: float = 1e-9
    residual_tol: float = 1e-8
    lp_tol: float = 1e-7

    def __post_init__(self) -> None:
        for name in ("rank_tol", "residual_tol", "lp_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise InputError(f"{name} must lie strictly between 0 and 1, got {value!r}")


DEFAULT_TOL = Tol()


def as_matrix(M, *, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d float array, rejecting non-finite entries."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} contains non-finite entries")
    return A


def as_vector(v, *, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-d float array, rejecting non-finite entries."""
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise InputError(f"{name} must be 1-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite entries")
    return a


def embed_ones(X) -> np.ndarray:
    """Append a trailing all-ones row to ``X``.

    Models with a bias term are handled uniformly by embedding each input
    column x as (x, 1); the bias becomes the trailing weight coordinate.
    """
    X = as_matrix(X, name="X")
    return np.vstack([X, np.ones((1, X.shape[1]))])


def normalize_rows(G) -> np.ndarray:
    """Scale each row to unit Euclidean norm; zero rows are left untouched."""
    G = as_matrix(G, name="G")
    norms = np.linalg.norm(G, axis=1)
    out = G.copy()
    nz = norms > 0.0
    out[nz] /= norms[nz, None]
    return out


def mat_rank(M, tol: Tol = DEFAULT_TOL) -> int:
    """Numerical rank: singular values above ``rank_tol`` times the largest.

    The zero matrix (and any empty matrix) has rank 0.
    """
    A = as_matrix(M, name="M")
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def nullspace_basis(M, tol: Tol = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, one column per dimension.

    Always satisfies ``rank + basis.shape[1] == cols``.
    """
    A = as_matrix(M, name="M")
    cols = A.shape[1]
    if A.size == 0:
        return np.eye(cols)[:, :cols] if cols else np.zeros((0, 0))
    _, s, vt = np.linalg.svd(A)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol.rank_tol * s[0]))
    return vt[rank:].T.copy()


def least_squares_min_norm(M, y, tol: Tol = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of M x ~ y and its residual norm."""
    A = as_matrix(M, name="M")
    b = as_vector(y, name="y")
    if b.shape[0] != A.shape[0]:
        raise InputError(f"y has length {b.shape[0]}, expected {A.shape[0]}")
    x, _, _, _ = np.linalg.lstsq(A, b, rcond=tol.rank_tol)
    residual = float(np.linalg.norm(A @ x - b))
    return x, residual


def khatri_rao(A, X) -> np.ndarray:
    """Columnwise Kronecker product.

    Column j of the result is ``A[:, j] kron X[:, j]``; the output has
    ``rows(A) * rows(X)`` rows.  Index (i, l) of column j sits at row
    ``i * rows(X) + l``, i.e. A-major ordering.
    """
    A = as_matrix(A, name="A")
    X = as_matrix(X, name="X")
    if A.shape[1] != X.shape[1]:
        raise InputError(
            f"column counts differ: A has {A.shape[1]}, X has {X.shape[1]}"
        )
    ra, n = A.shape
    rx = X.shape[0]
    return (A[:, None, :] * X[None, :, :]).reshape(ra * rx, n)
