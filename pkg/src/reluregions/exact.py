"""Exact rational-arithmetic rank oracle.

Ranks computed here are ground truth: rows are scaled to integers (binary
floats are exact rationals, so snapping a float matrix loses nothing) and a
fraction-free Bareiss elimination over Python integers counts the pivots.
Used to validate every floating-point rank decision in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import InputError

__all__ = ["RatMat", "rational_rank", "int_rank", "binary_matrix_is_singular"]


@dataclass(frozen=True)
class RatMat:
    """Immutable matrix of exact rationals."""

    rows: int
    cols: int
    entries: tuple  # flat, row-major, Fraction

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise InputError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise InputError(
                f"entry count {len(self.entries)} does not match {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows) -> "RatMat":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        if any(len(r) != nc for r in rows):
            raise InputError("inconsistent row lengths")
        flat = tuple(Fraction(v) for r in rows for v in r)
        return cls(nr, nc, flat)

    @classmethod
    def from_floats(cls, M) -> "RatMat":
        """Snap a float matrix to exact rationals (binary floats are rational)."""
        A = np.asarray(M, dtype=float)
        if A.ndim != 2:
            raise InputError("expected a 2-d array")
        if not np.all(np.isfinite(A)):
            raise InputError("non-finite entry cannot be represented as a rational")
        return cls.from_rows(A.tolist())

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols : (i + 1) * self.cols])

    def to_int_rows(self) -> list:
        """Clear denominators row by row; rank is unchanged."""
        out = []
        for i in range(self.rows):
            r = self.row(i)
            denom_lcm = 1
            for v in r:
                d = v.denominator
                denom_lcm = denom_lcm * d // gcd(denom_lcm, d)
            out.append([int(v * denom_lcm) for v in r])
        return out


def int_rank(rows) -> int:
    """Exact rank of an integer matrix via fraction-free Bareiss elimination."""
    M = [list(map(int, r)) for r in rows]
    nr = len(M)
    if nr == 0:
        return 0
    nc = len(M[0])
    rank = 0
    prev = 1
    col = 0
    while rank < nr and col < nc:
        piv = -1
        for i in range(rank, nr):
            if M[i][col] != 0:
                piv = i
                break
        if piv < 0:
            col += 1
            continue
        if piv != rank:
            M[rank], M[piv] = M[piv], M[rank]
        pr = M[rank]
        p = pr[col]
        # Bareiss step: every remaining row is rescaled by the pivot and
        # divided by the previous pivot, zero multiplier or not; skipping
        # rows would break the exact-divisibility invariant.
        for i in range(rank + 1, nr):
            ri = M[i]
            f = ri[col]
            for j in range(col, nc):
                ri[j] = (ri[j] * p - f * pr[j]) // prev
        prev = p
        rank += 1
        col += 1
    return rank


def rational_rank(M: RatMat) -> int:
    """Exact rank of a rational matrix."""
    if not isinstance(M, RatMat):
        raise InputError("rational_rank expects a RatMat")
    if M.rows == 0 or M.cols == 0:
        return 0
    return int_rank(M.to_int_rows())


def binary_matrix_is_singular(M) -> bool:
    """Exact singularity test for a square 0/1 matrix.

    Bareiss over int64 is exact here: intermediate entries are minors of a
    0/1 matrix, bounded by Hadamard's inequality (< 3e6 for d <= 12), so the
    int64 products never overflow.  Larger matrices fall back to Python ints.
    """
    A = np.asarray(M)
    d = A.shape[0]
    if A.ndim != 2 or A.shape[1] != d:
        raise InputError("expected a square matrix")
    if not np.all((A == 0) | (A == 1)):
        raise InputError("expected 0/1 entries")
    if d == 0:
        return False
    if d > 12:
        return int_rank(A.astype(object).tolist()) < d
    W = A.astype(np.int64).copy()
    prev = np.int64(1)
    for k in range(d - 1):
        nz = np.nonzero(W[k:, k])[0]
        if nz.size == 0:
            return True
        piv = k + int(nz[0])
        if piv != k:
            W[[k, piv]] = W[[piv, k]]
        p = W[k, k]
        W[k + 1 :, :] = (W[k + 1 :, :] * p - np.outer(W[k + 1 :, k], W[k, :])) // prev
        prev = p
    return bool(W[d - 1, d - 1] == 0)
