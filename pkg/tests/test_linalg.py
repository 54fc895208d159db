import numpy as np
import pytest

from reluregions import (
    RatMat,
    Tol,
    embed_ones,
    khatri_rao,
    least_squares_min_norm,
    mat_rank,
    normalize_rows,
    nullspace_basis,
    rational_rank,
)
from reluregions.errors import InputError


def test_mat_rank_identity():
    assert mat_rank(np.eye(3)) == 3


def test_mat_rank_proportional_rows():
    assert mat_rank([[1.0, 2.0], [2.0, 4.0]]) == 1


def test_mat_rank_zero_matrix():
    assert mat_rank(np.zeros((4, 6))) == 0


def test_mat_rank_matches_exact_oracle_on_integers():
    rng = np.random.default_rng(11)
    M = rng.integers(-3, 4, size=(5, 7))
    assert mat_rank(M.astype(float)) == rational_rank(RatMat.from_rows(M.tolist()))


def test_mat_rank_exact_oracle_agreement_bulk():
    # 1000 random 6x8 integer matrices with entries in {-5..5}.
    rng = np.random.default_rng(7)
    for _ in range(1000):
        M = rng.integers(-5, 6, size=(6, 8))
        assert mat_rank(M.astype(float)) == rational_rank(RatMat.from_rows(M.tolist()))


def test_mat_rank_rejects_non_finite():
    with pytest.raises(InputError):
        mat_rank([[np.nan, 1.0]])


def test_nullspace_identity_empty():
    assert nullspace_basis(np.eye(4)).shape == (4, 0)


def test_nullspace_single_row():
    N = nullspace_basis([[1.0, 1.0]])
    assert N.shape == (2, 1)
    direction = N[:, 0] * np.sign(N[0, 0])
    assert np.allclose(direction, np.array([1.0, -1.0]) / np.sqrt(2.0))


def test_rank_nullity_on_constructed_ranks():
    rng = np.random.default_rng(3)
    for _ in range(50):
        rows = rng.integers(2, 7)
        cols = rng.integers(2, 9)
        r = int(rng.integers(0, min(rows, cols) + 1))
        M = rng.standard_normal((rows, r)) @ rng.standard_normal((r, cols)) if r else np.zeros((rows, cols))
        assert mat_rank(M) == r
        assert nullspace_basis(M).shape[1] == cols - r
        N = nullspace_basis(M)
        if N.shape[1]:
            assert np.allclose(M @ N, 0.0, atol=1e-9)
            assert np.allclose(N.T @ N, np.eye(N.shape[1]), atol=1e-10)


def test_least_squares_identity():
    y = np.array([2.0, -1.0, 0.5])
    x, res = least_squares_min_norm(np.eye(3), y)
    assert np.allclose(x, y)
    assert res <= 1e-12


def test_least_squares_single_column():
    x, res = least_squares_min_norm([[1.0], [1.0]], [0.0, 2.0])
    assert np.allclose(x, [1.0])
    assert res == pytest.approx(np.sqrt(2.0), rel=1e-12)


def test_least_squares_consistent_overdetermined():
    rng = np.random.default_rng(5)
    M = rng.standard_normal((8, 3))
    sol = rng.standard_normal(3)
    y = M @ sol
    x, res = least_squares_min_norm(M, y)
    assert res <= 1e-8 * np.linalg.norm(y)
    assert np.allclose(x, sol, atol=1e-8)


def test_least_squares_min_norm_property():
    # Underdetermined: returned solution is orthogonal to the kernel.
    rng = np.random.default_rng(9)
    M = rng.standard_normal((2, 5))
    y = rng.standard_normal(2)
    x, _ = least_squares_min_norm(M, y)
    N = nullspace_basis(M)
    assert np.allclose(N.T @ x, 0.0, atol=1e-10)


def test_least_squares_length_mismatch():
    with pytest.raises(InputError):
        least_squares_min_norm(np.eye(2), [1.0, 2.0, 3.0])


def test_khatri_rao_ones_row_recovers_x():
    X = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    assert np.array_equal(khatri_rao(np.ones((1, 3)), X), X)


def test_khatri_rao_identity_pattern():
    out = khatri_rao(np.eye(2), [[3.0, 5.0]])
    assert np.array_equal(out, [[3.0, 0.0], [0.0, 5.0]])


def test_khatri_rao_rank_inherits_independence():
    rng = np.random.default_rng(2)
    d1, d0, n = 3, 6, 4
    X = rng.standard_normal((d0, n))
    assert mat_rank(khatri_rao(np.ones((d1, n)), X)) == n


def test_khatri_rao_columns_exact():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((3, 5))
    X = rng.standard_normal((2, 5))
    out = khatri_rao(A, X)
    for j in range(5):
        assert np.array_equal(out[:, j], np.kron(A[:, j], X[:, j]))


def test_khatri_rao_column_mismatch():
    with pytest.raises(InputError):
        khatri_rao(np.ones((2, 3)), np.ones((2, 4)))


def test_tol_validation():
    with pytest.raises(InputError):
        Tol(rank_tol=0.0)
    with pytest.raises(InputError):
        Tol(lp_tol=1.5)


def test_embed_ones():
    out = embed_ones([[1.0, 2.0]])
    assert np.array_equal(out, [[1.0, 2.0], [1.0, 1.0]])


def test_normalize_rows_keeps_zero_rows():
    out = normalize_rows([[3.0, 4.0], [0.0, 0.0]])
    assert np.allclose(out[0], [0.6, 0.8])
    assert np.array_equal(out[1], [0.0, 0.0])
