"""
Tests for the sparse module
"""
import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp

from measfem.sparse import CsrMatrix, cg_solve, default_max_iter, spmv, write_matrix_market


def random_spd(n, seed=0, density=0.1):
    """A random sparse symmetric positive definite matrix."""
    rng = np.random.RandomState(seed)
    B = sp.random(n, n, density=density, random_state=rng)
    return CsrMatrix(B + B.T + n * sp.identity(n))


def test_from_triplets_sums_duplicates():
    A = CsrMatrix.from_triplets([0, 0, 1, 0], [0, 1, 1, 0], [1.0, 2.0, 3.0, 4.0], 2)
    assert np.array_equal(A.toarray(), [[5.0, 2.0], [0.0, 3.0]])
    assert A.nnz == 3
    assert np.all(np.diff(A.row_offsets) == [2, 1])
    assert not A.is_structurally_symmetric()
    assert np.isclose(A.asymmetry(), 2.0 / 5.0)


def test_matrix_must_be_square():
    with pytest.raises(ValueError):
        CsrMatrix(np.ones((2, 3)))


def test_spmv():
    np.random.seed(0)
    dense = np.random.randn(6, 6)
    A = CsrMatrix(dense)
    x = np.random.randn(6)
    assert np.allclose(spmv(A, x), dense.dot(x))
    assert np.allclose(A @ x, dense.dot(x))
    with pytest.raises(AssertionError):
        spmv(A, np.ones(5))


def test_arithmetic():
    A = CsrMatrix.identity(3)
    B = 2 * A + A * 0.5
    assert np.allclose(B.diagonal(), 2.5)
    assert B.max_abs() == 2.5
    assert CsrMatrix(sp.csr_matrix((3, 3))).max_abs() == 0.0
    assert B.is_structurally_symmetric() and B.asymmetry() == 0.0


def test_cg_random_spd():
    A = random_spd(200)
    np.random.seed(1)
    b = np.random.randn(200)
    x, stats = cg_solve(A, b, tol=1e-12)
    assert stats.converged
    assert stats.final_relative_residual <= 1e-12
    assert np.linalg.norm(b - A @ x) <= 1e-12 * np.linalg.norm(b)
    assert np.allclose(x, np.linalg.solve(A.toarray(), b))


def test_cg_is_deterministic():
    A = random_spd(150, seed=3)
    b = np.arange(150, dtype=float)
    x1, s1 = cg_solve(A, b)
    x2, s2 = cg_solve(A, b)
    assert np.array_equal(x1, x2)
    assert s1.iterations == s2.iterations


def test_cg_zero_rhs():
    x, stats = cg_solve(random_spd(20), np.zeros(20))
    assert np.array_equal(x, np.zeros(20))
    assert stats.iterations == 0 and stats.converged


def test_cg_diagonal_in_one_iteration():
    # Jacobi preconditioning inverts a diagonal matrix exactly
    A = CsrMatrix(sp.diags(np.arange(1.0, 11.0)))
    b = np.ones(10)
    x, stats = cg_solve(A, b)
    assert stats.iterations == 1
    assert np.allclose(x, 1.0 / np.arange(1.0, 11.0))


def test_cg_reports_non_convergence():
    A = random_spd(100, seed=2, density=0.3)
    b = np.ones(100)
    x, stats = cg_solve(A, b, tol=1e-14, max_iter=2)
    assert stats.iterations == 2
    assert not stats.converged
    assert stats.final_relative_residual > 1e-14
    assert 'converged=False' in repr(stats)


def test_cg_stops_when_residual_stagnates():
    # no floating point solve reaches 1e-20, the true residual levels off near 1e-16
    A = random_spd(200)
    np.random.seed(4)
    b = np.random.randn(200)
    x, stats = cg_solve(A, b, tol=1e-20, max_iter=100000)
    assert not stats.converged
    assert stats.iterations < 1000
    assert stats.final_relative_residual < 1e-13
    assert np.allclose(x, np.linalg.solve(A.toarray(), b))


def test_default_max_iter():
    assert default_max_iter(10000) == 6000
    assert default_max_iter(0) == 1000


def test_matrix_market(tmpdir):
    A = random_spd(30, seed=4)
    path = str(tmpdir.join('A.mtx'))
    write_matrix_market(A, path, comment='stiffness')
    back = scipy.io.mmread(path)
    assert np.allclose(back.toarray(), A.toarray())
