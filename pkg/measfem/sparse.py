"""
Symmetric sparse linear algebra

`CsrMatrix` wraps a ``scipy.sparse.csr_matrix`` with sorted column indices;
`cg_solve` is a Jacobi-preconditioned conjugate gradient method with a zero
initial guess whose result and iteration count are fully deterministic.
"""

import logging

import numpy as np
import scipy.io
import scipy.sparse as sp

__all__ = ['CsrMatrix', 'SolveStats', 'spmv', 'cg_solve', 'default_max_iter',
           'write_matrix_market', 'MAX_FAILED_CHECKS']

logger = logging.getLogger(__name__)

# true-residual confirmations that may fail before cg gives up
MAX_FAILED_CHECKS = 10


class CsrMatrix(object):
    def __init__(self, matrix):
        """
        A square sparse matrix in compressed sparse row storage.

        Parameters
        ----------
        matrix : scipy.sparse matrix or array_like
            Converted to CSR with sorted, duplicate-free column indices.
        """
        csr = sp.csr_matrix(matrix, dtype=float)
        if csr.shape[0] != csr.shape[1]:
            raise ValueError('matrix must be square, got shape {0}'.format(csr.shape))
        csr.sum_duplicates()
        csr.sort_indices()
        self.matrix = csr

    @classmethod
    def from_triplets(cls, rows, cols, values, n):
        """Sums ``(row, col, value)`` triplets into an ``n x n`` matrix."""
        coo = sp.coo_matrix((np.ravel(values), (np.ravel(rows), np.ravel(cols))), shape=(n, n))
        return cls(coo.tocsr())

    @classmethod
    def identity(cls, n):
        return cls(sp.identity(n, format='csr'))

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def row_offsets(self):
        return self.matrix.indptr

    @property
    def col_indices(self):
        return self.matrix.indices

    @property
    def values(self):
        return self.matrix.data

    @property
    def nnz(self):
        return self.matrix.nnz

    def diagonal(self):
        return self.matrix.diagonal()

    def max_abs(self):
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def __add__(self, other):
        return CsrMatrix(self.matrix + other.matrix)

    def __mul__(self, scalar):
        return CsrMatrix(self.matrix * float(scalar))

    __rmul__ = __mul__

    def __matmul__(self, x):
        return spmv(self, x)

    def toarray(self):
        return self.matrix.toarray()

    def is_structurally_symmetric(self):
        pattern = self.matrix.copy()
        pattern.data = np.ones_like(pattern.data)
        return (pattern - pattern.T).count_nonzero() == 0

    def asymmetry(self):
        """``max |a_ij - a_ji| / max |a|``"""
        scale = self.max_abs()
        if scale == 0:
            return 0.0
        diff = (self.matrix - self.matrix.T).tocsr()
        return float(np.abs(diff.data).max() / scale) if diff.nnz else 0.0

    def __repr__(self):
        return '<CsrMatrix n={0:d} nnz={1:d}>'.format(self.n, self.nnz)


class SolveStats(object):
    def __init__(self, iterations, final_relative_residual, tol):
        self.iterations = int(iterations)
        self.final_relative_residual = float(final_relative_residual)
        self.tol = float(tol)

    @property
    def converged(self):
        return self.final_relative_residual <= self.tol

    def __repr__(self):
        return 'SolveStats(iterations={0:d}, final_relative_residual={1:.3e}, ' \
               'converged={2})'.format(self.iterations, self.final_relative_residual,
                                       self.converged)


def spmv(A, x):
    """
    Sparse matrix-vector product ``A @ x``.

    Parameters
    ----------
    A : CsrMatrix

    x : array_like
        Vector of length ``A.n``.
    """
    x = np.asarray(x, dtype=float)
    assert x.shape == (A.n,), "dimension mismatch: {0} vs n={1:d}".format(x.shape, A.n)
    return A.matrix.dot(x)


def default_max_iter(n):
    return int(50 * np.sqrt(n) + 1000)


def cg_solve(A, b, tol=1e-12, max_iter=None):
    """
    Jacobi-preconditioned conjugate gradients from a zero initial guess.

    Parameters
    ----------
    A : CsrMatrix
        Symmetric positive definite matrix with a positive diagonal.

    b : array_like
        Right-hand side.

    tol : float, optional
        Target relative residual ``|b - A x| / |b|`` (Default: 1e-12).

    max_iter : int, optional
        Iteration cap (Default: ``50 sqrt(n) + 1000``).

    Returns
    -------
    x : ndarray
        The approximate solution.

    stats : SolveStats
        Iteration count and the final relative residual, computed from the
        true residual ``b - A x``. ``stats.converged`` is False when the cap
        was hit; callers decide whether that is fatal.

    Notes
    -----
    Convergence is tested on the recursively updated residual and then
    confirmed on the true residual; if the two disagree the residual is
    reset and the iteration restarts from it. After ``MAX_FAILED_CHECKS`` failed
    confirmations the true residual is taken to have stagnated at rounding
    level and the solve stops unconverged.
    """
    b = np.asarray(b, dtype=float)
    assert b.shape == (A.n,), "dimension mismatch: {0} vs n={1:d}".format(b.shape, A.n)
    if max_iter is None:
        max_iter = default_max_iter(A.n)

    x = np.zeros(A.n)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, SolveStats(0, 0.0, tol)

    diag = A.diagonal()
    assert np.all(diag > 0), "Jacobi preconditioning needs a positive diagonal"
    inv_diag = 1.0 / diag

    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = r.dot(z)
    threshold = tol * bnorm
    relres = 1.0
    iterations = 0
    failed_checks = 0
    while iterations < max_iter:
        Ap = A.matrix.dot(p)
        alpha = rz / p.dot(Ap)
        x += alpha * p
        r -= alpha * Ap
        iterations += 1

        rnorm = np.linalg.norm(r)
        if iterations % 100 == 0:
            logger.debug('cg iteration %d: relative residual %.3e', iterations, rnorm / bnorm)
        if rnorm <= threshold:
            r = b - A.matrix.dot(x)
            relres = np.linalg.norm(r) / bnorm
            if relres <= tol:
                break
            failed_checks += 1
            if failed_checks >= MAX_FAILED_CHECKS:
                logger.info('cg residual stagnates at %.3e after %d iterations',
                            relres, iterations)
                break
            # restart from the true residual
            z = inv_diag * r
            rz = r.dot(z)
            p = z.copy()
            continue
        z = inv_diag * r
        rz_new = r.dot(z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    else:
        relres = np.linalg.norm(b - A.matrix.dot(x)) / bnorm

    stats = SolveStats(iterations, relres, tol)
    if not stats.converged:
        logger.warning('cg stopped after %d iterations at relative residual %.3e (tol %.1e)',
                       iterations, relres, tol)
    return x, stats


def write_matrix_market(A, path, comment=''):
    """Dumps a matrix in Matrix Market coordinate format."""
    scipy.io.mmwrite(path, A.matrix, comment=comment)
