"""
Assembly of finite element systems

Stiffness and mass matrices, right-hand sides for measure data and for
square-integrable data, and symmetric elimination of homogeneous Dirichlet
conditions. Element contributions are computed for blocks of cells at once
and summed into `CsrMatrix` storage.
"""

import logging

import numpy as np

from measfem.errors import DegenerateCellError, MeasureLocationError
from measfem.fespace import basis_gradients, eval_basis
from measfem.mesh import locate_points
from measfem.quadrature import MAX_DEGREE, line_rule, quadrature_for
from measfem.sparse import CsrMatrix
from measfem.utils import chunks, timed

__all__ = ['CoefficientField', 'assemble_stiffness', 'assemble_mass',
           'assemble_measure_rhs', 'assemble_l2_rhs', 'apply_dirichlet',
           'eliminate', 'CELL_BLOCK']

logger = logging.getLogger(__name__)

# cells per assembly block
CELL_BLOCK = 50000

# Gauss points per polyline segment
LINE_ORDER = 4


class CoefficientField(object):
    def __init__(self, evaluator, lam_min, lam_max, dim=None):
        """
        A symmetric, uniformly elliptic diffusion coefficient ``A(x)``.

        Parameters
        ----------
        evaluator : array_like or callable
            Either a constant ``(dim, dim)`` matrix, or a vectorized function
            mapping coordinates ``(n, dim)`` to matrices ``(n, dim, dim)``.

        lam_min, lam_max : float
            Declared ellipticity bounds, ``0 < lam_min <= lam_max``.

        dim : int, optional
            Spatial dimension; inferred for constant coefficients.
        """
        if not 0 < lam_min <= lam_max:
            raise ValueError('ellipticity bounds must satisfy 0 < lam_min <= lam_max')
        self.lam_min = float(lam_min)
        self.lam_max = float(lam_max)
        if callable(evaluator):
            self.matrix = None
            self._func = evaluator
            self.dim = dim
        else:
            matrix = np.array(evaluator, dtype=float)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise ValueError('a constant coefficient must be a square matrix')
            if not np.allclose(matrix, matrix.T, rtol=0, atol=1e-14 * np.abs(matrix).max()):
                raise ValueError('coefficient matrix must be symmetric')
            matrix.setflags(write=False)
            self.matrix = matrix
            self._func = None
            self.dim = matrix.shape[0]

    @classmethod
    def identity(cls, dim):
        """``A = I``, i.e. the operator ``-Laplace``"""
        return cls(np.eye(dim), 1.0, 1.0)

    @classmethod
    def constant(cls, matrix):
        matrix = np.asarray(matrix, dtype=float)
        eig = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
        if eig[0] <= 0:
            raise ValueError('coefficient matrix must be positive definite')
        return cls(matrix, eig[0], eig[-1])

    @property
    def is_constant(self):
        return self.matrix is not None

    def __call__(self, points):
        """Coefficient values at ``(n, dim)`` points, shaped ``(n, dim, dim)``"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_constant:
            return np.broadcast_to(self.matrix, (points.shape[0],) + self.matrix.shape)
        values = np.asarray(self._func(points), dtype=float)
        d = points.shape[1]
        assert values.shape == (points.shape[0], d, d), \
            "coefficient evaluator returned shape {0}".format(values.shape)
        return values

    def check_ellipticity(self, points, rtol=1e-10):
        """
        Verifies symmetry and the declared eigenvalue bounds at the given points.

        Raises
        ------
        ValueError
            If a value is not symmetric or has eigenvalues outside
            ``[lam_min, lam_max]``.
        """
        values = self(points)
        scale = max(self.lam_max, 1.0)
        if np.abs(values - values.transpose(0, 2, 1)).max() > rtol * scale:
            raise ValueError('coefficient is not symmetric')
        eig = np.linalg.eigvalsh(values)
        if eig.min() < self.lam_min * (1 - rtol) or eig.max() > self.lam_max * (1 + rtol):
            raise ValueError('coefficient eigenvalues [{0:.3g}, {1:.3g}] leave the declared '
                             'bounds [{2:.3g}, {3:.3g}]'.format(eig.min(), eig.max(),
                                                              self.lam_min, self.lam_max))

    def __repr__(self):
        kind = 'constant' if self.is_constant else 'variable'
        return '<CoefficientField {0}, bounds [{1:g}, {2:g}]>'.format(
            kind, self.lam_min, self.lam_max)


def _check_cells(mesh, cells):
    vol = mesh.volumes[cells]
    small = vol <= 1e-14 * mesh.diameters[cells] ** mesh.dim
    if np.any(small):
        bad = cells[np.flatnonzero(small)[0]]
        raise DegenerateCellError(bad, mesh.volumes[bad])


def _element_triplets(space, cells, local):
    dofs = space.cell_dofs[cells]
    nloc = dofs.shape[1]
    rows = np.repeat(dofs, nloc, axis=1)
    cols = np.tile(dofs, (1, nloc))
    return rows.ravel(), cols.ravel(), local.reshape(-1)


def _sum_triplets(parts, n):
    """One matrix from per-block triplets; summed zeros stay in the pattern."""
    rows, cols, values = (np.concatenate(p) for p in zip(*parts))
    return CsrMatrix.from_triplets(rows, cols, values, n)


def _stiffness_degree(k, A):
    if A.is_constant:
        return max(2 * (k - 1), 1)
    return min(max(2 * (k - 1), k + 2), MAX_DEGREE)


@timed
def assemble_stiffness(V, A):
    """
    Stiffness matrix ``K_ij = int A grad(phi_j) . grad(phi_i)``.

    Parameters
    ----------
    V : FESpace

    A : CoefficientField

    Returns
    -------
    K : CsrMatrix
        The full symmetric matrix, before any boundary elimination.

    Raises
    ------
    DegenerateCellError
        If a cell has (numerically) zero volume.
    """
    mesh = V.mesh
    if A.dim is not None and A.dim != mesh.dim:
        raise ValueError('coefficient is {0:d}D, mesh is {1:d}D'.format(A.dim, mesh.dim))
    _check_cells(mesh, np.arange(mesh.n_cells))
    rule = quadrature_for(mesh.dim, _stiffness_degree(V.degree, A))
    parts = []
    for block in chunks(mesh.n_cells, CELL_BLOCK):
        cells = np.arange(block.start, block.stop)
        grads = basis_gradients(V, rule, cells)                 # (nc, nq, nloc, d)
        if A.is_constant:
            local = np.einsum('q,cqld,de,cqme->clm', rule.weights, grads, A.matrix, grads,
                              optimize=True)
        else:
            xq = np.einsum('qm,cmd->cqd', rule.points, mesh.vertices[mesh.cells[cells]])
            coef = A(xq.reshape(-1, mesh.dim)).reshape(xq.shape + (mesh.dim,))
            local = np.einsum('q,cqld,cqde,cqme->clm', rule.weights, grads, coef, grads,
                              optimize=True)
        local *= mesh.volumes[cells][:, None, None]
        parts.append(_element_triplets(V, cells, local))
    total = _sum_triplets(parts, V.n_dofs)
    logger.debug('stiffness P%d: n=%d, nnz=%d, %d-point rule',
                 V.degree, total.n, total.nnz, len(rule))
    return total


@timed
def assemble_mass(V):
    """
    Mass matrix ``M_ij = int phi_j phi_i``, with quadrature exact for degree 2k.

    Returns
    -------
    M : CsrMatrix
        Symmetric positive definite.
    """
    mesh = V.mesh
    rule = quadrature_for(mesh.dim, 2 * V.degree)
    phi, _ = eval_basis(V.degree, mesh.dim, rule.points)       # (nq, nloc)
    reference = np.einsum('q,ql,qm->lm', rule.weights, phi, phi)
    _check_cells(mesh, np.arange(mesh.n_cells))
    parts = []
    for block in chunks(mesh.n_cells, CELL_BLOCK):
        cells = np.arange(block.start, block.stop)
        local = mesh.volumes[cells][:, None, None] * reference[None, :, :]
        parts.append(_element_triplets(V, cells, local))
    total = _sum_triplets(parts, V.n_dofs)
    logger.debug('mass P%d: n=%d, nnz=%d', V.degree, total.n, total.nnz)
    return total


def _scatter(V, points, weights, atom, what):
    """Adds ``weights * phi_i(points)`` into a load vector."""
    cells, bary = locate_points(V.mesh, points)
    missing = np.flatnonzero(cells < 0)
    if missing.size:
        bad = points[missing[0]]
        raise MeasureLocationError(atom, '{0} {1} lies outside the mesh'.format(
            what, tuple(bad.tolist())))
    phi, _ = eval_basis(V.degree, V.dim, bary)
    return np.bincount(V.cell_dofs[cells].ravel(),
                       weights=(weights[:, None] * phi).ravel(), minlength=V.n_dofs)


def assemble_measure_rhs(V, mu):
    """
    Load vector ``b_i = int phi_i dmu`` of a measure.

    Point atoms contribute ``w * phi_i(x0)``. Curve atoms are integrated
    segment by segment with a 4-point Gauss rule, the segment length taken
    from the polyline chord.

    Parameters
    ----------
    V : FESpace

    mu : MeasureData

    Returns
    -------
    b : ndarray
        Shaped ``(V.n_dofs,)``.

    Raises
    ------
    MeasureLocationError
        If an atom or a curve quadrature point is outside the mesh.
    """
    b = np.zeros(V.n_dofs)
    for atom in mu.point_atoms:
        if atom.dim != V.dim:
            raise MeasureLocationError(atom, 'atom is {0:d}D, mesh is {1:d}D'.format(
                atom.dim, V.dim))
        b += _scatter(V, atom.position[None, :], np.array([atom.weight]), atom, 'position')

    s, gw = line_rule(LINE_ORDER)
    for atom in mu.curve_atoms:
        if atom.dim != V.dim:
            raise MeasureLocationError(atom, 'atom is {0:d}D, mesh is {1:d}D'.format(
                atom.dim, V.dim))
        start, stop = atom.points[:-1], atom.points[1:]
        chord = np.linalg.norm(stop - start, axis=1)
        qpts = start[:, None, :] + s[None, :, None] * (stop - start)[:, None, :]
        qw = atom.weight * chord[:, None] * gw[None, :]
        b += _scatter(V, qpts.reshape(-1, V.dim), qw.ravel(), atom, 'quadrature point')
    logger.debug('measure rhs: %d point atoms, %d curve atoms, sum %.15g',
                 len(mu.point_atoms), len(mu.curve_atoms), b.sum())
    return b


def assemble_l2_rhs(V, f):
    """
    Load vector ``b_i = int f phi_i`` of a square-integrable function.

    Parameters
    ----------
    V : FESpace

    f : callable or float
        Vectorized function of ``(n, dim)`` coordinates, or a constant.

    Returns
    -------
    b : ndarray
    """
    mesh = V.mesh
    rule = quadrature_for(mesh.dim, min(2 * V.degree, MAX_DEGREE))
    phi, _ = eval_basis(V.degree, mesh.dim, rule.points)
    b = np.zeros(V.n_dofs)
    for block in chunks(mesh.n_cells, CELL_BLOCK):
        cells = np.arange(block.start, block.stop)
        xq = np.einsum('qm,cmd->cqd', rule.points, mesh.vertices[mesh.cells[cells]])
        if callable(f):
            fq = np.asarray(f(xq.reshape(-1, mesh.dim)), dtype=float).reshape(xq.shape[:2])
        else:
            fq = np.full(xq.shape[:2], float(f))
        local = np.einsum('q,cq,ql->cl', rule.weights, fq, phi)
        local *= mesh.volumes[cells][:, None]
        b += np.bincount(V.cell_dofs[cells].ravel(), weights=local.ravel(), minlength=V.n_dofs)
    return b


def eliminate(K, mask):
    """``D K D + diag(mask)`` with ``D = diag(~mask)``, keeping the sparsity pattern of ``K``"""
    mask = np.asarray(mask, dtype=bool)
    assert mask.shape == (K.n,), "mask length must match the matrix"
    coo = K.matrix.tocoo()
    keep = (~mask).astype(float)
    fixed = np.flatnonzero(mask)
    return CsrMatrix.from_triplets(np.concatenate((coo.row, fixed)),
                                   np.concatenate((coo.col, fixed)),
                                   np.concatenate((coo.data * keep[coo.row] * keep[coo.col],
                                                   np.ones(fixed.size))), K.n)


def apply_dirichlet(K, b, mask):
    """
    Symmetric elimination of homogeneous Dirichlet conditions.

    Rows and columns of masked DOFs are zeroed, their diagonal set to 1 and
    their right-hand side entries to 0.

    Parameters
    ----------
    K : CsrMatrix

    b : array_like

    mask : array_like
        Boolean, True for constrained DOFs.

    Returns
    -------
    K : CsrMatrix

    b : ndarray
        A copy with the masked entries zeroed.
    """
    b = np.array(b, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    assert b.shape == mask.shape, "rhs and mask lengths differ"
    b[mask] = 0.0
    return eliminate(K, mask), b
