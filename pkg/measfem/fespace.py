"""
Lagrange finite element spaces of degree 1, 2 and 3 on simplices

Local shape functions are written in barycentric coordinates. Global
degrees of freedom are numbered vertices first, then edge nodes in sorted
edge order (two per edge for cubics, ordered from the lower to the higher
global vertex index), then face nodes (3D cubics) or cell-interior nodes
(2D cubics).
"""

import logging

import numpy as np

from measfem.mesh import LOCAL_EDGES, LOCAL_FACES, locate_points
from measfem.utils import lookup_rows

__all__ = ['FESpace', 'FEFunction', 'build_space', 'lagrange_nodes', 'eval_basis',
           'evaluate', 'evaluate_points', 'evaluate_gradient', 'interpolate', 'basis_gradients',
           'cell_gradients',
           'write_function', 'read_function', 'DEGREES']

logger = logging.getLogger(__name__)

DEGREES = (1, 2, 3)


def _check_degree(k):
    if k not in DEGREES:
        raise ValueError('degree must be one of {0}, got {1!r}'.format(DEGREES, k))
    return int(k)


def lagrange_nodes(k, dim):
    """
    Barycentric coordinates of the local Lagrange nodes, in local DOF order.

    Returns
    -------
    nodes : ndarray
        Shaped ``(nloc, dim + 1)``.
    """
    k = _check_degree(k)
    nodes = [row for row in np.eye(dim + 1)]
    for i, j in LOCAL_EDGES[dim]:
        for t in range(1, k):
            node = np.zeros(dim + 1)
            node[i], node[j] = (k - t) / float(k), t / float(k)
            nodes.append(node)
    if k == 3:
        for face in LOCAL_FACES[dim]:
            node = np.zeros(dim + 1)
            node[face] = 1.0 / 3.0
            nodes.append(node)
    return np.array(nodes)


def eval_basis(k, dim, bary):
    """
    Local shape functions and their derivatives in barycentric coordinates.

    Parameters
    ----------
    k : int
        Polynomial degree (1, 2 or 3).

    dim : int
        2 or 3.

    bary : array_like
        A barycentric tuple ``(dim + 1,)`` or many of them ``(n, dim + 1)``.

    Returns
    -------
    values : ndarray
        Shape function values, ``(nloc,)`` or ``(n, nloc)``.

    gradients : ndarray
        Partial derivatives with respect to each barycentric coordinate,
        ``(nloc, dim + 1)`` or ``(n, nloc, dim + 1)``. Cartesian gradients
        follow by contracting with the gradients of the barycentric
        coordinates.

    Notes
    -----
    With ``L`` the barycentric coordinates the shape functions are

    - k=1: ``L_i``
    - k=2: ``L_i (2 L_i - 1)`` at vertices, ``4 L_i L_j`` at edge midpoints
    - k=3: ``L_i (3 L_i - 1)(3 L_i - 2) / 2`` at vertices,
      ``9/2 L_i L_j (3 L_i - 1)`` at the edge node nearer vertex ``i``,
      ``27 L_i L_j L_l`` at face centroids.
    """
    k = _check_degree(k)
    L = np.asarray(bary, dtype=float)
    single = L.ndim == 1
    L = np.atleast_2d(L)
    if L.shape[1] != dim + 1:
        raise ValueError('bary must have {0:d} components'.format(dim + 1))
    n = L.shape[0]
    edges = LOCAL_EDGES[dim]

    values, grads = [], []

    def grad_of(*pairs):
        g = np.zeros((n, dim + 1))
        for index, value in pairs:
            g[:, index] += value
        return g

    for i in range(dim + 1):
        li = L[:, i]
        if k == 1:
            values.append(li)
            grads.append(grad_of((i, 1.0)))
        elif k == 2:
            values.append(li * (2 * li - 1))
            grads.append(grad_of((i, 4 * li - 1)))
        else:
            values.append(0.5 * li * (3 * li - 1) * (3 * li - 2))
            grads.append(grad_of((i, 0.5 * (27 * li ** 2 - 18 * li + 2))))

    for i, j in edges:
        li, lj = L[:, i], L[:, j]
        if k == 2:
            values.append(4 * li * lj)
            grads.append(grad_of((i, 4 * lj), (j, 4 * li)))
        elif k == 3:
            values.append(4.5 * li * lj * (3 * li - 1))
            grads.append(grad_of((i, 4.5 * (6 * li * lj - lj)), (j, 4.5 * (3 * li ** 2 - li))))
            values.append(4.5 * li * lj * (3 * lj - 1))
            grads.append(grad_of((i, 4.5 * (3 * lj ** 2 - lj)), (j, 4.5 * (6 * li * lj - li))))

    if k == 3:
        for a, b, c in LOCAL_FACES[dim]:
            la, lb, lc = L[:, a], L[:, b], L[:, c]
            values.append(27 * la * lb * lc)
            grads.append(grad_of((a, 27 * lb * lc), (b, 27 * la * lc), (c, 27 * la * lb)))

    values = np.stack(values, axis=1)
    grads = np.stack(grads, axis=1)
    if single:
        return values[0], grads[0]
    return values, grads


class FESpace(object):
    def __init__(self, mesh, degree):
        """
        Continuous piecewise polynomials of a given degree on a mesh.

        Parameters
        ----------
        mesh : SimplicialMesh

        degree : int
            1, 2 or 3.

        Attributes
        ----------
        n_dofs : int
            Number of global degrees of freedom.

        cell_dofs : ndarray
            Global DOF index of each local node, ``(nc, nloc)``.

        dof_coords : ndarray
            Node coordinates, ``(n_dofs, dim)``.

        boundary_mask : ndarray
            True for DOFs whose node lies on a boundary facet.
        """
        k = _check_degree(degree)
        self.mesh = mesh
        self.degree = k
        self.dim = mesh.dim
        nv, nc, dim = mesh.n_vertices, mesh.n_cells, mesh.dim

        blocks = [mesh.cells]
        ne = mesh.edges.shape[0] if k > 1 else 0
        if k > 1:
            loc = LOCAL_EDGES[dim]
            lower = mesh.cells[:, loc[:, 0]] < mesh.cells[:, loc[:, 1]]
            base = nv + mesh.cell_edges * (k - 1)
            per_edge = []
            for t in range(1, k):
                position = np.where(lower, t, k - t)
                per_edge.append(base + position - 1)
            blocks.append(np.stack(per_edge, axis=2).reshape(nc, -1))
        n_inner = 0
        if k == 3:
            if dim == 2:
                blocks.append(nv + 2 * ne + np.arange(nc)[:, None])
                n_inner = nc
            else:
                blocks.append(nv + 2 * ne + mesh.cell_faces)
                n_inner = mesh.faces.shape[0]

        self.cell_dofs = np.concatenate(blocks, axis=1)
        self.n_dofs = int(nv + (k - 1) * ne + n_inner)
        self.nodes = lagrange_nodes(k, dim)

        coords = np.empty((self.n_dofs, dim))
        local = np.einsum('lm,cmd->cld', self.nodes, mesh.vertices[mesh.cells])
        coords[self.cell_dofs.ravel()] = local.reshape(-1, dim)
        self.dof_coords = coords

        self.boundary_mask = self._boundary_mask(ne)
        for arr in (self.cell_dofs, self.dof_coords, self.boundary_mask, self.nodes):
            arr.setflags(write=False)
        logger.debug('P%d space on %s: %d dofs (%d on the boundary)',
                     k, mesh.name, self.n_dofs, int(self.boundary_mask.sum()))

    def _boundary_mask(self, ne):
        mesh, k = self.mesh, self.degree
        nv = mesh.n_vertices
        facets = mesh.boundary_facets
        mask = np.zeros(self.n_dofs, dtype=bool)
        mask[facets.ravel()] = True
        if facets.shape[0] == 0:
            return mask
        if k > 1:
            if mesh.dim == 2:
                edges = facets
            else:
                edges = np.sort(facets[:, LOCAL_EDGES[2]], axis=2).reshape(-1, 2)
            index = lookup_rows(mesh.edges, edges)
            for t in range(k - 1):
                mask[nv + index * (k - 1) + t] = True
        if k == 3 and mesh.dim == 3:
            mask[nv + 2 * ne + lookup_rows(mesh.faces, facets)] = True
        return mask

    @property
    def n_local(self):
        return self.cell_dofs.shape[1]

    def __repr__(self):
        return '<FESpace P{0:d} on {1}: {2:d} dofs>'.format(self.degree, self.mesh, self.n_dofs)


def build_space(mesh, k):
    """Builds the degree-``k`` Lagrange space on ``mesh`` (see `FESpace`)"""
    return FESpace(mesh, k)


class FEFunction(object):
    def __init__(self, space, coefficients=None):
        """
        A finite element function: a space plus a coefficient vector.

        Parameters
        ----------
        space : FESpace

        coefficients : array_like, optional
            Nodal values, length ``space.n_dofs`` (Default: zeros).
        """
        self.space = space
        if coefficients is None:
            coefficients = np.zeros(space.n_dofs)
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (space.n_dofs,):
            raise ValueError('expected {0:d} coefficients, got shape {1}'.format(
                space.n_dofs, coefficients.shape))
        self.coefficients = coefficients

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self):
        return '<FEFunction on {0!r}>'.format(self.space)


def evaluate_points(f, points):
    """
    Evaluates a finite element function at many points.

    Returns
    -------
    values : ndarray
        Shaped ``(n,)``, NaN for points outside the mesh.
    """
    space = f.space
    points = np.asarray(points, dtype=float).reshape(-1, space.dim)
    cells, bary = locate_points(space.mesh, points)
    values = np.full(points.shape[0], np.nan)
    hit = cells >= 0
    if np.any(hit):
        phi, _ = eval_basis(space.degree, space.dim, bary[hit])
        coeffs = f.coefficients[space.cell_dofs[cells[hit]]]
        values[hit] = np.einsum('nl,nl->n', phi, coeffs)
    return values


def evaluate(f, x):
    """
    Value of ``f`` at a single point, or None if ``x`` is outside the mesh.
    """
    value = evaluate_points(f, np.asarray(x, dtype=float)[None, :])[0]
    return None if np.isnan(value) else float(value)


def interpolate(space, func):
    """
    Lagrange interpolant of a function.

    Parameters
    ----------
    space : FESpace

    func : callable or float
        Vectorized function mapping ``(n, dim)`` coordinates to ``(n,)``
        values, or a constant.

    Returns
    -------
    f : FEFunction
    """
    if callable(func):
        values = np.asarray(func(space.dof_coords), dtype=float)
    else:
        values = np.full(space.n_dofs, float(func))
    return FEFunction(space, values.reshape(space.n_dofs))


def basis_gradients(space, rule, cells=None):
    """
    Cartesian gradients of the local shape functions at quadrature points.

    Returns
    -------
    grads : ndarray
        Shaped ``(nc, nq, nloc, dim)`` for the requested cells.
    """
    _, bgrad = eval_basis(space.degree, space.dim, rule.points)
    lam = space.mesh.bary_gradients
    if cells is not None:
        lam = lam[cells]
    return np.einsum('qlm,cmd->cqld', bgrad, lam)


def cell_gradients(space, cells, bary):
    """
    Cartesian gradients of the local shape functions at one point per cell.

    Parameters
    ----------
    space : FESpace

    cells : array_like
        Cell index of each point, ``(n,)``.

    bary : array_like
        Barycentric coordinates of each point in its cell, ``(n, dim + 1)``.

    Returns
    -------
    grads : ndarray
        Shaped ``(n, nloc, dim)``.
    """
    cells = np.asarray(cells, dtype=np.int64)
    _, bgrad = eval_basis(space.degree, space.dim, np.atleast_2d(bary))
    return np.einsum('nlm,nmd->nld', bgrad, space.mesh.bary_gradients[cells])


def evaluate_gradient(f, x):
    """Gradient of ``f`` at a single point, or None outside the mesh."""
    space = f.space
    cells, bary = locate_points(space.mesh, np.asarray(x, dtype=float)[None, :])
    if cells[0] < 0:
        return None
    grads = cell_gradients(space, cells, bary)[0]
    return f.coefficients[space.cell_dofs[cells[0]]].dot(grads)


def write_function(f, path):
    """Writes the ``n_dofs k`` header and one coefficient per line."""
    with open(path, 'w') as out:
        out.write('{0:d} {1:d}\n'.format(f.space.n_dofs, f.space.degree))
        for c in f.coefficients:
            out.write('{0:.17g}\n'.format(c))


def read_function(path, space):
    """Reads coefficients written by `write_function` into ``space``."""
    with open(path) as src:
        header = src.readline().split()
        values = np.array([float(line) for line in src if line.strip()])
    n, k = int(header[0]), int(header[1])
    if n != space.n_dofs or k != space.degree:
        raise ValueError('{0} holds a P{1:d} function with {2:d} dofs, space is P{3:d} with '
                         '{4:d}'.format(path, k, n, space.degree, space.n_dofs))
    return FEFunction(space, values)
