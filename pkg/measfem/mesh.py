"""
Conforming simplicial meshes in 2D and 3D

Provides the `SimplicialMesh` container, generators for the L-shape, the
hexagon, the unit square and the unit cube, uniform red refinement with
parent tracking, point location, and selection of cells inside a region.

Meshes are immutable once built: all arrays are flagged read-only and
derived topology (edges, faces, facet census, affine maps) is computed
lazily and cached.
"""

import logging
from itertools import combinations, permutations
from math import factorial

import numpy as np
from scipy.spatial import cKDTree

__all__ = ['SimplicialMesh', 'RegionPredicate', 'TOL_GEOM',
           'generate_lshape', 'generate_unit_square', 'generate_hexagon',
           'generate_cube', 'hexagon_vertices', 'polygon_area',
           'refine_uniform', 'locate_point', 'locate_points', 'barycentric',
           'select_cells', 'mesh_size', 'cell_volumes', 'domain_measure', 'check_conformity',
           'distance_to_boundary', 'write_mesh', 'read_mesh']

logger = logging.getLogger(__name__)

# Absolute tolerance, in barycentric units, for point location
TOL_GEOM = 1e-10

LOCAL_EDGES = {d: np.array(list(combinations(range(d + 1), 2))) for d in (2, 3)}
LOCAL_FACES = {d: np.array(list(combinations(range(d + 1), 3))) for d in (2, 3)}


def _readonly(arr):
    arr.setflags(write=False)
    return arr


def _unique_rows(rows, base):
    """Unique sorted integer rows via scalar keys.

    Returns the unique rows in lexicographic order and, for each input row,
    the index of its unique row.
    """
    rows = np.asarray(rows, dtype=np.int64)
    weights = np.int64(base) ** np.arange(rows.shape[1] - 1, -1, -1, dtype=np.int64)
    keys = rows.dot(weights)
    ukeys, index, inverse = np.unique(keys, return_index=True, return_inverse=True)
    return rows[index], inverse.ravel()


def _signed_volumes(vertices, cells):
    dim = vertices.shape[1]
    jac = vertices[cells[:, 1:]] - vertices[cells[:, [0]]]
    return np.linalg.det(jac) / factorial(dim)


class SimplicialMesh(object):
    def __init__(self, vertices, cells, boundary_facets=None, level=0,
                 parent_of_cell=None, name='mesh'):
        """
        A conforming triangulation of a polygonal or polyhedral domain.

        Parameters
        ----------
        vertices : array_like
            Vertex coordinates, shaped ``(nv, dim)`` with ``dim`` 2 or 3.

        cells : array_like
            Vertex indices of each simplex, shaped ``(nc, dim + 1)``. Cells
            with negative signed volume are reoriented by swapping their
            last two vertices.

        boundary_facets : array_like, optional
            Vertex indices of the facets on the domain boundary, shaped
            ``(nb, dim)``. Computed from the facet census if omitted.

        level : int, optional
            Number of uniform refinements since generation (Default: 0).

        parent_of_cell : array_like, optional
            For each cell, the index of its parent cell on the previous
            level. Required iff ``level > 0``.

        name : str, optional
            Label used in logs and file headers (Default: 'mesh').
        """
        vertices = np.array(vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] not in (2, 3):
            raise ValueError('vertices must be shaped (nv, 2) or (nv, 3)')
        dim = vertices.shape[1]

        cells = np.array(cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[1] != dim + 1:
            raise ValueError('cells must be shaped (nc, {0:d})'.format(dim + 1))
        if cells.size and (cells.min() < 0 or cells.max() >= vertices.shape[0]):
            raise ValueError('cells reference vertices that do not exist')

        flip = _signed_volumes(vertices, cells) < 0
        if np.any(flip):
            last = cells[flip, dim].copy()
            cells[flip, dim] = cells[flip, dim - 1]
            cells[flip, dim - 1] = last

        if (level > 0) != (parent_of_cell is not None):
            raise ValueError('parent_of_cell must be given iff level > 0')

        self.dim = dim
        self.vertices = _readonly(vertices)
        self.cells = _readonly(cells)
        self.level = int(level)
        self.name = name
        self.parent_of_cell = None
        if parent_of_cell is not None:
            parent = np.array(parent_of_cell, dtype=np.int64)
            if parent.shape != (cells.shape[0],):
                raise ValueError('parent_of_cell must have one entry per cell')
            self.parent_of_cell = _readonly(parent)

        self._cache = {}
        if boundary_facets is None:
            boundary_facets = self.facets[self.facet_census == 1]
        boundary_facets = np.array(boundary_facets, dtype=np.int64).reshape(-1, dim)
        boundary_facets = np.sort(boundary_facets, axis=1)
        self.boundary_facets = _readonly(boundary_facets)

    def __str__(self):
        return '{0} ({1:d}D, level {2:d}): {3:d} vertices, {4:d} cells'.format(
            self.name, self.dim, self.level, self.n_vertices, self.n_cells)

    def __repr__(self):
        return '<SimplicialMesh {0}>'.format(self)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_cells(self):
        return self.cells.shape[0]

    def _cached(self, key, build):
        if key not in self._cache:
            value = build()
            if isinstance(value, tuple):
                value = tuple(_readonly(v) if isinstance(v, np.ndarray) else v for v in value)
            elif isinstance(value, np.ndarray):
                value = _readonly(value)
            self._cache[key] = value
        return self._cache[key]

    # -- topology -----------------------------------------------------------

    def _edges(self):
        pairs = np.sort(self.cells[:, LOCAL_EDGES[self.dim]], axis=2).reshape(-1, 2)
        edges, inverse = _unique_rows(pairs, self.n_vertices)
        return edges, inverse.reshape(self.n_cells, -1)

    @property
    def edges(self):
        """Unique edges as sorted vertex pairs, in lexicographic order"""
        return self._cached('edges', self._edges)[0]

    @property
    def cell_edges(self):
        """Edge index of each local edge ``(0,1), (0,2), ...`` of every cell"""
        return self._cached('edges', self._edges)[1]

    def _faces(self):
        triples = np.sort(self.cells[:, LOCAL_FACES[self.dim]], axis=2).reshape(-1, 3)
        faces, inverse = _unique_rows(triples, self.n_vertices)
        return faces, inverse.reshape(self.n_cells, -1)

    @property
    def faces(self):
        """Unique triangular faces as sorted vertex triples"""
        return self._cached('faces', self._faces)[0]

    @property
    def cell_faces(self):
        return self._cached('faces', self._faces)[1]

    @property
    def facets(self):
        """Codimension-one sub-simplices: edges in 2D, faces in 3D"""
        return self.edges if self.dim == 2 else self.faces

    @property
    def cell_facets(self):
        return self.cell_edges if self.dim == 2 else self.cell_faces

    @property
    def facet_census(self):
        """Number of cells sharing each facet"""
        return self._cached('census', lambda: np.bincount(
            self.cell_facets.ravel(), minlength=self.facets.shape[0]))

    # -- geometry -----------------------------------------------------------

    def _affine(self):
        origin = self.vertices[self.cells[:, 0]]
        jac = (self.vertices[self.cells[:, 1:]] - origin[:, None, :]).transpose(0, 2, 1)
        det = np.linalg.det(jac)
        return origin, jac, det

    @property
    def affine_maps(self):
        """Affine maps ``x = origin + jac @ xhat`` of each cell.

        Returns
        -------
        origin : ndarray
            First vertex of each cell, shaped ``(nc, dim)``.

        jac : ndarray
            Jacobians whose columns are the edge vectors from the first
            vertex, shaped ``(nc, dim, dim)``.

        det : ndarray
            Jacobian determinants, shaped ``(nc,)``.
        """
        return self._cached('affine', self._affine)

    @property
    def volumes(self):
        return self._cached('volumes', lambda: np.abs(self.affine_maps[2]) / factorial(self.dim))

    def _bary_gradients(self):
        inv = np.linalg.inv(self.affine_maps[1])
        return np.concatenate((-inv.sum(axis=1)[:, None, :], inv), axis=1)

    @property
    def bary_gradients(self):
        """Cartesian gradients of the barycentric coordinates, ``(nc, dim + 1, dim)``"""
        return self._cached('bary_gradients', self._bary_gradients)

    @property
    def centroids(self):
        return self._cached('centroids', lambda: self.vertices[self.cells].mean(axis=1))

    @property
    def diameters(self):
        """Longest edge of each cell"""
        def build():
            p = self.vertices[self.cells]
            loc = LOCAL_EDGES[self.dim]
            lengths = np.linalg.norm(p[:, loc[:, 1]] - p[:, loc[:, 0]], axis=2)
            return lengths.max(axis=1)
        return self._cached('diameters', build)

    def _search_tree(self):
        def build():
            centroids = self.centroids
            spread = np.linalg.norm(self.vertices[self.cells] - centroids[:, None, :], axis=2)
            radius = spread.max() if spread.size else 0.0
            return cKDTree(centroids), float(radius)
        return self._cached('tree', build)


# -- generators ---------------------------------------------------------------

def _structured_triangles(xs, ys, keep):
    """Triangulates the squares of a tensor grid with lower-left to upper-right diagonals.

    Parameters
    ----------
    xs, ys : ndarray
        Grid lines.

    keep : callable
        ``keep(x0, y0)`` returns a boolean mask of the squares (given by
        their lower-left corners) to retain.
    """
    nx, ny = xs.size, ys.size
    ix, iy = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing='ij')
    ix, iy = ix.ravel(), iy.ravel()
    mask = keep(xs[ix], ys[iy])
    ix, iy = ix[mask], iy[mask]

    # lattice points used by at least one retained square
    corners = np.concatenate([np.stack((ix + a, iy + b), axis=1)
                              for a, b in ((0, 0), (1, 0), (1, 1), (0, 1))])
    used = np.zeros((ny, nx), dtype=bool)
    used[corners[:, 1], corners[:, 0]] = True
    # number points row by row (y outer, x inner)
    py, px = np.nonzero(used)
    order = np.full((nx, ny), -1, dtype=np.int64)
    order[px, py] = np.arange(px.size)
    vertices = np.stack((xs[px], ys[py]), axis=1)

    ll, lr = order[ix, iy], order[ix + 1, iy]
    ur, ul = order[ix + 1, iy + 1], order[ix, iy + 1]
    cells = np.concatenate((np.stack((ll, lr, ur), axis=1),
                            np.stack((ll, ur, ul), axis=1)))
    return vertices, cells


def generate_lshape(n):
    """
    The L-shaped domain ``(-1, 1)^2 \\ [0, 1) x (-1, 0]``.

    Three unit squares, each split into an ``n x n`` grid of squares, each
    square cut along its lower-left to upper-right diagonal.

    Parameters
    ----------
    n : int
        Number of cells per unit edge, at least 1.

    Returns
    -------
    mesh : SimplicialMesh
        ``(2n + 1)^2 - n^2`` vertices and ``6 n^2`` triangles; 65 and 96
        for ``n = 4``.
    """
    n = _check_count(n, 'n')
    grid = np.linspace(-1.0, 1.0, 2 * n + 1)
    vertices, cells = _structured_triangles(
        grid, grid, lambda x0, y0: ~((x0 >= 0) & (y0 < 0)))
    return SimplicialMesh(vertices, cells, name='lshape')


def generate_unit_square(n):
    """The unit square ``(0, 1)^2`` with ``n x n`` squares cut into 2 triangles each."""
    n = _check_count(n, 'n')
    grid = np.linspace(0.0, 1.0, n + 1)
    vertices, cells = _structured_triangles(grid, grid, lambda x0, y0: np.ones(x0.shape, bool))
    return SimplicialMesh(vertices, cells, name='unit_square')


def hexagon_vertices():
    """Corners of the convex hexagon with a nearly flat vertex, listed in order."""
    r3 = np.sqrt(3.0)
    return np.array([[-1 / r3, 1.0],
                     [1 / r3, 1.0],
                     [2 / r3, 0.0],
                     [1 / r3, -1.0],
                     [-1 / r3, -1.0],
                     [-1 / r3 - 0.1, 0.0]])


def polygon_area(points):
    """Unsigned shoelace area of a simple polygon given by its ordered corners"""
    p = np.asarray(points, dtype=float)
    q = np.roll(p, -1, axis=0)
    return 0.5 * abs(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))


def generate_hexagon(fan_subdivisions=1):
    """
    The hexagon of `hexagon_vertices`, triangulated as a fan about the origin.

    Parameters
    ----------
    fan_subdivisions : int, optional
        Number of red refinements applied to the 6-triangle fan to form the
        initial mesh (Default: 1). The result is a level-0 mesh.

    Returns
    -------
    mesh : SimplicialMesh
        ``6 * 4**fan_subdivisions`` triangles.

    Notes
    -----
    The fan centre is the origin rather than the area centroid, so a
    point source at the origin sits on a vertex of every refinement.
    """
    if int(fan_subdivisions) != fan_subdivisions or fan_subdivisions < 0:
        raise ValueError('fan_subdivisions must be a nonnegative integer')
    corners = hexagon_vertices()
    vertices = np.vstack((corners, np.zeros(2)))
    cells = np.array([[6, i, (i + 1) % 6] for i in range(6)])
    mesh = SimplicialMesh(vertices, cells, name='hexagon')
    for _ in range(int(fan_subdivisions)):
        mesh = refine_uniform(mesh)
    return SimplicialMesh(mesh.vertices, mesh.cells, mesh.boundary_facets, name='hexagon')


def generate_cube(n):
    """
    The unit cube ``(0, 1)^3`` as ``n^3`` subcubes of 6 Kuhn tetrahedra each.

    Every subcube is split along its main diagonal from ``(0,0,0)`` to
    ``(1,1,1)``, so neighbouring subcubes match on shared faces.

    Parameters
    ----------
    n : int
        Number of subcubes per edge, at least 1.

    Returns
    -------
    mesh : SimplicialMesh
        ``(n + 1)^3`` vertices and ``6 n^3`` tetrahedra.
    """
    n = _check_count(n, 'n')
    grid = np.linspace(0.0, 1.0, n + 1)
    ii, jj, kk = np.meshgrid(np.arange(n + 1), np.arange(n + 1), np.arange(n + 1), indexing='ij')
    vertices = np.stack((grid[ii.ravel()], grid[jj.ravel()], grid[kk.ravel()]), axis=1)

    def index(i, j, k):
        return (i * (n + 1) + j) * (n + 1) + k

    ci, cj, ck = [a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n),
                                                  indexing='ij')]
    unit = np.eye(3, dtype=np.int64)
    cells = []
    for perm in permutations(range(3)):
        corner = np.zeros(3, dtype=np.int64)
        tet = [index(ci, cj, ck)]
        for axis in perm:
            corner = corner + unit[axis]
            tet.append(index(ci + corner[0], cj + corner[1], ck + corner[2]))
        cells.append(np.stack(tet, axis=1))
    cells = np.concatenate(cells)
    order = np.lexsort(cells.T[::-1])
    return SimplicialMesh(vertices, cells[order], name='cube')


def _check_count(n, name):
    if int(n) != n or n < 1:
        raise ValueError('{0} must be a positive integer, got {1!r}'.format(name, n))
    return int(n)


# -- refinement ---------------------------------------------------------------

def refine_uniform(mesh, times=1):
    """
    Red refinement of every cell through its edge midpoints.

    Triangles are split into 4, tetrahedra into 8 following Bey: four corner
    children plus an inner octahedron cut along its shortest diagonal
    (ties go to the diagonal whose midpoint indices are lexicographically
    smallest).

    Parameters
    ----------
    mesh : SimplicialMesh
        The mesh to refine.

    times : int, optional
        Number of successive refinements (Default: 1). The parent map of
        the result always refers to the mesh one level up.

    Returns
    -------
    fine : SimplicialMesh
        The refined mesh. Coarse vertices keep their indices; the midpoint
        of edge ``e`` receives index ``nv + e``.
    """
    if int(times) != times or times < 0:
        raise ValueError('times must be a nonnegative integer')
    for _ in range(int(times)):
        mesh = _refine_once(mesh)
    return mesh


def _refine_once(mesh):
    nv, nc, dim = mesh.n_vertices, mesh.n_cells, mesh.dim
    edges = mesh.edges
    midpoints = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    vertices = np.vstack((mesh.vertices, midpoints))
    t = mesh.cells
    m = mesh.cell_edges + nv

    if dim == 2:
        # local edges: 0=(0,1), 1=(0,2), 2=(1,2)
        children = [np.stack((t[:, 0], m[:, 0], m[:, 1]), axis=1),
                    np.stack((m[:, 0], t[:, 1], m[:, 2]), axis=1),
                    np.stack((m[:, 1], m[:, 2], t[:, 2]), axis=1),
                    np.stack((m[:, 0], m[:, 2], m[:, 1]), axis=1)]
    else:
        # local edges: 0=(0,1), 1=(0,2), 2=(0,3), 3=(1,2), 4=(1,3), 5=(2,3)
        children = [np.stack((t[:, 0], m[:, 0], m[:, 1], m[:, 2]), axis=1),
                    np.stack((m[:, 0], t[:, 1], m[:, 3], m[:, 4]), axis=1),
                    np.stack((m[:, 1], m[:, 3], t[:, 2], m[:, 5]), axis=1),
                    np.stack((m[:, 2], m[:, 4], m[:, 5], t[:, 3]), axis=1)]
        children.extend(_split_octahedra(vertices, m))

    cells = np.concatenate(children)
    parent = np.tile(np.arange(nc, dtype=np.int64), len(children))
    fine = SimplicialMesh(vertices, cells, level=mesh.level + 1,
                          parent_of_cell=parent, name=mesh.name)
    logger.debug('refined %s to level %d: %d cells', mesh.name, fine.level, fine.n_cells)
    return fine


# opposite midpoint pairs of the inner octahedron, as local edge indices
_DIAGONALS = np.array([[0, 5], [1, 4], [2, 3]])


def _split_octahedra(vertices, m):
    """Cuts the inner octahedron of each tetrahedron into 4 along one diagonal."""
    nc = m.shape[0]
    ends = m[:, _DIAGONALS]                                   # (nc, 3, 2)
    lengths = np.sum((vertices[ends[:, :, 0]] - vertices[ends[:, :, 1]]) ** 2, axis=2)
    shortest = lengths.min(axis=1, keepdims=True)
    tied = lengths <= shortest * (1 + 1e-12)
    pairs = np.sort(ends, axis=2)
    big = np.iinfo(np.int64).max
    key = np.where(tied, pairs[:, :, 0], big)
    # lexicographic on (first, second) midpoint index among tied diagonals
    first = key.min(axis=1, keepdims=True)
    key2 = np.where(tied & (key == first), pairs[:, :, 1], big)
    choice = key2.argmin(axis=1)

    rows = np.arange(nc)
    others = np.array([[1, 2], [0, 2], [0, 1]])[choice]      # the two remaining pairs
    a, b = ends[rows, choice, 0], ends[rows, choice, 1]
    p, q = ends[rows, others[:, 0], 0], ends[rows, others[:, 0], 1]
    r, s = ends[rows, others[:, 1], 0], ends[rows, others[:, 1], 1]
    # equator cycle p, r, q, s alternates between the two remaining pairs
    return [np.stack((a, b, p, r), axis=1),
            np.stack((a, b, r, q), axis=1),
            np.stack((a, b, q, s), axis=1),
            np.stack((a, b, s, p), axis=1)]


# -- point location -----------------------------------------------------------

def barycentric(mesh, cells, points):
    """
    Barycentric coordinates of points with respect to given cells.

    Parameters
    ----------
    mesh : SimplicialMesh

    cells : array_like
        Cell index for each point, shaped ``(n,)``.

    points : array_like
        Coordinates shaped ``(n, dim)``.

    Returns
    -------
    bary : ndarray
        Shaped ``(n, dim + 1)``; unclamped, so points outside a cell have
        negative components.
    """
    cells = np.asarray(cells, dtype=np.int64)
    points = np.asarray(points, dtype=float).reshape(-1, mesh.dim)
    origin = mesh.affine_maps[0][cells]
    grads = mesh.bary_gradients[cells]                        # (n, d+1, d)
    lam = np.einsum('nij,nj->ni', grads[:, 1:], points - origin)
    return np.concatenate((1.0 - lam.sum(axis=1, keepdims=True), lam), axis=1)


def locate_points(mesh, points, tol=TOL_GEOM, chunk=20000):
    """
    Finds a containing cell for each of many points.

    A point belongs to a cell if all its barycentric coordinates are at least
    ``-tol``. When several cells qualify (points on shared facets) the lowest
    cell index wins.

    Parameters
    ----------
    mesh : SimplicialMesh

    points : array_like
        Coordinates shaped ``(n, dim)``.

    tol : float, optional
        Barycentric tolerance (Default: ``TOL_GEOM``).

    Returns
    -------
    cells : ndarray
        Cell index per point, ``-1`` where the point is outside the mesh.

    bary : ndarray
        Barycentric coordinates clamped to ``[0, 1]`` and renormalized to sum
        to 1, shaped ``(n, dim + 1)``; NaN rows for points not found.
    """
    points = np.asarray(points, dtype=float).reshape(-1, mesh.dim)
    n = points.shape[0]
    found = np.full(n, -1, dtype=np.int64)
    bary = np.full((n, mesh.dim + 1), np.nan)
    if n == 0 or mesh.n_cells == 0:
        return found, bary

    tree, radius = mesh._search_tree()
    radius = radius * (1 + 1e-8) + 1e-12
    big = np.iinfo(np.int64).max
    for block in (slice(s, min(s + chunk, n)) for s in range(0, n, chunk)):
        candidates = tree.query_ball_point(points[block], radius)
        counts = np.array([len(c) for c in candidates], dtype=np.int64)
        if counts.sum() == 0:
            continue
        owner = np.repeat(np.arange(counts.size), counts)
        cand = np.concatenate([np.asarray(c, dtype=np.int64) for c in candidates if len(c)])
        lam = barycentric(mesh, cand, points[block][owner])
        inside = lam.min(axis=1) >= -tol
        best = np.full(counts.size, big, dtype=np.int64)
        np.minimum.at(best, owner[inside], cand[inside])
        hit = best < big
        found[block][hit] = best[hit]

    hit = found >= 0
    if np.any(hit):
        lam = np.clip(barycentric(mesh, found[hit], points[hit]), 0.0, 1.0)
        bary[hit] = lam / lam.sum(axis=1, keepdims=True)
    return found, bary


def locate_point(mesh, x, tol=TOL_GEOM):
    """
    Finds the cell containing a single point.

    Returns
    -------
    located : tuple or None
        ``(cell, bary)`` with the clamped barycentric coordinates, or None
        if ``x`` lies outside every cell.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (mesh.dim,):
        raise ValueError('x must have {0:d} coordinates'.format(mesh.dim))
    cells, bary = locate_points(mesh, x[None, :], tol=tol)
    if cells[0] < 0:
        return None
    return int(cells[0]), bary[0]


# -- regions ------------------------------------------------------------------

class RegionPredicate(object):
    KINDS = ('whole_domain', 'ball', 'ball_complement')

    def __init__(self, kind, center=None, radius=0.0, name=None):
        """
        A subdomain used to restrict error norms.

        ``ball(c, r)`` contains ``x`` iff ``|x - c| < r``;
        ``ball_complement(c, r)`` contains ``x`` iff ``|x - c| > r``;
        ``whole_domain`` contains everything.

        Parameters
        ----------
        kind : str
            One of 'whole_domain', 'ball', 'ball_complement'.

        center : array_like, optional
            Ball center (ignored for 'whole_domain').

        radius : float, optional
            Nonnegative ball radius.

        name : str, optional
            Label used in reports, defaults to a description of the region.
        """
        if kind not in self.KINDS:
            raise ValueError('kind must be one of {0}, got {1!r}'.format(self.KINDS, kind))
        if radius < 0:
            raise ValueError('radius must be nonnegative')
        if kind != 'whole_domain' and center is None:
            raise ValueError('a center is required for {0}'.format(kind))
        self.kind = kind
        self.center = None if center is None else tuple(float(c) for c in center)
        self.radius = float(radius)
        self.name = name or self._describe()

    @classmethod
    def whole_domain(cls, name=None):
        return cls('whole_domain', name=name)

    @classmethod
    def ball(cls, center, radius, name=None):
        return cls('ball', center, radius, name)

    @classmethod
    def ball_complement(cls, center, radius, name=None):
        return cls('ball_complement', center, radius, name)

    def _describe(self):
        if self.kind == 'whole_domain':
            return 'Omega'
        center = ','.join('{0:.4g}'.format(c) for c in self.center)
        ball = 'B(({0}),{1:.4g})'.format(center, self.radius)
        return ball if self.kind == 'ball' else 'Omega\\' + ball

    def __repr__(self):
        return 'RegionPredicate({0!r}, center={1!r}, radius={2!r}, name={3!r})'.format(
            self.kind, self.center, self.radius, self.name)

    def __eq__(self, other):
        return (isinstance(other, RegionPredicate) and self.kind == other.kind and
                self.center == other.center and self.radius == other.radius)

    def __hash__(self):
        return hash((self.kind, self.center, self.radius))

    def contains(self, points):
        """Boolean mask of the points, shaped ``(n, dim)``, inside the region"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == 'whole_domain':
            return np.ones(points.shape[0], dtype=bool)
        dist = np.linalg.norm(points - np.asarray(self.center), axis=1)
        if self.kind == 'ball':
            return dist < self.radius
        return dist > self.radius


def select_cells(mesh, region):
    """
    Cells all of whose vertices lie in the region.

    Returns
    -------
    cells : ndarray
        Sorted cell indices.
    """
    inside = region.contains(mesh.vertices)
    return np.flatnonzero(inside[mesh.cells].all(axis=1))


# -- checks and measures -----------------------------------------------------

def mesh_size(mesh):
    """Maximum cell diameter h"""
    return float(mesh.diameters.max())


def cell_volumes(mesh):
    """Unsigned cell volumes (areas in 2D)"""
    return mesh.volumes


def domain_measure(mesh):
    """Total volume of the meshed domain"""
    return float(mesh.volumes.sum())


def check_conformity(mesh):
    """
    Facet-incidence census.

    Returns True iff every facet is shared by one or two cells and the
    boundary facets are exactly those with a single cell.
    """
    census = mesh.facet_census
    if census.size == 0 or census.min() < 1 or census.max() > 2:
        return False
    single = mesh.facets[census == 1]
    if single.shape[0] != mesh.boundary_facets.shape[0]:
        return False
    boundary = mesh.boundary_facets[np.lexsort(mesh.boundary_facets.T[::-1])]
    return bool(np.array_equal(single, boundary))


def _segment_distance(x, a, b):
    ab = b - a
    t = np.einsum('ij,ij->i', x - a, ab) / np.einsum('ij,ij->i', ab, ab)
    t = np.clip(t, 0.0, 1.0)
    return np.linalg.norm(x - (a + t[:, None] * ab), axis=1)


def _triangle_distance(x, a, b, c):
    normal = np.cross(b - a, c - a)
    area2 = np.einsum('ij,ij->i', normal, normal)
    offset = np.einsum('ij,ij->i', x - a, normal) / area2
    proj = x - offset[:, None] * normal
    # barycentric coordinates of the projection
    wa = np.einsum('ij,ij->i', np.cross(b - proj, c - proj), normal) / area2
    wb = np.einsum('ij,ij->i', np.cross(c - proj, a - proj), normal) / area2
    wc = 1.0 - wa - wb
    inside = (wa >= 0) & (wb >= 0) & (wc >= 0)
    plane = np.abs(offset) * np.sqrt(area2)
    edge = np.minimum(np.minimum(_segment_distance(x, a, b), _segment_distance(x, b, c)),
                      _segment_distance(x, c, a))
    return np.where(inside, plane, edge)


def distance_to_boundary(mesh, points, cutoff=np.inf):
    """
    Distance from points to the boundary facets of the mesh.

    Parameters
    ----------
    mesh : SimplicialMesh

    points : array_like
        Coordinates shaped ``(n, dim)``.

    cutoff : float, optional
        Only facets closer than ``cutoff`` are examined; points farther than
        ``cutoff`` from the boundary get ``inf`` (Default: examine all).

    Returns
    -------
    dist : ndarray
        Shaped ``(n,)``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    dist = np.full(n, np.inf)
    facets = mesh.boundary_facets
    if n == 0 or facets.shape[0] == 0:
        return dist

    if np.isinf(cutoff):
        owner = np.repeat(np.arange(n), facets.shape[0])
        cand = np.tile(np.arange(facets.shape[0]), n)
    else:
        def build():
            corners = mesh.vertices[facets]
            centers = corners.mean(axis=1)
            spread = np.linalg.norm(corners - centers[:, None, :], axis=2).max()
            return cKDTree(centers), float(spread)
        tree, spread = mesh._cached('boundary_tree', build)
        lists = tree.query_ball_point(points, cutoff + spread)
        counts = np.array([len(c) for c in lists], dtype=np.int64)
        if counts.sum() == 0:
            return dist
        owner = np.repeat(np.arange(n), counts)
        cand = np.concatenate([np.asarray(c, dtype=np.int64) for c in lists if len(c)])

    corners = mesh.vertices[facets[cand]]
    if mesh.dim == 2:
        d = _segment_distance(points[owner], corners[:, 0], corners[:, 1])
    else:
        d = _triangle_distance(points[owner], corners[:, 0], corners[:, 1], corners[:, 2])
    np.minimum.at(dist, owner, d)
    if not np.isinf(cutoff):
        dist[dist > cutoff] = np.inf
    return dist


# -- plain-text format ------------------------------------------------------

def write_mesh(mesh, path):
    """
    Writes a mesh in the plain-text format.

    Header line ``dim nv nc nb``, then ``nv`` coordinate lines, ``nc`` cell
    lines and ``nb`` boundary facet lines; zero-based indices, coordinates
    with 17 significant digits.
    """
    with open(path, 'w') as f:
        f.write('{0:d} {1:d} {2:d} {3:d}\n'.format(
            mesh.dim, mesh.n_vertices, mesh.n_cells, mesh.boundary_facets.shape[0]))
        for row in mesh.vertices:
            f.write(' '.join('{0:.17g}'.format(c) for c in row) + '\n')
        for rows in (mesh.cells, mesh.boundary_facets):
            for row in rows:
                f.write(' '.join('{0:d}'.format(i) for i in row) + '\n')


def read_mesh(path, name=None):
    """Reads a mesh written by `write_mesh` (as a level-0 mesh)."""
    with open(path) as f:
        lines = [line.split() for line in f if line.strip()]
    try:
        dim, nv, nc, nb = (int(v) for v in lines[0])
        vertices = np.array(lines[1:1 + nv], dtype=float)
        cells = np.array(lines[1 + nv:1 + nv + nc], dtype=np.int64)
        facets = np.array(lines[1 + nv + nc:1 + nv + nc + nb], dtype=np.int64)
    except (ValueError, IndexError) as err:
        raise ValueError('malformed mesh file {0}: {1}'.format(path, err))
    if vertices.shape != (nv, dim) or cells.shape != (nc, dim + 1) or facets.shape[0] != nb:
        raise ValueError('malformed mesh file {0}: counts do not match header'.format(path))
    return SimplicialMesh(vertices, cells, facets.reshape(nb, dim),
                          name=name or str(path))
