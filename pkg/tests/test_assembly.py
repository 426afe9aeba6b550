"""
Tests for the assembly module
"""
import numpy as np
import pytest

import measfem.mesh as msh
from measfem.assembly import (CoefficientField, apply_dirichlet, assemble_l2_rhs,
                              assemble_mass, assemble_measure_rhs, assemble_stiffness,
                              eliminate)
from measfem.errors import DegenerateCellError, MeasureLocationError
from measfem.fespace import build_space
from measfem.measures import CurveAtom, MeasureData, PointAtom, sample_curve
from measfem.mesh import SimplicialMesh
from measfem.sparse import cg_solve

import utils


def laplace(dim):
    return CoefficientField.identity(dim)


def test_reference_triangle_matrices():
    V = build_space(utils.reference_triangle(), 1)
    K = assemble_stiffness(V, laplace(2)).toarray()
    assert np.allclose(K, 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]]))
    M = assemble_mass(V).toarray()
    assert np.allclose(M, (np.ones((3, 3)) + np.eye(3)) / 24.0)


def test_two_triangle_stiffness():
    V = build_space(utils.two_triangle_square(), 1)
    K = assemble_stiffness(V, laplace(2))
    expected = np.array([[1, -.5, 0, -.5],
                         [-.5, 1, -.5, 0],
                         [0, -.5, 1, -.5],
                         [-.5, 0, -.5, 1]])
    assert np.allclose(K.toarray(), expected)
    assert K.is_structurally_symmetric()


def test_reference_tetrahedron_stiffness():
    V = build_space(utils.reference_tetrahedron(), 1)
    K = assemble_stiffness(V, laplace(3)).toarray()
    expected = np.array([[3, -1, -1, -1],
                         [-1, 1, 0, 0],
                         [-1, 0, 1, 0],
                         [-1, 0, 0, 1]]) / 6.0
    assert np.allclose(K, expected)


@pytest.mark.parametrize('mesh,measure', [(msh.generate_lshape(2), 3.0),
                                          (msh.generate_hexagon(0), None),
                                          (msh.generate_cube(1), 1.0)])
@pytest.mark.parametrize('k', [1, 2, 3])
def test_matrix_properties(mesh, measure, k):
    V = build_space(mesh, k)
    K = assemble_stiffness(V, laplace(mesh.dim))
    M = assemble_mass(V)
    ones = np.ones(V.n_dofs)

    # constants are in the kernel of K, and M integrates them
    assert np.allclose(K @ ones, 0.0, atol=1e-11)
    if measure is None:
        measure = msh.domain_measure(mesh)
    assert np.isclose(ones.dot(M @ ones), measure, rtol=1e-12)

    assert K.is_structurally_symmetric() and M.is_structurally_symmetric()
    assert K.asymmetry() < 1e-14 and M.asymmetry() < 1e-14
    assert np.all(K.diagonal() > 0) and np.all(M.diagonal() > 0)


def test_cancelled_couplings_stay_in_pattern():
    # P3 on a Kuhn cube has couplings that round to 0.0 on one side only
    V = build_space(msh.generate_cube(1), 3)
    K = assemble_stiffness(V, laplace(3))
    assert K.is_structurally_symmetric()

    # the pattern is every pair of DOFs sharing a cell, zero or not
    pairs = {(i, j) for cell in V.cell_dofs.tolist() for i in cell for j in cell}
    coo = K.matrix.tocoo()
    assert set(zip(coo.row.tolist(), coo.col.tolist())) == pairs

    Kd, _ = apply_dirichlet(K, np.ones(V.n_dofs), V.boundary_mask)
    assert Kd.is_structurally_symmetric()
    assert Kd.nnz == K.nnz


def test_stiffness_reproduces_energy():
    # u = x on the unit cube has energy int |grad u|^2 = 1
    V = build_space(msh.generate_cube(2), 2)
    u = V.dof_coords[:, 0]
    K = assemble_stiffness(V, laplace(3))
    assert np.isclose(u.dot(K @ u), 1.0, rtol=1e-12)


def test_coefficient_scaling():
    V = build_space(msh.generate_lshape(2), 2)
    K = assemble_stiffness(V, laplace(2))
    K2 = assemble_stiffness(V, CoefficientField.constant(2 * np.eye(2)))
    assert np.allclose(K2.toarray(), 2 * K.toarray())

    # a variable evaluator that happens to be constant gives the same matrix
    field = CoefficientField(lambda x: np.broadcast_to(2 * np.eye(2), (x.shape[0], 2, 2)),
                             2.0, 2.0, dim=2)
    assert not field.is_constant
    assert np.allclose(assemble_stiffness(V, field).toarray(), K2.toarray())


def test_anisotropic_coefficient():
    V = build_space(msh.generate_unit_square(3), 1)
    field = CoefficientField.constant([[3.0, 0.0], [0.0, 1.0]])
    assert field.lam_min == 1.0 and field.lam_max == 3.0
    K = assemble_stiffness(V, field)
    u = V.dof_coords[:, 0]
    v = V.dof_coords[:, 1]
    assert np.isclose(u.dot(K @ u), 3.0)
    assert np.isclose(v.dot(K @ v), 1.0)


def test_coefficient_validation():
    with pytest.raises(ValueError):
        CoefficientField(np.eye(2), 0.0, 1.0)
    with pytest.raises(ValueError):
        CoefficientField([[1.0, 0.5], [0.0, 1.0]], 0.5, 1.5)
    with pytest.raises(ValueError):
        CoefficientField.constant([[1.0, 0.0], [0.0, -1.0]])

    field = CoefficientField(lambda x: np.broadcast_to(np.eye(2) * 5, (x.shape[0], 2, 2)),
                             1.0, 2.0, dim=2)
    with pytest.raises(ValueError):
        field.check_ellipticity(np.zeros((3, 2)))
    CoefficientField.identity(2).check_ellipticity(np.zeros((3, 2)))

    with pytest.raises(ValueError):
        assemble_stiffness(build_space(msh.generate_cube(1), 1), laplace(2))


def test_degenerate_cell():
    mesh = SimplicialMesh([[0., 0.], [1., 0.], [0., 1.], [2., 0.]],
                          [[0, 1, 2], [0, 1, 3]])
    V = build_space(mesh, 1)
    with pytest.raises(DegenerateCellError) as info:
        assemble_stiffness(V, laplace(2))
    assert info.value.cell == 1


def test_dirac_at_vertex_and_centroid():
    mesh = utils.two_triangle_square()
    V = build_space(mesh, 1)

    b = assemble_measure_rhs(V, MeasureData.dirac([1.0, 0.0], 2.0))
    assert np.allclose(b, [0, 2, 0, 0])

    b = assemble_measure_rhs(V, MeasureData.dirac(mesh.centroids[1]))
    assert np.allclose(b, [1 / 3., 0, 1 / 3., 1 / 3.])

    # a point on the shared diagonal only touches its two endpoints
    b = assemble_measure_rhs(V, MeasureData.dirac([0.3, 0.3]))
    assert np.allclose(b, [0.7, 0, 0.3, 0], atol=1e-12)


@pytest.mark.parametrize('k', [1, 2, 3])
def test_measure_rhs_total(k):
    mesh = msh.refine_uniform(msh.generate_lshape(2), 1)
    V = build_space(mesh, k)
    mu = MeasureData([PointAtom([-0.5, 0.5], 1.5), PointAtom([0.1, 0.37], -0.25)])
    b = assemble_measure_rhs(V, mu)
    assert np.isclose(b.sum(), 1.25, rtol=1e-14)


def test_curve_on_an_edge():
    mesh = utils.two_triangle_square()
    V = build_space(mesh, 1)
    curve = CurveAtom([0.0, 1.0], [[0.0, 0.0], [1.0, 1.0]], weight=1.0)
    b = assemble_measure_rhs(V, MeasureData(curve_atoms=[curve]))
    half = np.sqrt(2.0) / 2
    assert np.allclose(b, [half, 0, half, 0], atol=1e-12)


def test_curve_rhs_is_polyline_length():
    mesh = msh.generate_cube(2)
    V = build_space(mesh, 2)
    totals = []
    for samples in (17, 33, 65, 129):
        atom = sample_curve('lambda1', 0.5, samples)
        b = assemble_measure_rhs(V, MeasureData(curve_atoms=[atom]))
        assert np.isclose(b.sum(), 0.5 * atom.length(), rtol=1e-12)
        totals.append(b.sum())

    # the polyline length converges at second order in the segment size
    diffs = np.diff(totals)
    ratios = diffs[:-1] / diffs[1:]
    assert np.all((ratios > 3.6) & (ratios < 4.4))


def test_atom_outside_mesh():
    V = build_space(msh.generate_lshape(2), 1)
    atom = PointAtom([0.5, -0.5])
    with pytest.raises(MeasureLocationError) as info:
        assemble_measure_rhs(V, MeasureData([atom]))
    assert info.value.atom is atom

    with pytest.raises(MeasureLocationError):
        assemble_measure_rhs(V, MeasureData.dirac([0.5, 0.5, 0.5]))


def test_l2_rhs():
    V = build_space(utils.reference_triangle(), 1)
    assert np.allclose(assemble_l2_rhs(V, 1.0), 1 / 6.)

    # b_i = int x phi_i on the reference triangle
    b = assemble_l2_rhs(V, lambda x: x[:, 0])
    assert np.allclose(b, [1 / 24., 1 / 12., 1 / 24.])

    V3 = build_space(msh.generate_cube(1), 3)
    assert np.isclose(assemble_l2_rhs(V3, 2.0).sum(), 2.0)


def test_apply_dirichlet():
    V = build_space(msh.generate_unit_square(3), 2)
    K = assemble_stiffness(V, laplace(2))
    b = np.arange(V.n_dofs, dtype=float)
    Kd, bd = apply_dirichlet(K, b, V.boundary_mask)

    mask = V.boundary_mask
    dense = Kd.toarray()
    assert np.array_equal(bd[mask], np.zeros(mask.sum()))
    assert np.array_equal(bd[~mask], b[~mask])
    assert b[mask].sum() > 0
    assert np.allclose(dense[mask][:, mask], np.eye(mask.sum()))
    assert np.all(dense[mask][:, ~mask] == 0) and np.all(dense[~mask][:, mask] == 0)
    assert np.allclose(dense[~mask][:, ~mask], K.toarray()[~mask][:, ~mask])
    assert Kd.asymmetry() < 1e-14

    # eliminate with an empty mask is a no-op
    assert np.allclose(eliminate(K, np.zeros(V.n_dofs, bool)).toarray(), K.toarray())


def test_poisson_matches_dense_solve():
    V = build_space(msh.generate_unit_square(8), 1)
    K, b = apply_dirichlet(assemble_stiffness(V, laplace(2)), assemble_l2_rhs(V, 1.0),
                           V.boundary_mask)
    x, stats = cg_solve(K, b, tol=1e-12)
    assert stats.converged
    direct = np.linalg.solve(K.toarray(), b)
    assert np.allclose(x, direct, rtol=1e-9, atol=1e-9)
    # the discrete solution of -laplace(u) = 1 peaks near 0.0737 at the centre
    assert 0.06 < direct.max() < 0.08
