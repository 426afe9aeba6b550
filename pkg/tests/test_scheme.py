"""
Tests for the scheme module
"""
import numpy as np
import pytest

import measfem.mesh as msh
from measfem.assembly import CoefficientField, assemble_stiffness
from measfem.errors import MeasureLocationError, SolverError
from measfem.fespace import build_space, evaluate
from measfem.measures import MeasureData, PointAtom, sample_curve
from measfem.scheme import (DiscreteSolution, assemble_system, check_equivalence,
                            relative_discrepancy, solve, solve_berggren, solve_standard,
                            write_solution)
from measfem.sparse import CsrMatrix

SOURCE = (-0.5, 0.5)


def lshape_space(k=1, level=1):
    return build_space(msh.refine_uniform(msh.generate_lshape(4), level), k)


def laplace(dim=2):
    return CoefficientField.identity(dim)


def test_zero_measure():
    V = lshape_space()
    solution = solve_standard(V, laplace(), MeasureData.dirac(SOURCE, 0.0))
    assert np.array_equal(solution.u.coefficients, np.zeros(V.n_dofs))
    assert solution.iterations == (0,)
    assert solution.scheme_tag == 'standard'


def test_boundary_values_are_zero():
    V = lshape_space(k=2)
    for scheme in ('standard', 'berggren'):
        u = solve(V, laplace(), MeasureData.dirac(SOURCE), scheme).u.coefficients
        assert np.all(u[V.boundary_mask] == 0.0)


def test_maximum_at_the_source():
    V = lshape_space(k=1, level=1)
    u = solve_standard(V, laplace(), MeasureData.dirac(SOURCE)).u
    assert np.allclose(V.dof_coords[np.argmax(u.coefficients)], SOURCE)
    # the discrete Green's function is positive inside and grows near the pole
    assert evaluate(u, np.array([-0.5, 0.45])) > evaluate(u, np.array([-0.5, 0.2])) > 0


def test_linearity():
    V = lshape_space(k=2)
    a = MeasureData([PointAtom(SOURCE, 1.0)])
    b = MeasureData([PointAtom((0.3, 0.6), -2.0)])
    both = MeasureData([PointAtom(SOURCE, 1.0), PointAtom((0.3, 0.6), -2.0)])
    ua = solve_standard(V, laplace(), a).u.coefficients
    ub = solve_standard(V, laplace(), b).u.coefficients
    uab = solve_standard(V, laplace(), both).u.coefficients
    assert np.allclose(uab, ua + ub, rtol=1e-8, atol=1e-8 * np.abs(uab).max())


def test_sign_flip_is_exact():
    V = lshape_space(k=1)
    u = solve_standard(V, laplace(), MeasureData.dirac(SOURCE, 1.0)).u.coefficients
    v = solve_standard(V, laplace(), MeasureData.dirac(SOURCE, -1.0)).u.coefficients
    assert np.array_equal(v, -u)


def test_galerkin_energy():
    # a(u_h, u_h) = <mu, u_h> = u_h(x0)
    V = lshape_space(k=2)
    mu = MeasureData.dirac(SOURCE)
    u = solve_standard(V, laplace(), mu).u
    K = assemble_stiffness(V, laplace())
    energy = u.coefficients.dot(K @ u.coefficients)
    assert np.isclose(energy, evaluate(u, np.array(SOURCE)), rtol=1e-8)


@pytest.mark.parametrize('k', [1, 2, 3])
def test_galerkin_orthogonality(k):
    V = lshape_space(k=k)
    mu = MeasureData([PointAtom(SOURCE, 1.0), PointAtom((0.3, 0.6), -0.5)])
    K, b = assemble_system(V, laplace(), mu)
    solution = solve_standard(V, laplace(), mu, system=(K, b))
    residual = K @ solution.u.coefficients - b

    np.random.seed(k)
    for _ in range(20):
        v = np.random.randn(V.n_dofs)
        v[V.boundary_mask] = 0.0
        bound = solution.tol * np.linalg.norm(b) * np.linalg.norm(v)
        assert abs(v.dot(residual)) <= bound


def test_identity_mass_reproduces_standard():
    V = lshape_space(k=2)
    mu = MeasureData.dirac(SOURCE)
    std = solve_standard(V, laplace(), mu)
    berg = solve_berggren(V, laplace(), mu, mass=CsrMatrix.identity(V.n_dofs))
    assert np.array_equal(berg.u.coefficients, std.u.coefficients)
    assert berg.iterations[0] == std.iterations[0]
    assert berg.iterations[1] == 1


def two_dim_case(kind):
    if kind == 'lshape':
        return msh.generate_lshape(4), MeasureData.dirac(SOURCE)
    return msh.generate_hexagon(), MeasureData.dirac((0.0, 0.0))


@pytest.mark.parametrize('kind', ['lshape', 'hexagon'])
@pytest.mark.parametrize('k', [1, 2, 3])
@pytest.mark.parametrize('level', [0, 1, 2])
def test_schemes_agree_2d(kind, k, level):
    mesh, mu = two_dim_case(kind)
    V = build_space(msh.refine_uniform(mesh, level), k)
    discrepancy, std, berg = check_equivalence(V, laplace(), mu)
    assert discrepancy <= 1e-8
    assert len(berg.stats) == 2 and all(s.converged for s in berg.stats)
    assert std.stats[0].converged


@pytest.mark.parametrize('k,level', [(1, 0), (2, 0), (3, 0), (1, 2), (2, 2)])
def test_schemes_agree_cube(k, level):
    mu = MeasureData(curve_atoms=[sample_curve('lambda1', 1.6, 65),
                                  sample_curve('lambda2', 0.8, 65),
                                  sample_curve('lambda3', 1.2, 65)])
    V = build_space(msh.refine_uniform(msh.generate_cube(2), level), k)
    discrepancy, _, _ = check_equivalence(V, laplace(3), mu)
    assert discrepancy <= 1e-8


def test_smooth_source():
    V = build_space(msh.generate_unit_square(4), 2)
    system = assemble_system(V, laplace(), 1.0)
    u = solve_standard(V, laplace(), 1.0, system=system).u
    # -Laplace u = 1 on the unit square has its maximum ~0.0737 at the center
    assert np.isclose(evaluate(u, np.array([0.5, 0.5])), 0.07367, rtol=0.05)
    berg = solve_berggren(V, laplace(), 1.0, system=system)
    assert relative_discrepancy(u.coefficients, berg.u.coefficients) < 1e-8


def test_source_outside_rejected():
    V = lshape_space()
    with pytest.raises(MeasureLocationError):
        solve_standard(V, laplace(), MeasureData.dirac((0.5, -0.5)))
    with pytest.raises(MeasureLocationError):
        solve_standard(V, laplace(), MeasureData.dirac((1.0, 0.5)))


def test_solver_failure_names_the_stage():
    V = lshape_space(k=2)
    mu = MeasureData.dirac(SOURCE)
    with pytest.raises(SolverError) as info:
        solve_standard(V, laplace(), mu, max_iter=3, stage='level 1')
    assert info.value.stage == 'level 1'
    assert info.value.stats.iterations == 3
    assert 'level 1' in str(info.value)

    with pytest.raises(SolverError) as info:
        solve_berggren(V, laplace(), mu, max_iter=3, stage='level 1')
    assert info.value.stage == 'level 1, dual solve'


def test_bad_scheme():
    V = lshape_space()
    with pytest.raises(ValueError):
        solve(V, laplace(), MeasureData.dirac(SOURCE), 'mixed')
    with pytest.raises(ValueError):
        DiscreteSolution(None, (), 'mixed')


def test_relative_discrepancy():
    assert relative_discrepancy([1.0, -2.0], [1.0, -2.0]) == 0.0
    assert relative_discrepancy([1.0, -2.0], [1.5, -2.0]) == 0.25
    assert relative_discrepancy([0.0, 0.0], [0.0, 1e-3]) == 1e-3


def test_write_solution(tmpdir):
    V = lshape_space()
    solution = solve_berggren(V, laplace(), MeasureData.dirac(SOURCE))
    path = str(tmpdir.join('u.txt'))
    write_solution(solution, path)
    with open(path + '.meta') as f:
        meta = f.read().split()
    assert meta[0] == 'scheme=berggren'
    assert meta[1] == 'tol=1e-12'
    assert meta[2] == 'iterations={0:d},{1:d}'.format(*solution.iterations)
    with open(path) as f:
        assert f.readline().split() == [str(V.n_dofs), '1']
