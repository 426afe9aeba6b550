"""
Discrete solution schemes

`solve_standard` is the Galerkin method ``a(u_h, v_h) = <mu, v_h>``.
`solve_berggren` is the very weak scheme written out in matrix form: the
dual problem ``K w = b`` followed by the L2 projection ``M u = M w``. The
two coincide in exact arithmetic, and `check_equivalence` measures how far
apart they are in floating point.
"""

import logging

import numpy as np

from measfem.assembly import (apply_dirichlet, assemble_l2_rhs, assemble_mass,
                              assemble_measure_rhs, assemble_stiffness, eliminate)
from measfem.errors import SolverError
from measfem.fespace import FEFunction, write_function
from measfem.measures import MeasureData, validate_measure
from measfem.sparse import cg_solve

__all__ = ['DiscreteSolution', 'SCHEMES', 'assemble_system', 'solve_standard',
           'solve_berggren', 'solve', 'check_equivalence', 'relative_discrepancy',
           'write_solution', 'DEFAULT_TOL']

logger = logging.getLogger(__name__)

SCHEMES = ('standard', 'berggren')
DEFAULT_TOL = 1e-12


class DiscreteSolution(object):
    def __init__(self, u, stats, scheme_tag):
        """
        A computed solution and how it was obtained.

        Parameters
        ----------
        u : FEFunction

        stats : SolveStats or tuple of SolveStats
            One entry per CG solve (two for the very weak scheme).

        scheme_tag : str
            'standard' or 'berggren'.
        """
        if scheme_tag not in SCHEMES:
            raise ValueError('scheme_tag must be one of {0}'.format(SCHEMES))
        self.u = u
        self.stats = stats if isinstance(stats, tuple) else (stats,)
        self.scheme_tag = scheme_tag

    @property
    def iterations(self):
        return tuple(s.iterations for s in self.stats)

    @property
    def tol(self):
        return self.stats[0].tol

    def __repr__(self):
        return '<DiscreteSolution {0} on {1!r}, iterations {2}>'.format(
            self.scheme_tag, self.u.space, self.iterations)


def assemble_system(V, A, data):
    """
    The eliminated stiffness matrix and right-hand side.

    Parameters
    ----------
    V : FESpace

    A : CoefficientField

    data : MeasureData, callable or float
        A measure, or a square-integrable source term ``f``.

    Returns
    -------
    K : CsrMatrix
        Stiffness matrix after Dirichlet elimination.

    b : ndarray
        Right-hand side with boundary entries zeroed.
    """
    if isinstance(data, MeasureData):
        validate_measure(data, V.mesh)
        b = assemble_measure_rhs(V, data)
    else:
        b = assemble_l2_rhs(V, data)
    return apply_dirichlet(assemble_stiffness(V, A), b, V.boundary_mask)


def _cg(A, b, tol, max_iter, stage):
    x, stats = cg_solve(A, b, tol=tol, max_iter=max_iter)
    if not stats.converged:
        raise SolverError(stats, stage)
    return x, stats


def solve_standard(V, A, mu, tol=DEFAULT_TOL, max_iter=None, system=None, stage=None):
    """
    Galerkin solution of ``-div(A grad u) = mu`` with ``u = 0`` on the boundary.

    Parameters
    ----------
    V : FESpace

    A : CoefficientField

    mu : MeasureData, callable or float
        Right-hand side, see `assemble_system`.

    tol : float, optional
        CG relative residual tolerance (Default: 1e-12).

    system : tuple, optional
        A precomputed ``(K, b)`` from `assemble_system`.

    stage : str, optional
        Label used in error messages, e.g. ``'level 3'``.

    Returns
    -------
    solution : DiscreteSolution

    Raises
    ------
    SolverError
        If CG does not reach ``tol``.
    """
    K, b = system if system is not None else assemble_system(V, A, mu)
    u, stats = _cg(K, b, tol, max_iter, stage)
    logger.debug('standard P%d: %d dofs, %d iterations', V.degree, V.n_dofs, stats.iterations)
    return DiscreteSolution(FEFunction(V, u), stats, 'standard')


def solve_berggren(V, A, mu, tol=DEFAULT_TOL, max_iter=None, system=None, stage=None,
                   mass=None):
    """
    The very weak scheme as two solves.

    With ``K`` and ``M`` the eliminated stiffness and mass matrices and ``b``
    the load vector, first ``K w = b`` (so that ``<mu, z_h(v)> = v . M w``
    for every test function ``v``), then ``M u = M w``.

    Parameters
    ----------
    mass : CsrMatrix, optional
        Replaces the eliminated mass matrix; with the identity the second
        solve returns ``w`` unchanged.

    Other parameters are as in `solve_standard`.

    Returns
    -------
    solution : DiscreteSolution
        With the statistics of both solves.
    """
    K, b = system if system is not None else assemble_system(V, A, mu)
    dual = '{0}, dual solve'.format(stage) if stage else 'dual solve'
    w, dual_stats = _cg(K, b, tol, max_iter, dual)

    if mass is None:
        mass = eliminate(assemble_mass(V), V.boundary_mask)
    projection = '{0}, projection'.format(stage) if stage else 'projection'
    u, proj_stats = _cg(mass, mass @ w, tol, max_iter, projection)
    logger.debug('berggren P%d: %d dofs, %d + %d iterations', V.degree, V.n_dofs,
                 dual_stats.iterations, proj_stats.iterations)
    return DiscreteSolution(FEFunction(V, u), (dual_stats, proj_stats), 'berggren')


def solve(V, A, mu, scheme='standard', **kwargs):
    """Dispatches to `solve_standard` or `solve_berggren`."""
    if scheme == 'standard':
        return solve_standard(V, A, mu, **kwargs)
    if scheme == 'berggren':
        return solve_berggren(V, A, mu, **kwargs)
    raise ValueError('scheme must be one of {0}, got {1!r}'.format(SCHEMES, scheme))


def relative_discrepancy(u, v):
    """``max|u - v| / max|u|`` of two coefficient vectors (absolute if ``u = 0``)"""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    scale = np.abs(u).max() if u.size else 0.0
    diff = np.abs(u - v).max() if u.size else 0.0
    return float(diff / scale) if scale > 0 else float(diff)


def check_equivalence(V, A, mu, tol=DEFAULT_TOL, max_iter=None):
    """
    Solves with both schemes and compares the coefficient vectors.

    Returns
    -------
    discrepancy : float
        Relative max-norm difference, see `relative_discrepancy`.

    standard, berggren : DiscreteSolution
    """
    system = assemble_system(V, A, mu)
    std = solve_standard(V, A, mu, tol=tol, max_iter=max_iter, system=system)
    berg = solve_berggren(V, A, mu, tol=tol, max_iter=max_iter, system=system)
    discrepancy = relative_discrepancy(std.u.coefficients, berg.u.coefficients)
    logger.info('P%d, %d dofs: schemes differ by %.3e (relative max norm)',
                V.degree, V.n_dofs, discrepancy)
    return discrepancy, std, berg


def write_solution(solution, path):
    """
    Writes the coefficients with `write_function` and a ``.meta`` sidecar.

    The sidecar holds one line: ``scheme=<tag> tol=<tol> iterations=<i>[,<j>]``.
    """
    write_function(solution.u, path)
    with open(str(path) + '.meta', 'w') as meta:
        meta.write('scheme={0} tol={1:.3g} iterations={2}\n'.format(
            solution.scheme_tag, solution.tol, ','.join(str(i) for i in solution.iterations)))
