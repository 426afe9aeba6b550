"""
Convergence analysis on nested meshes

A `RefinementLadder` holds uniformly refined meshes connected by parent
maps. Functions on a coarse level are prolonged exactly to finer levels,
errors against a fine reference solution (or a known exact solution) are
integrated over subdomains, and the empirical orders of convergence are
collected into a `ConvergenceReport`.
"""

import csv
import io
import logging
import os
import threading
import time
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from measfem.assembly import CoefficientField
from measfem.errors import EmptyRegionError, MeasfemError
from measfem.fespace import FEFunction, basis_gradients, build_space, eval_basis
from measfem.mesh import barycentric, mesh_size, refine_uniform, select_cells
from measfem.quadrature import MAX_DEGREE, quadrature_for
from measfem.scheme import assemble_system, relative_discrepancy, solve
from measfem.utils import chunks, thread_count

__all__ = ['RefinementLadder', 'ManufacturedSolution', 'MANUFACTURED', 'NORMS',
           'prolong', 'error_norm', 'exact_error_norm', 'compute_rates',
           'ConvergenceReport', 'run_study', 'run_studies']

logger = logging.getLogger(__name__)

NORMS = ('L2', 'H1seminorm')

# slack allowed when checking that a fine node lies in its ancestor cell
ANCESTOR_TOL = 1e-8

CELL_BLOCK = 50000


class RefinementLadder(object):
    def __init__(self, meshes):
        """
        A sequence of meshes, each the uniform refinement of the previous one.

        Parameters
        ----------
        meshes : list of SimplicialMesh
            ``meshes[l + 1]`` must carry a parent map into ``meshes[l]``.
        """
        meshes = list(meshes)
        if not meshes:
            raise ValueError('a ladder needs at least one mesh')
        for coarse, fine in zip(meshes[:-1], meshes[1:]):
            parent = fine.parent_of_cell
            if parent is None or parent.size != fine.n_cells or \
                    parent.max(initial=-1) >= coarse.n_cells:
                raise ValueError('meshes are not connected by parent maps')
            if fine.n_vertices < coarse.n_vertices or not np.array_equal(
                    fine.vertices[:coarse.n_vertices], coarse.vertices):
                raise ValueError('refinement must keep the coarse vertex numbering')
        self.meshes = meshes
        self._spaces = {}
        self._lock = threading.Lock()

    @classmethod
    def build(cls, mesh, top_level):
        """Refines ``mesh`` ``top_level`` times, keeping every level."""
        if int(top_level) != top_level or top_level < 0:
            raise ValueError('top_level must be a nonnegative integer')
        meshes = [mesh]
        for _ in range(int(top_level)):
            meshes.append(refine_uniform(meshes[-1]))
        return cls(meshes)

    @property
    def top_level(self):
        return len(self.meshes) - 1

    def __len__(self):
        return len(self.meshes)

    def mesh(self, level):
        return self.meshes[level]

    def level_of(self, mesh):
        for level, m in enumerate(self.meshes):
            if m is mesh:
                return level
        raise ValueError('mesh {0} is not on this ladder'.format(mesh))

    def space(self, level, degree):
        """The (cached) degree-``degree`` space on ``level``"""
        key = (int(level), int(degree))
        with self._lock:
            if key not in self._spaces:
                self._spaces[key] = build_space(self.meshes[key[0]], key[1])
            return self._spaces[key]

    def ancestors(self, fine_level, coarse_level):
        """
        Ancestor cell on ``coarse_level`` of every cell on ``fine_level``.

        Returns
        -------
        cells : ndarray
            Shaped ``(meshes[fine_level].n_cells,)``.
        """
        if not 0 <= coarse_level <= fine_level <= self.top_level:
            raise ValueError('need 0 <= coarse_level <= fine_level <= {0:d}'.format(
                self.top_level))
        cells = np.arange(self.meshes[fine_level].n_cells)
        for level in range(fine_level, coarse_level, -1):
            cells = self.meshes[level].parent_of_cell[cells]
        return cells

    def __repr__(self):
        return '<RefinementLadder {0}, levels 0..{1:d}>'.format(self.meshes[0].name,
                                                               self.top_level)


def prolong(u, ladder, target_level, degree=None):
    """
    Exact prolongation of a finite element function to a finer level.

    Each node of the target space is mapped into its ancestor cell on the
    level of ``u`` through the parent maps, and ``u`` is evaluated there.

    Parameters
    ----------
    u : FEFunction
        Lives on a mesh of ``ladder``.

    ladder : RefinementLadder

    target_level : int
        At least the level of ``u``.

    degree : int, optional
        Degree of the target space (Default: the degree of ``u``). The result
        equals ``u`` pointwise when ``degree`` is at least the degree of ``u``.

    Returns
    -------
    fine : FEFunction

    Raises
    ------
    MeasfemError
        If a node lies outside its ancestor cell, i.e. the parent maps are
        inconsistent with the geometry.
    """
    source = ladder.level_of(u.space.mesh)
    degree = u.space.degree if degree is None else int(degree)
    if target_level < source:
        raise ValueError('cannot prolong from level {0:d} to coarser level {1:d}'.format(
            source, target_level))
    if degree < u.space.degree:
        logger.warning('prolonging P%d into P%d interpolates rather than embeds',
                       u.space.degree, degree)
    target = ladder.space(target_level, degree)
    if target is u.space:
        return FEFunction(target, u.coefficients.copy())

    nloc = target.n_local
    owner = np.empty(target.n_dofs, dtype=np.int64)
    owner[target.cell_dofs.ravel()] = np.repeat(np.arange(target.mesh.n_cells), nloc)
    coarse_cells = ladder.ancestors(target_level, source)[owner]

    coarse = u.space
    bary = barycentric(coarse.mesh, coarse_cells, target.dof_coords)
    if bary.min() < -ANCESTOR_TOL:
        worst = int(np.argmin(bary.min(axis=1)))
        raise MeasfemError('node {0:d} of level {1:d} lies outside its ancestor cell {2:d} '
                           'on level {3:d}'.format(worst, target_level,
                                                   int(coarse_cells[worst]), source))
    bary = np.clip(bary, 0.0, 1.0)
    bary /= bary.sum(axis=1, keepdims=True)
    phi, _ = eval_basis(coarse.degree, coarse.dim, bary)
    values = np.einsum('nl,nl->n', phi, u.coefficients[coarse.cell_dofs[coarse_cells]])
    return FEFunction(target, values)


def _integrate(space, coefficients, cells, norm, exact=None, rule_degree=None):
    """``int |e|^2`` or ``int |grad e|^2`` over the given cells.

    ``e`` is the finite element function minus ``exact`` (a value or
    gradient callable) when one is given.
    """
    if norm not in NORMS:
        raise ValueError('norm must be one of {0}, got {1!r}'.format(NORMS, norm))
    mesh = space.mesh
    if rule_degree is None:
        rule_degree = min(2 * space.degree, MAX_DEGREE)
    rule = quadrature_for(mesh.dim, rule_degree)
    phi, _ = eval_basis(space.degree, mesh.dim, rule.points)
    total = 0.0
    for block in chunks(cells.size, CELL_BLOCK):
        sub = cells[block]
        local = coefficients[space.cell_dofs[sub]]                   # (nc, nloc)
        if exact is not None:
            xq = np.einsum('qm,cmd->cqd', rule.points, mesh.vertices[mesh.cells[sub]])
        if norm == 'L2':
            err = np.einsum('ql,cl->cq', phi, local)
            if exact is not None:
                err = err - np.asarray(exact(xq.reshape(-1, mesh.dim))).reshape(err.shape)
            density = err ** 2
        else:
            grads = basis_gradients(space, rule, sub)
            err = np.einsum('cqld,cl->cqd', grads, local)
            if exact is not None:
                err = err - np.asarray(exact(xq.reshape(-1, mesh.dim))).reshape(err.shape)
            density = np.sum(err ** 2, axis=2)
        total += float(np.einsum('q,cq,c->', rule.weights, density, mesh.volumes[sub]))
    return total


def _region_cells(mesh, region):
    cells = select_cells(mesh, region)
    if cells.size == 0:
        raise EmptyRegionError(region.name)
    return cells


def error_norm(u_l, u_ref, region, norm, ladder):
    """
    Error of a coarse solution against a reference solution on a subdomain.

    Both functions are prolonged into the reference-level space of the
    larger of their degrees; the squared error is integrated over the
    reference-level cells selected by ``region``.

    Parameters
    ----------
    u_l : FEFunction
        A solution on a level below (or at) the reference level.

    u_ref : FEFunction
        The reference solution.

    region : RegionPredicate

    norm : str
        'L2' or 'H1seminorm'.

    ladder : RefinementLadder

    Returns
    -------
    error : float

    Raises
    ------
    EmptyRegionError
        If ``region`` selects no reference-level cell.
    """
    level = ladder.level_of(u_ref.space.mesh)
    degree = max(u_l.space.degree, u_ref.space.degree)
    diff = _difference(u_l, u_ref, ladder, level, degree)
    cells = _region_cells(diff.space.mesh, region)
    return float(np.sqrt(_integrate(diff.space, diff.coefficients, cells, norm)))


def _difference(u_l, u_ref, ladder, level, degree):
    fine = prolong(u_l, ladder, level, degree)
    ref = prolong(u_ref, ladder, level, degree)
    return FEFunction(fine.space, fine.coefficients - ref.coefficients)


class ManufacturedSolution(object):
    def __init__(self, name, value, gradient, source):
        """A smooth exact solution with its source term ``f = -Laplace u``."""
        self.name = name
        self.value = value
        self.gradient = gradient
        self.source = source

    def __repr__(self):
        return 'ManufacturedSolution({0!r})'.format(self.name)


def _sine(x):
    return np.prod(np.sin(np.pi * x), axis=1)


def _sine_gradient(x):
    s, c = np.sin(np.pi * x), np.cos(np.pi * x)
    grad = np.empty_like(x)
    for i in range(x.shape[1]):
        others = np.prod(np.delete(s, i, axis=1), axis=1)
        grad[:, i] = np.pi * c[:, i] * others
    return grad


def _sine_source(x):
    return x.shape[1] * np.pi ** 2 * _sine(x)


MANUFACTURED = {
    'sine': ManufacturedSolution('sine', _sine, _sine_gradient, _sine_source),
}


def exact_error_norm(u, exact, region, norm, rule_degree=MAX_DEGREE):
    """
    Error of a discrete solution against a known smooth solution.

    Parameters
    ----------
    u : FEFunction

    exact : ManufacturedSolution

    region : RegionPredicate

    norm : str
        'L2' or 'H1seminorm'.

    rule_degree : int, optional
        Quadrature exactness (Default: 6).

    Returns
    -------
    error : float
    """
    cells = _region_cells(u.space.mesh, region)
    target = exact.value if norm == 'L2' else exact.gradient
    return float(np.sqrt(_integrate(u.space, u.coefficients, cells, norm, target, rule_degree)))


def compute_rates(errors):
    """
    Empirical orders of convergence ``log2(e[l-1] / e[l])``.

    Returns
    -------
    rates : ndarray
        Same length as ``errors``; NaN for the first level and wherever an
        error is not positive.
    """
    errors = np.asarray(errors, dtype=float)
    rates = np.full(errors.size, np.nan)
    if errors.size > 1:
        prev, cur = errors[:-1], errors[1:]
        ok = (prev > 0) & (cur > 0) & np.isfinite(prev) & np.isfinite(cur)
        rates[1:][ok] = np.log2(prev[ok] / cur[ok])
    return rates


class ConvergenceReport(object):
    def __init__(self, levels, h, n_dofs, errors, metadata=None, discrepancies=None):
        """
        Errors and rates of a convergence study.

        Parameters
        ----------
        levels : list of int

        h : list of float
            Mesh size per level.

        n_dofs : list of int

        errors : OrderedDict
            Maps ``(norm, region_name)`` to the per-level errors.

        metadata : dict, optional
            Domain, degree, scheme, reference level and degree.

        discrepancies : list of float, optional
            Per-level relative difference between the two schemes.
        """
        self.levels = [int(l) for l in levels]
        self.h = [float(v) for v in h]
        self.n_dofs = [int(n) for n in n_dofs]
        self.errors = OrderedDict((key, [float(e) for e in values])
                                  for key, values in errors.items())
        for values in self.errors.values():
            assert len(values) == len(self.levels), "one error per level"
        self.metadata = dict(metadata or {})
        self.discrepancies = None if discrepancies is None else [float(d) for d in discrepancies]

    @property
    def columns(self):
        return list(self.errors)

    def rates(self, norm, region):
        return compute_rates(self.errors[(norm, region)])

    def error(self, norm, region):
        return np.array(self.errors[(norm, region)])

    def _header(self):
        keys = ('domain', 'degree', 'scheme', 'oracle', 'reference_level', 'reference_degree')
        return ', '.join('{0}={1}'.format(k, self.metadata[k]) for k in keys
                         if k in self.metadata)

    def to_csv(self):
        """One row per level: level, h, n_dofs, then error and rate per column."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        header = ['level', 'h', 'n_dofs']
        for norm, region in self.columns:
            header += ['{0}[{1}]'.format(norm, region), 'rate_{0}[{1}]'.format(norm, region)]
        if self.discrepancies is not None:
            header.append('discrepancy')
        writer.writerow(header)
        rates = [self.rates(*key) for key in self.columns]
        for i, level in enumerate(self.levels):
            row = [str(level), '{0:.6e}'.format(self.h[i]), str(self.n_dofs[i])]
            for key, r in zip(self.columns, rates):
                row += ['{0:.6e}'.format(self.errors[key][i]), _fmt_rate(r[i], 'nan')]
            if self.discrepancies is not None:
                row.append('{0:.3e}'.format(self.discrepancies[i]))
            writer.writerow(row)
        return out.getvalue()

    def to_markdown(self):
        """An aligned markdown table, one error/rate column pair per (norm, region)."""
        header = ['N_ref', 'h']
        for norm, region in self.columns:
            header += ['{0}({1})'.format(norm, region), 'Rate']
        if self.discrepancies is not None:
            header.append('discrepancy')
        rates = [self.rates(*key) for key in self.columns]
        body = []
        for i, level in enumerate(self.levels):
            row = [str(level), '{0:.3e}'.format(self.h[i])]
            for key, r in zip(self.columns, rates):
                row += ['{0:.2e}'.format(self.errors[key][i]), _fmt_rate(r[i], '-')]
            if self.discrepancies is not None:
                row.append('{0:.1e}'.format(self.discrepancies[i]))
            body.append(row)
        widths = [max(len(r[j]) for r in [header] + body) for j in range(len(header))]

        def line(cells):
            return '| ' + ' | '.join(c.rjust(w) for c, w in zip(cells, widths)) + ' |'

        lines = []
        if self.metadata:
            lines += ['<!-- {0} -->'.format(self._header()), '']
        lines.append(line(header))
        lines.append('|' + '|'.join('-' * (w + 1) + ':' for w in widths) + '|')
        lines += [line(r) for r in body]
        return '\n'.join(lines) + '\n'

    def write(self, directory, csv_name=None, markdown_name=None):
        """Writes the CSV and/or markdown renderings into ``directory``."""
        written = []
        if csv_name or markdown_name:
            os.makedirs(directory, exist_ok=True)
        for name, render in ((csv_name, self.to_csv), (markdown_name, self.to_markdown)):
            if name:
                path = os.path.join(directory, name)
                with open(path, 'w') as f:
                    f.write(render())
                written.append(path)
                logger.info('wrote %s', path)
        return written

    def __repr__(self):
        return '<ConvergenceReport {0}: levels {1}>'.format(self._header(), self.levels)


def _fmt_rate(value, missing):
    return missing if np.isnan(value) else '{0:.4f}'.format(value)


def _solve_level(V, A, data, config, level, stage):
    start = time.perf_counter()
    discrepancy = None
    if config.scheme == 'both':
        system = assemble_system(V, A, data)
        std = solve(V, A, data, 'standard', tol=config.solver_tol, system=system, stage=stage)
        berg = solve(V, A, data, 'berggren', tol=config.solver_tol, system=system, stage=stage)
        discrepancy = relative_discrepancy(std.u.coefficients, berg.u.coefficients)
        solution = std
    else:
        solution = solve(V, A, data, config.scheme, tol=config.solver_tol, stage=stage)
    logger.info('%s: P%d, %d dofs, %s iterations, %.2fs', stage, V.degree, V.n_dofs,
                '+'.join(str(i) for i in solution.iterations), time.perf_counter() - start)
    return solution, discrepancy


def run_study(config, degree=None, threads=None, ladder=None):
    """
    Runs the convergence study described by an experiment configuration.

    Parameters
    ----------
    config : ExperimentConfig

    degree : int, optional
        Which of ``config.degrees`` to run (Default: the first).

    threads : int, optional
        Worker threads for the study levels (Default: ``MEASFEM_THREADS``
        or 1). Results do not depend on the thread count.

    ladder : RefinementLadder, optional
        Reuse meshes built for another degree.

    Returns
    -------
    report : ConvergenceReport

    Raises
    ------
    SolverError
        With ``stage`` naming the failing level.
    """
    degree = config.degrees[0] if degree is None else int(degree)
    if threads is None:
        threads = thread_count()
    first, last = config.levels
    levels = list(range(first, last + 1))
    exact = config.oracle == 'exact'
    ref_level = last if exact else config.reference_level
    ref_degree = config.reference_degree_for(degree)

    if ladder is None:
        ladder = RefinementLadder.build(config.build_mesh(), ref_level)
    elif ladder.top_level < ref_level:
        raise ValueError('ladder stops at level {0:d}, the study needs {1:d}'.format(
            ladder.top_level, ref_level))
    mesh0 = ladder.mesh(0)
    A = CoefficientField.identity(mesh0.dim)
    data = config.build_data()
    regions = config.build_regions()

    logger.info('%s: P%d study on levels %d..%d (%s oracle%s)', config.name, degree, first,
                last, config.oracle,
                '' if exact else ', reference level {0:d}, P{1:d}'.format(ref_level, ref_degree))

    reference = None
    if not exact:
        V_ref = ladder.space(ref_level, ref_degree)
        reference, _ = _solve_level(V_ref, A, data, config, ref_level,
                                    'reference level {0:d}'.format(ref_level))

    def work(level):
        V = ladder.space(level, degree)
        return _solve_level(V, A, data, config, level, 'level {0:d}'.format(level))

    if threads > 1 and len(levels) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, levels))
    else:
        results = [work(level) for level in levels]

    errors = OrderedDict(((norm, region.name), []) for norm in config.norms
                         for region in regions)
    for level, (solution, _) in zip(levels, results):
        if exact:
            manufactured = MANUFACTURED[config.measure.smooth]
            for norm in config.norms:
                for region in regions:
                    errors[(norm, region.name)].append(
                        exact_error_norm(solution.u, manufactured, region, norm))
        else:
            diff = _difference(solution.u, reference.u, ladder, ref_level,
                               max(degree, ref_degree))
            for region in regions:
                cells = _region_cells(diff.space.mesh, region)
                for norm in config.norms:
                    value = _integrate(diff.space, diff.coefficients, cells, norm)
                    errors[(norm, region.name)].append(float(np.sqrt(value)))

    discrepancies = None
    if config.scheme == 'both':
        discrepancies = [d for _, d in results]
    metadata = OrderedDict([('domain', config.domain.kind), ('degree', degree),
                            ('scheme', config.scheme), ('oracle', config.oracle)])
    if not exact:
        metadata['reference_level'] = ref_level
        metadata['reference_degree'] = ref_degree
    return ConvergenceReport(levels, [mesh_size(ladder.mesh(l)) for l in levels],
                             [ladder.space(l, degree).n_dofs for l in levels],
                             errors, metadata, discrepancies)


def run_studies(config, threads=None):
    """
    Runs `run_study` for every degree of the configuration on one ladder.

    Returns
    -------
    reports : list of ConvergenceReport
    """
    first, last = config.levels
    top = last if config.oracle == 'exact' else config.reference_level
    ladder = RefinementLadder.build(config.build_mesh(), top)
    return [run_study(config, degree=k, threads=threads, ladder=ladder)
            for k in config.degrees]
