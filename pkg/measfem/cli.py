"""
Command-line interface

    measfem run --preset example1 --degree 1 --out results
    measfem run --config study.json
    measfem mesh --preset example2 --refine 2 --out hexagon2.txt
    measfem solve --preset example1 --level 3 --export u.txt
    measfem check-equivalence --preset example1 --degree 1 --level 2
    measfem presets --dump example3

Exit status is 0 on success, 1 on a failed run, 2 for configuration or
argument errors and 3 when the linear solver does not converge.
"""

import argparse
import logging
import os
import sys

from measfem import __version__
from measfem.analysis import run_studies
from measfem.assembly import CoefficientField
from measfem.config import PRESETS, dump_config, load_config, preset
from measfem.errors import ConfigError, MeasfemError, SolverError
from measfem.fespace import DEGREES, build_space
from measfem.mesh import refine_uniform, write_mesh
from measfem.scheme import DEFAULT_TOL, SCHEMES, check_equivalence, solve, write_solution
from measfem.utils import configure_logging, thread_count

__all__ = ['main', 'build_parser', 'UsageError']

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(Exception):
    """A bad argument or environment setting found after parsing."""


def _level_range(text):
    try:
        first, last = (int(v) for v in text.split('..'))
    except ValueError:
        raise argparse.ArgumentTypeError('expected A..B, got {0!r}'.format(text))
    if first < 0 or last < first:
        raise argparse.ArgumentTypeError('need 0 <= A <= B, got {0!r}'.format(text))
    return first, last


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError('must be a positive integer')
    return value


def _add_source(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--preset', choices=list(PRESETS), help='a built-in experiment')
    group.add_argument('--config', metavar='FILE', help='a JSON experiment configuration')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='measfem',
        description='Finite element convergence studies for elliptic problems with '
                    'measure data.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='more output (repeat for debug messages)')
    parser.add_argument('-q', '--quiet', action='store_true', help='only report errors')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    run = commands.add_parser('run', help='run a convergence study')
    _add_source(run)
    run.add_argument('--degree', type=int, action='append', choices=DEGREES,
                     help='polynomial degree; repeat for several')
    run.add_argument('--levels', type=_level_range, metavar='A..B',
                     help='study levels, inclusive')
    run.add_argument('--scheme', choices=SCHEMES + ('both',))
    run.add_argument('--out', metavar='DIR', help='directory for the CSV and markdown reports')
    run.add_argument('--threads', type=_positive,
                     help='worker threads for level-parallel solves '
                          '(default: $MEASFEM_THREADS or 1)')

    mesh = commands.add_parser('mesh', help='write a refined preset mesh')
    _add_source(mesh)
    mesh.add_argument('--refine', type=int, default=0, metavar='L')
    mesh.add_argument('--out', required=True, metavar='FILE')

    solve_cmd = commands.add_parser('solve', help='solve on one level and export the solution')
    _add_source(solve_cmd)
    solve_cmd.add_argument('--degree', type=int, choices=DEGREES)
    solve_cmd.add_argument('--level', type=int, default=0, metavar='L')
    solve_cmd.add_argument('--scheme', choices=SCHEMES, default='standard')
    solve_cmd.add_argument('--export', required=True, metavar='FILE')

    check = commands.add_parser('check-equivalence',
                                help='compare the standard and very weak schemes')
    _add_source(check)
    check.add_argument('--degree', type=int, choices=DEGREES)
    check.add_argument('--level', type=int, default=0, metavar='L')
    check.add_argument('--tol', type=float, default=DEFAULT_TOL, help='CG tolerance')
    check.add_argument('--threshold', type=float, default=1e-8,
                       help='largest accepted relative discrepancy')

    presets = commands.add_parser('presets', help='list presets or print one as JSON')
    presets.add_argument('--dump', choices=list(PRESETS), metavar='NAME')
    presets.add_argument('--degree', type=int, choices=DEGREES, default=1)
    return parser


def _configs(args, degrees=None):
    """The configurations selected by ``--preset``/``--config`` and overrides."""
    if args.preset:
        return [preset(args.preset, k) for k in (degrees or [1])]
    config = load_config(args.config)
    if degrees:
        config = config.with_overrides(degrees=tuple(degrees))
    return [config]


def _single_config(args):
    config = _configs(args, [args.degree] if args.degree else None)[0]
    return config, args.degree or config.degree


def _level_mesh(config, level):
    if level < 0:
        raise UsageError('level must be nonnegative, got {0:d}'.format(level))
    return refine_uniform(config.build_mesh(), level)


def _suffixed(name, degree, several):
    if not name or not several:
        return name
    stem, ext = os.path.splitext(name)
    return '{0}_p{1:d}{2}'.format(stem, degree, ext)


def cmd_run(args):
    try:
        threads = args.threads or thread_count()
    except ValueError as err:
        raise UsageError(str(err))
    for config in _configs(args, args.degree):
        config = config.with_overrides(levels=args.levels, scheme=args.scheme)
        out_dir = args.out or config.output.dir
        several = len(config.degrees) > 1
        csv_name = config.output.csv or config.name + '.csv'
        markdown_name = config.output.markdown or config.name + '.md'
        for report in run_studies(config, threads=threads):
            k = report.metadata['degree']
            report.write(out_dir, _suffixed(csv_name, k, several),
                         _suffixed(markdown_name, k, several))
            print('{0}, P{1:d}'.format(config.name, k))
            print(report.to_markdown())
    return EXIT_OK


def cmd_mesh(args):
    config = _configs(args)[0]
    mesh = _level_mesh(config, args.refine)
    write_mesh(mesh, args.out)
    print(mesh)
    return EXIT_OK


def cmd_solve(args):
    config, degree = _single_config(args)
    mesh = _level_mesh(config, args.level)
    V = build_space(mesh, degree)
    solution = solve(V, CoefficientField.identity(mesh.dim), config.build_data(), args.scheme,
                     tol=config.solver_tol, stage='level {0:d}'.format(args.level))
    write_solution(solution, args.export)
    print('{0}: P{1:d} on level {2:d}, {3:d} dofs, iterations {4}'.format(
        config.name, degree, args.level, V.n_dofs,
        '+'.join(str(i) for i in solution.iterations)))
    return EXIT_OK


def cmd_check_equivalence(args):
    config, degree = _single_config(args)
    mesh = _level_mesh(config, args.level)
    V = build_space(mesh, degree)
    discrepancy, _, _ = check_equivalence(V, CoefficientField.identity(mesh.dim),
                                          config.build_data(), tol=args.tol)
    print('{0}: P{1:d}, level {2:d}, {3:d} dofs: max relative discrepancy {4:.3e}'.format(
        config.name, degree, args.level, V.n_dofs, discrepancy))
    if discrepancy > args.threshold:
        print('measfem: discrepancy exceeds {0:.1e}'.format(args.threshold), file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_presets(args):
    if args.dump:
        sys.stdout.write(dump_config(preset(args.dump, args.degree)))
    else:
        for name in PRESETS:
            print(name)
    return EXIT_OK


COMMANDS = {
    'run': cmd_run,
    'mesh': cmd_mesh,
    'solve': cmd_solve,
    'check-equivalence': cmd_check_equivalence,
    'presets': cmd_presets,
}


def main(argv=None):
    """
    Entry point of the ``measfem`` command.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name (Default: ``sys.argv[1:]``).

    Returns
    -------
    status : int
        The exit status.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as err:
        print('measfem: configuration error: {0}'.format(err), file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as err:
        print('measfem: solver failure: {0}'.format(err), file=sys.stderr)
        return EXIT_SOLVER
    except MeasfemError as err:
        print('measfem: {0}: {1}'.format(args.command, err), file=sys.stderr)
        return EXIT_FAILURE
    except UsageError as err:
        print('measfem: invalid argument: {0}'.format(err), file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as err:
        logger.debug('%s failed', args.command, exc_info=True)
        print('measfem: {0}: {1}'.format(args.command, err), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
