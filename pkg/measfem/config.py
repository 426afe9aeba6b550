"""
Experiment configuration

An `ExperimentConfig` describes one convergence study: the domain, the
polynomial degree(s), the scheme, the refinement levels, the right-hand
side and the error regions. Configurations are read from and written to
JSON; `preset` returns the configurations of the built-in experiments.
"""

import json
import logging

import numpy as np

from measfem.analysis import MANUFACTURED, NORMS
from measfem.errors import ConfigError
from measfem.fespace import DEGREES
from measfem.measures import (CURVES, DEFAULT_SAMPLES, CurveAtom, MeasureData, PointAtom,
                              resolve_curves, sample_curve)
from measfem.mesh import (RegionPredicate, generate_cube, generate_hexagon, generate_lshape,
                          generate_unit_square, hexagon_vertices)
from measfem.scheme import DEFAULT_TOL, SCHEMES

__all__ = ['ExperimentConfig', 'DomainSpec', 'MeasureSpec', 'PointSpec', 'CurveSpec',
           'RegionSpec', 'OutputSpec', 'PRESETS', 'preset', 'load_config', 'dump_config']

logger = logging.getLogger(__name__)

DOMAINS = {'lshape': 2, 'hexagon': 2, 'unit_square': 2, 'cube': 3}
ORACLES = ('reference', 'exact')
STUDY_SCHEMES = SCHEMES + ('both',)


class _Record(object):
    """Value equality, hashing and repr over the attributes named in ``FIELDS``"""
    FIELDS = ()

    def _values(self):
        return tuple(getattr(self, name) for name in self.FIELDS)

    def replace(self, **changes):
        """A copy with some attributes changed, validated again."""
        kwargs = dict(zip(self.FIELDS, self._values()))
        kwargs.update(changes)
        return type(self)(**kwargs)

    def __eq__(self, other):
        return type(self) is type(other) and self._values() == other._values()

    def __hash__(self):
        return hash((type(self).__name__,) + self._values())

    def __repr__(self):
        return '{0}({1})'.format(type(self).__name__, ', '.join(
            '{0}={1!r}'.format(name, value) for name, value in zip(self.FIELDS, self._values())))


def _tuple(value):
    return None if value is None else tuple(value)


class DomainSpec(_Record):
    FIELDS = ('kind', 'n', 'pre_refinements')

    def __init__(self, kind, n=None, pre_refinements=None):
        """
        The level-0 mesh of a study.

        Parameters
        ----------
        kind : str
            One of 'lshape', 'hexagon', 'unit_square' or 'cube'.

        n : int, optional
            Squares (cubes) per unit length. Required except for the hexagon.

        pre_refinements : int, optional
            Uniform refinements of the hexagon fan (Default: 1). Hexagon only.
        """
        if kind not in DOMAINS:
            raise ConfigError('domain.kind', 'must be one of {0}, got {1!r}'.format(
                sorted(DOMAINS), kind))
        if kind == 'hexagon':
            if n is not None:
                raise ConfigError('domain.n', 'the hexagon takes pre_refinements, not n')
            _check_int('domain.pre_refinements', pre_refinements, 0, optional=True)
        else:
            if pre_refinements is not None:
                raise ConfigError('domain.pre_refinements', 'only the hexagon takes it')
            _check_int('domain.n', n, 1)
        self.kind = kind
        self.n = n
        self.pre_refinements = pre_refinements

    @property
    def dim(self):
        return DOMAINS[self.kind]

    def build(self):
        """Generates the level-0 mesh."""
        if self.kind == 'lshape':
            return generate_lshape(self.n)
        if self.kind == 'unit_square':
            return generate_unit_square(self.n)
        if self.kind == 'cube':
            return generate_cube(self.n)
        subdivisions = 1 if self.pre_refinements is None else self.pre_refinements
        return generate_hexagon(subdivisions)


class PointSpec(_Record):
    FIELDS = ('x', 'w')

    def __init__(self, x, w=1.0):
        self.x = tuple(x)
        self.w = w


class CurveSpec(_Record):
    FIELDS = ('curve', 'w', 'samples')

    def __init__(self, curve, w=1.0, samples=DEFAULT_SAMPLES):
        """
        A line source.

        Parameters
        ----------
        curve : str or sequence
            A preset curve name, or polyline rows ``(t, x_1, ..., x_d)``.

        w : float, optional
            Weight (Default: 1).

        samples : int, optional
            Initial samples of a preset curve, before `resolve_curves`.
        """
        self.curve = curve if isinstance(curve, str) else tuple(tuple(r) for r in curve)
        self.w = w
        self.samples = samples

    def build(self):
        if isinstance(self.curve, str):
            return sample_curve(self.curve, self.w, self.samples)
        rows = np.array(self.curve, dtype=float)
        return CurveAtom(rows[:, 0], rows[:, 1:], self.w)


class MeasureSpec(_Record):
    FIELDS = ('points', 'curves', 'smooth', 'total_variation')

    def __init__(self, points=(), curves=(), smooth=None, total_variation=None):
        """
        The right-hand side: point and curve atoms, or a smooth source.

        Parameters
        ----------
        points : sequence of PointSpec

        curves : sequence of CurveSpec

        smooth : str, optional
            Name of a manufactured solution; excludes atoms.

        total_variation : float, optional
            Declared total variation norm, reported with the results.
        """
        points, curves = tuple(points), tuple(curves)
        if smooth is not None:
            if points or curves:
                raise ConfigError('measure', 'a smooth source excludes points and curves')
            if smooth not in MANUFACTURED:
                raise ConfigError('measure.smooth', 'must be one of {0}, got {1!r}'.format(
                    sorted(MANUFACTURED), smooth))
        elif not points and not curves:
            raise ConfigError('measure', 'needs points, curves or a smooth source')
        self.points = points
        self.curves = curves
        self.smooth = smooth
        self.total_variation = total_variation

    @property
    def is_smooth(self):
        return self.smooth is not None

    def build(self):
        """
        The right-hand side: a `MeasureData` with resolved curves, or the
        source term of the manufactured solution.
        """
        if self.is_smooth:
            return MANUFACTURED[self.smooth].source
        mu = MeasureData([PointAtom(p.x, p.w) for p in self.points],
                         [c.build() for c in self.curves], self.total_variation)
        return resolve_curves(mu)


class RegionSpec(_Record):
    FIELDS = ('name', 'kind', 'center', 'radius')

    def __init__(self, name, kind='whole_domain', center=None, radius=0.0):
        self.name = name
        self.kind = kind
        self.center = _tuple(center)
        self.radius = radius

    def build(self):
        return RegionPredicate(self.kind, self.center, self.radius, self.name)


class OutputSpec(_Record):
    FIELDS = ('dir', 'csv', 'markdown')

    def __init__(self, dir='.', csv=None, markdown=None):
        """Report directory and file names; unnamed reports are not written."""
        self.dir = dir
        self.csv = csv
        self.markdown = markdown


class ExperimentConfig(_Record):
    FIELDS = ('name', 'domain', 'measure', 'degrees', 'scheme', 'levels', 'reference_level',
              'reference_degree', 'oracle', 'regions', 'norms', 'solver_tol', 'output')

    def __init__(self, name, domain, measure, degrees=(1,), scheme='standard', levels=(0, 4),
                 reference_level=None, reference_degree=None, oracle='reference',
                 regions=(RegionSpec('Omega'),), norms=NORMS, solver_tol=DEFAULT_TOL,
                 output=None):
        """
        One convergence study.

        Parameters
        ----------
        name : str

        domain : DomainSpec

        measure : MeasureSpec

        degrees : sequence of int, optional
            Polynomial degrees to study (Default: P1 only).

        scheme : str, optional
            'standard', 'berggren' or 'both'.

        levels : (int, int), optional
            First and last refinement level of the ladder.

        reference_level : int, optional
            Level of the reference solution; above ``levels[1]``. Required
            with the reference oracle.

        reference_degree : int, optional
            Degree of the reference solution (Default: the studied degree).

        oracle : str, optional
            'reference' or 'exact' (smooth sources only).

        regions : sequence of RegionSpec, optional
            Error regions with unique names (Default: the whole domain).

        norms : sequence of str, optional

        solver_tol : float, optional
            CG relative residual tolerance.

        output : OutputSpec, optional

        Raises
        ------
        ConfigError
            Naming the first invalid field.
        """
        self.name = name
        self.domain = domain
        self.measure = measure
        self.degrees = tuple(degrees)
        self.scheme = scheme
        self.levels = tuple(levels)
        self.reference_level = reference_level
        self.reference_degree = reference_degree
        self.oracle = oracle
        self.regions = tuple(regions)
        self.norms = tuple(norms)
        self.solver_tol = solver_tol
        self.output = OutputSpec() if output is None else output
        self._validate()

    def _validate(self):
        if not self.degrees:
            raise ConfigError('degree', 'at least one degree is required')
        for i, k in enumerate(self.degrees):
            if k not in DEGREES:
                raise ConfigError('degree[{0:d}]'.format(i), 'must be one of {0}, got {1!r}'
                                  .format(DEGREES, k))
        if self.reference_degree is not None and self.reference_degree not in DEGREES:
            raise ConfigError('reference_degree', 'must be one of {0}'.format(DEGREES))
        if self.scheme not in STUDY_SCHEMES:
            raise ConfigError('scheme', 'must be one of {0}, got {1!r}'.format(
                STUDY_SCHEMES, self.scheme))
        if self.oracle not in ORACLES:
            raise ConfigError('oracle', 'must be one of {0}, got {1!r}'.format(
                ORACLES, self.oracle))
        if len(self.levels) != 2:
            raise ConfigError('levels', 'must be [first, last]')
        first, last = self.levels
        _check_int('levels[0]', first, 0)
        _check_int('levels[1]', last, first)
        if self.oracle == 'reference':
            if self.reference_level is None:
                raise ConfigError('reference_level', 'required with the reference oracle')
            _check_int('reference_level', self.reference_level, last + 1)
        elif not self.measure.is_smooth:
            raise ConfigError('oracle', 'the exact oracle needs a smooth source')
        if not self.regions:
            raise ConfigError('regions', 'at least one region is required')
        names = [r.name for r in self.regions]
        if len(set(names)) != len(names):
            raise ConfigError('regions', 'region names must be unique')
        for i, norm in enumerate(self.norms):
            if norm not in NORMS:
                raise ConfigError('norms[{0:d}]'.format(i), 'must be one of {0}, got {1!r}'
                                  .format(NORMS, norm))
        if not self.solver_tol > 0:
            raise ConfigError('solver_tol', 'must be positive')
        for i, p in enumerate(self.measure.points):
            if len(p.x) != self.domain.dim:
                raise ConfigError('measure.points[{0:d}].x'.format(i),
                                  'needs {0:d} coordinates'.format(self.domain.dim))
        for i, r in enumerate(self.regions):
            if r.kind != 'whole_domain' and len(r.center or ()) != self.domain.dim:
                raise ConfigError('regions[{0:d}].center'.format(i),
                                  'needs {0:d} coordinates'.format(self.domain.dim))

    @property
    def degree(self):
        return self.degrees[0]

    def reference_degree_for(self, k):
        return k if self.reference_degree is None else self.reference_degree

    def build_mesh(self):
        return self.domain.build()

    def build_data(self):
        """The right-hand side (see `MeasureSpec.build`)"""
        return self.measure.build()

    def build_regions(self):
        return [r.build() for r in self.regions]

    def with_overrides(self, **changes):
        """`replace` ignoring changes that are None"""
        return self.replace(**{k: v for k, v in changes.items() if v is not None})

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        data = {'name': self.name}
        data['domain'] = {'kind': self.domain.kind}
        if self.domain.n is not None:
            data['domain']['n'] = self.domain.n
        if self.domain.pre_refinements is not None:
            data['domain']['pre_refinements'] = self.domain.pre_refinements
        data['degree'] = list(self.degrees) if len(self.degrees) > 1 else self.degrees[0]
        data['scheme'] = self.scheme
        data['levels'] = list(self.levels)
        data['reference_level'] = self.reference_level
        data['reference_degree'] = self.reference_degree
        data['oracle'] = self.oracle
        if self.measure.is_smooth:
            data['measure'] = {'smooth': self.measure.smooth}
        else:
            measure = {}
            if self.measure.points:
                measure['points'] = [{'x': list(p.x), 'w': p.w} for p in self.measure.points]
            if self.measure.curves:
                measure['curves'] = [
                    {'curve': c.curve if isinstance(c.curve, str) else [list(r) for r in c.curve],
                     'w': c.w, 'samples': c.samples} for c in self.measure.curves]
            if self.measure.total_variation is not None:
                measure['total_variation'] = self.measure.total_variation
            data['measure'] = measure
        regions = []
        for r in self.regions:
            entry = {'name': r.name, 'kind': r.kind}
            if r.kind != 'whole_domain':
                entry['center'] = list(r.center)
                entry['radius'] = r.radius
            regions.append(entry)
        data['regions'] = regions
        data['norms'] = list(self.norms)
        data['solver_tol'] = self.solver_tol
        data['output'] = {'dir': self.output.dir, 'csv': self.output.csv,
                          'markdown': self.output.markdown}
        return data

    @classmethod
    def from_dict(cls, data):
        """
        Parses and validates a configuration dictionary.

        Raises
        ------
        ConfigError
            Naming the offending field.
        """
        _require_mapping('', data)
        known = {'name', 'domain', 'degree', 'scheme', 'levels', 'reference_level',
                 'reference_degree', 'oracle', 'measure', 'regions', 'norms', 'solver_tol',
                 'output'}
        for key in data:
            if key not in known:
                raise ConfigError(key, 'unknown field')
        kwargs = {}
        kwargs['name'] = _typed('name', data.get('name', 'experiment'), str)
        kwargs['domain'] = _parse_domain(_required(data, 'domain', ''))
        kwargs['measure'] = _parse_measure(_required(data, 'measure', ''))
        if 'degree' in data:
            degree = data['degree']
            if isinstance(degree, list):
                kwargs['degrees'] = tuple(_typed('degree[{0:d}]'.format(i), k, int)
                                          for i, k in enumerate(degree))
            else:
                kwargs['degrees'] = (_typed('degree', degree, int),)
        for key, kind in (('scheme', str), ('oracle', str), ('solver_tol', float)):
            if key in data:
                kwargs[key] = _typed(key, data[key], kind)
        for key in ('reference_level', 'reference_degree'):
            if data.get(key) is not None:
                kwargs[key] = _typed(key, data[key], int)
        if 'levels' in data:
            levels = _typed('levels', data['levels'], list)
            kwargs['levels'] = tuple(_typed('levels[{0:d}]'.format(i), v, int)
                                     for i, v in enumerate(levels))
        if 'regions' in data:
            kwargs['regions'] = tuple(_parse_region('regions[{0:d}]'.format(i), r)
                                      for i, r in enumerate(_typed('regions', data['regions'],
                                                                   list)))
        if 'norms' in data:
            kwargs['norms'] = tuple(_typed('norms[{0:d}]'.format(i), n, str)
                                    for i, n in enumerate(_typed('norms', data['norms'], list)))
        if 'output' in data:
            out = data['output']
            _require_mapping('output', out)
            kwargs['output'] = OutputSpec(
                dir=_typed('output.dir', out.get('dir', '.'), str),
                csv=_typed('output.csv', out['csv'], str) if out.get('csv') else None,
                markdown=(_typed('output.markdown', out['markdown'], str)
                          if out.get('markdown') else None))
        return cls(**kwargs)


# -- parsing helpers ----------------------------------------------------------

def _check_int(path, value, minimum, optional=False):
    if value is None and optional:
        return
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ConfigError(path, 'must be an integer >= {0:d}, got {1!r}'.format(minimum, value))


def _require_mapping(path, value):
    if not isinstance(value, dict):
        raise ConfigError(path or '<root>', 'must be an object')


def _required(data, key, prefix):
    if key not in data:
        raise ConfigError(prefix + key, 'is required')
    return data[key]


def _typed(path, value, kind):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(path, 'must be an integer, got {0!r}'.format(value))
    if not isinstance(value, kind):
        raise ConfigError(path, 'must be {0}, got {1!r}'.format(
            {int: 'an integer', float: 'a number', str: 'a string', list: 'a list'}[kind],
            value))
    return value


def _coords(path, value):
    values = _typed(path, value, list)
    return tuple(_typed('{0}[{1:d}]'.format(path, i), v, float) for i, v in enumerate(values))


def _parse_domain(data):
    _require_mapping('domain', data)
    kind = _typed('domain.kind', _required(data, 'kind', 'domain.'), str)
    n = data.get('n')
    pre = data.get('pre_refinements')
    return DomainSpec(kind, None if n is None else _typed('domain.n', n, int),
                      None if pre is None else _typed('domain.pre_refinements', pre, int))


def _parse_measure(data):
    _require_mapping('measure', data)
    if 'smooth' in data:
        return MeasureSpec(smooth=_typed('measure.smooth', data['smooth'], str))
    points = []
    for i, p in enumerate(_typed('measure.points', data.get('points', []), list)):
        path = 'measure.points[{0:d}]'.format(i)
        _require_mapping(path, p)
        points.append(PointSpec(_coords(path + '.x', _required(p, 'x', path + '.')),
                                _typed(path + '.w', p.get('w', 1.0), float)))
    curves = []
    for i, c in enumerate(_typed('measure.curves', data.get('curves', []), list)):
        path = 'measure.curves[{0:d}]'.format(i)
        _require_mapping(path, c)
        curve = _required(c, 'curve', path + '.')
        if isinstance(curve, str):
            if curve not in CURVES:
                raise ConfigError(path + '.curve', 'unknown preset {0!r}; presets are {1}'.format(
                    curve, sorted(CURVES)))
        else:
            rows = _typed(path + '.curve', curve, list)
            curve = tuple(_coords('{0}.curve[{1:d}]'.format(path, j), r)
                          for j, r in enumerate(rows))
            t = [r[0] for r in curve]
            if len(curve) < 2 or any(b <= a for a, b in zip(t[:-1], t[1:])):
                raise ConfigError(path + '.curve',
                                  'needs at least two samples with increasing t')
        samples = _typed(path + '.samples', c.get('samples', DEFAULT_SAMPLES), int)
        if samples < 2:
            raise ConfigError(path + '.samples', 'must be at least 2')
        curves.append(CurveSpec(curve, _typed(path + '.w', c.get('w', 1.0), float), samples))
    tv = data.get('total_variation')
    return MeasureSpec(tuple(points), tuple(curves), None,
                       None if tv is None else _typed('measure.total_variation', tv, float))


def _parse_region(path, data):
    _require_mapping(path, data)
    name = _typed(path + '.name', _required(data, 'name', path + '.'), str)
    kind = _typed(path + '.kind', data.get('kind', 'whole_domain'), str)
    if kind not in RegionPredicate.KINDS:
        raise ConfigError(path + '.kind', 'must be one of {0}, got {1!r}'.format(
            RegionPredicate.KINDS, kind))
    if kind == 'whole_domain':
        return RegionSpec(name)
    radius = _typed(path + '.radius', _required(data, 'radius', path + '.'), float)
    if radius < 0:
        raise ConfigError(path + '.radius', 'must be nonnegative')
    return RegionSpec(name, kind, _coords(path + '.center',
                                          _required(data, 'center', path + '.')), radius)


def load_config(path):
    """
    Reads an `ExperimentConfig` from a JSON file.

    Raises
    ------
    ConfigError
        If the file is missing, is not valid JSON, or fails validation.
    """
    try:
        with open(path) as f:
            text = f.read()
    except OSError as err:
        raise ConfigError(str(path), 'cannot be read ({0})'.format(err.strerror or err))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError('{0}: line {1:d}, column {2:d}'.format(path, err.lineno, err.colno),
                          err.msg)
    return ExperimentConfig.from_dict(data)


def dump_config(config, path=None):
    """Serializes a configuration to JSON; writes it to ``path`` if given."""
    text = json.dumps(config.to_dict(), indent=2) + '\n'
    if path is not None:
        with open(path, 'w') as f:
            f.write(text)
    return text


# -- presets ------------------------------------------------------------------

def _example1(degree):
    return ExperimentConfig(
        name='example1',
        domain=DomainSpec('lshape', n=4),
        measure=MeasureSpec(points=(PointSpec((-0.5, 0.5), 1.0),)),
        degrees=(degree,), levels=(0, 4), reference_level=6,
        regions=(RegionSpec('Omega'),
                 RegionSpec('Omega\\B1', 'ball_complement', (-0.5, 0.5), 1 / 6.),
                 RegionSpec('Omega\\B2', 'ball_complement', (-0.5, 0.5), 1 / 10.),
                 RegionSpec('B3', 'ball', (0.0, 0.0), 1 / 6.)),
        output=OutputSpec('.', 'example1_p{0:d}.csv'.format(degree),
                          'example1_p{0:d}.md'.format(degree)))


def _example2(degree):
    v6 = tuple(float(c) for c in hexagon_vertices()[5])
    return ExperimentConfig(
        name='example2',
        domain=DomainSpec('hexagon', pre_refinements=1),
        measure=MeasureSpec(points=(PointSpec((0.0, 0.0), 1.0),)),
        degrees=(degree,), levels=(0, 4), reference_level=6,
        regions=(RegionSpec('Omega'),
                 RegionSpec('Omega\\B1', 'ball_complement', (0.0, 0.0), 1 / 6.),
                 RegionSpec('Omega\\B2', 'ball_complement', (0.0, 0.0), 1 / 10.),
                 RegionSpec('B3', 'ball', v6, 1 / 6.)),
        output=OutputSpec('.', 'example2_p{0:d}.csv'.format(degree),
                          'example2_p{0:d}.md'.format(degree)))


def _example3(degree):
    reference = 5 if degree == 1 else 4
    if degree > 1:
        logger.warning('example3: P%d reference capped at level 4', degree)
    center = (0.5, 0.5, 0.5)
    return ExperimentConfig(
        name='example3',
        domain=DomainSpec('cube', n=2),
        measure=MeasureSpec(curves=(CurveSpec('lambda1', 1.6), CurveSpec('lambda2', 0.8),
                                    CurveSpec('lambda3', 1.2))),
        degrees=(degree,), levels=(0, 3), reference_level=reference, solver_tol=1e-10,
        regions=(RegionSpec('Omega'),
                 RegionSpec('Omega\\B1', 'ball_complement', center, 0.3),
                 RegionSpec('Omega\\B2', 'ball_complement', center, 0.4)),
        output=OutputSpec('.', 'example3_p{0:d}.csv'.format(degree),
                          'example3_p{0:d}.md'.format(degree)))


def _calibration(degree):
    return ExperimentConfig(
        name='calibration',
        domain=DomainSpec('unit_square', n=2),
        measure=MeasureSpec(smooth='sine'),
        degrees=(degree,), levels=(1, 5), oracle='exact', solver_tol=1e-10,
        output=OutputSpec('.', 'calibration_p{0:d}.csv'.format(degree),
                          'calibration_p{0:d}.md'.format(degree)))


PRESETS = {
    'example1': _example1,
    'example2': _example2,
    'example3': _example3,
    'calibration': _calibration,
}


def preset(name, degree=1):
    """
    A built-in experiment.

    Parameters
    ----------
    name : str
        'example1' (point source in the L-shape), 'example2' (point source
        in the hexagon, corner region), 'example3' (line sources in the
        cube) or 'calibration' (smooth manufactured solution).

    degree : int, optional
        Polynomial degree (Default: 1).

    Returns
    -------
    config : ExperimentConfig

    Raises
    ------
    ValueError
        If ``name`` is not a preset.
    """
    try:
        build = PRESETS[name]
    except KeyError:
        raise ValueError('unknown preset {0!r}; choose from {1}'.format(name, list(PRESETS)))
    if degree not in DEGREES:
        raise ValueError('degree must be one of {0}, got {1!r}'.format(DEGREES, degree))
    return build(int(degree))
