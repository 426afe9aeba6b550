"""
Finite measures used as right-hand sides

A `MeasureData` is a finite sum of weighted Dirac point atoms and weighted
line atoms supported on polylines. Curves given analytically (the three
helical curves in the unit cube) are sampled into polylines; the sampling
is refined by halving until the polyline length settles.
"""

import logging

import numpy as np

from measfem.errors import MeasureLocationError
from measfem.mesh import distance_to_boundary, locate_points

__all__ = ['PointAtom', 'CurveAtom', 'MeasureData', 'CURVES', 'curve_points',
           'sample_curve', 'resolve_curves', 'validate_measure', 'BOUNDARY_CLEARANCE',
           'DEFAULT_SAMPLES']

logger = logging.getLogger(__name__)

# atoms closer than this to the boundary are rejected
BOUNDARY_CLEARANCE = 1e-8

DEFAULT_SAMPLES = 512


class PointAtom(object):
    def __init__(self, position, weight=1.0):
        """A weighted Dirac mass ``weight * delta_position``"""
        self.position = np.array(position, dtype=float)
        self.weight = float(weight)

    @property
    def dim(self):
        return self.position.size

    def __repr__(self):
        return 'PointAtom({0}, w={1:g})'.format(tuple(self.position.tolist()), self.weight)


class CurveAtom(object):
    def __init__(self, params, points, weight=1.0, name=None):
        """
        A weighted line measure ``weight * delta_Lambda`` on a polyline.

        Parameters
        ----------
        params : array_like
            Strictly increasing curve parameters ``t_i``, shaped ``(n,)``.

        points : array_like
            Polyline vertices ``s(t_i)``, shaped ``(n, dim)``.

        weight : float

        name : str, optional
            Preset curve name, if the polyline was sampled from one.
        """
        params = np.array(params, dtype=float)
        points = np.array(points, dtype=float)
        if params.ndim != 1 or params.size < 2:
            raise ValueError('a curve needs at least two samples')
        if points.shape[0] != params.size or points.ndim != 2:
            raise ValueError('one point per parameter sample is required')
        if np.any(np.diff(params) <= 0):
            raise ValueError('curve parameters must be strictly increasing')
        self.params = params
        self.points = points
        self.weight = float(weight)
        self.name = name

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def n_segments(self):
        return self.params.size - 1

    def length(self):
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    def __repr__(self):
        label = self.name or 'polyline'
        return 'CurveAtom({0}, {1:d} segments, w={2:g})'.format(label, self.n_segments,
                                                               self.weight)


class MeasureData(object):
    def __init__(self, point_atoms=(), curve_atoms=(), declared_total_variation=None):
        """
        A finite sum of point and curve atoms.

        Parameters
        ----------
        point_atoms : sequence of PointAtom

        curve_atoms : sequence of CurveAtom

        declared_total_variation : float, optional
            Value of the total variation norm reported alongside results;
            computed from the atoms if omitted.
        """
        self.point_atoms = list(point_atoms)
        self.curve_atoms = list(curve_atoms)
        dims = {a.dim for a in self.point_atoms + self.curve_atoms}
        if len(dims) > 1:
            raise ValueError('atoms live in different dimensions: {0}'.format(sorted(dims)))
        self._declared = declared_total_variation

    @classmethod
    def dirac(cls, position, weight=1.0):
        return cls([PointAtom(position, weight)])

    @property
    def dim(self):
        atoms = self.point_atoms + self.curve_atoms
        return atoms[0].dim if atoms else None

    def is_zero(self):
        return all(a.weight == 0 for a in self.point_atoms + self.curve_atoms)

    def total_mass(self):
        """``<mu, 1>``: sum of point weights plus weighted polyline lengths"""
        return (sum(a.weight for a in self.point_atoms) +
                sum(a.weight * a.length() for a in self.curve_atoms))

    def total_variation(self):
        if self._declared is not None:
            return float(self._declared)
        return (sum(abs(a.weight) for a in self.point_atoms) +
                sum(abs(a.weight) * a.length() for a in self.curve_atoms))

    def scaled(self, factor):
        """The measure ``factor * mu``"""
        return MeasureData(
            [PointAtom(a.position, factor * a.weight) for a in self.point_atoms],
            [CurveAtom(a.params, a.points, factor * a.weight, a.name) for a in self.curve_atoms])

    def __repr__(self):
        return 'MeasureData({0!r}, {1!r})'.format(self.point_atoms, self.curve_atoms)


# -- the helical curves in the unit cube ----------------------------------------

def _f1(t):
    return 0.5 + 0.1 * (1 - t) * np.sin(4 * np.pi * t)


def _f2(t):
    return 0.5 + 0.1 * (1 - t) * np.cos(4 * np.pi * t)


def _f3(t):
    return 0.3 + t


CURVES = {
    'lambda1': lambda t: np.stack((_f1(t), _f2(t), _f3(t)), axis=-1),
    'lambda2': lambda t: np.stack((_f2(t), _f3(t), _f1(t)), axis=-1),
    'lambda3': lambda t: np.stack((_f3(t), _f1(t), _f2(t)), axis=-1),
}
CURVE_RANGE = (0.0, 0.4)


def curve_points(name, t):
    """Evaluates the preset curve ``name`` at parameters ``t``."""
    try:
        curve = CURVES[name]
    except KeyError:
        raise ValueError('unknown curve {0!r}; presets are {1}'.format(name, sorted(CURVES)))
    return curve(np.asarray(t, dtype=float))


def sample_curve(name, weight=1.0, samples=DEFAULT_SAMPLES, t_range=CURVE_RANGE):
    """
    A polyline through ``samples`` uniformly spaced parameters of a preset curve.

    Returns
    -------
    atom : CurveAtom
    """
    if samples < 2:
        raise ValueError('samples must be at least 2')
    t = np.linspace(t_range[0], t_range[1], int(samples))
    return CurveAtom(t, curve_points(name, t), weight, name)


def _halved(atom):
    t = np.linspace(atom.params[0], atom.params[-1], 2 * atom.n_segments + 1)
    return CurveAtom(t, curve_points(atom.name, t), atom.weight, atom.name)


def resolve_curves(mu, rtol=1e-10, max_samples=2 ** 20):
    """
    Refines sampled preset curves until their polyline length settles.

    Each preset curve atom has its segments halved until the relative change
    of the polyline length is at most ``rtol``. Explicit polylines (without a
    preset name) are kept as given.

    Returns
    -------
    mu : MeasureData
        A new measure with refined curve atoms.
    """
    curves = []
    for atom in mu.curve_atoms:
        if atom.name not in CURVES:
            curves.append(atom)
            continue
        length = atom.length()
        while True:
            finer = _halved(atom)
            new_length = finer.length()
            change = abs(new_length - length) / max(length, np.finfo(float).tiny)
            logger.debug('%s: %d segments, length %.15g, change %.2e',
                         atom.name, finer.n_segments, new_length, change)
            atom, length = finer, new_length
            if change <= rtol:
                break
            if atom.params.size > max_samples:
                logger.warning('%s: stopped refining at %d samples (length change %.2e)',
                               atom.name, atom.params.size, change)
                break
        curves.append(atom)
    return MeasureData(mu.point_atoms, curves, mu._declared)


def validate_measure(mu, mesh, clearance=BOUNDARY_CLEARANCE):
    """
    Checks that every atom lies strictly inside the meshed domain.

    Raises
    ------
    MeasureLocationError
        Naming the first atom outside the mesh or within ``clearance`` of
        the boundary.
    """
    if mu.dim is not None and mu.dim != mesh.dim:
        raise MeasureLocationError(mu, 'measure is {0:d}D, mesh is {1:d}D'.format(
            mu.dim, mesh.dim))
    groups = [(a, a.position[None, :]) for a in mu.point_atoms]
    groups += [(a, a.points) for a in mu.curve_atoms]
    for atom, points in groups:
        cells, _ = locate_points(mesh, points)
        if np.any(cells < 0):
            bad = points[np.flatnonzero(cells < 0)[0]]
            raise MeasureLocationError(atom, 'point {0} lies outside the domain'.format(
                tuple(bad.tolist())))
        dist = distance_to_boundary(mesh, points, cutoff=clearance)
        if np.any(dist <= clearance):
            bad = points[np.flatnonzero(dist <= clearance)[0]]
            raise MeasureLocationError(atom, 'point {0} is within {1:g} of the boundary'.format(
                tuple(bad.tolist()), clearance))
