"""
Exceptions raised by measfem

Argument errors are plain ``ValueError``; the classes below cover failures
that carry domain context (a cell, an atom, a solver stage, a config field).
"""

__all__ = ['MeasfemError', 'DegenerateCellError', 'MeasureLocationError',
           'SolverError', 'EmptyRegionError', 'ConfigError']


class MeasfemError(Exception):
    """Base class for all measfem failures."""


class DegenerateCellError(MeasfemError):
    def __init__(self, cell, volume):
        self.cell = int(cell)
        self.volume = float(volume)
        super(DegenerateCellError, self).__init__(
            'cell {0:d} is degenerate (volume {1:.3e})'.format(self.cell, self.volume))


class MeasureLocationError(MeasfemError):
    """An atom of a measure could not be placed strictly inside the mesh."""

    def __init__(self, atom, reason):
        self.atom = atom
        self.reason = reason
        super(MeasureLocationError, self).__init__('{0}: {1}'.format(atom, reason))


class SolverError(MeasfemError):
    """Conjugate gradients did not reach the requested tolerance."""

    def __init__(self, stats, stage=None):
        self.stats = stats
        self.stage = stage
        where = ' at {0}'.format(stage) if stage else ''
        super(SolverError, self).__init__(
            'CG failed to converge{0}: {1:d} iterations, relative residual {2:.3e}'.format(
                where, stats.iterations, stats.final_relative_residual))


class EmptyRegionError(MeasfemError):
    def __init__(self, region):
        self.region = region
        super(EmptyRegionError, self).__init__(
            'no cells selected by region {0}'.format(region))


class ConfigError(MeasfemError):
    """Malformed experiment configuration.

    Parameters
    ----------
    field : str
        Dotted path of the offending field, e.g. ``measure.points[0].x``.

    message : str
        What is wrong with it.
    """

    def __init__(self, field, message):
        self.field = field
        super(ConfigError, self).__init__('{0}: {1}'.format(field, message))
