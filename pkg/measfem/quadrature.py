"""
Symmetric quadrature rules on the reference triangle and tetrahedron

Rules are stored in barycentric coordinates with weights normalized to sum
to 1, so that the integral over a cell K is ``|K| * sum(w * f(x_q))``.
Triangle rules are the Strang-Fix schemes, tetrahedron rules are the
Zienkiewicz-Taylor and Keast schemes; all weights are positive.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ['QuadratureRule', 'quadrature_for', 'line_rule', 'MAX_DEGREE']

MAX_DEGREE = 6


class QuadratureRule(object):
    def __init__(self, points, weights, exact_degree):
        """
        A quadrature rule on the reference simplex.

        Parameters
        ----------
        points : array_like
            Barycentric coordinates of the nodes, shaped ``(nq, dim + 1)``.

        weights : array_like
            Positive weights; normalized here to sum to 1.

        exact_degree : int
            Highest total degree integrated exactly.
        """
        points = np.array(points, dtype=float)
        weights = np.array(weights, dtype=float)
        assert points.shape[0] == weights.size, "one weight per point"
        assert np.all(weights > 0), "weights must be positive"
        self.points = points
        self.weights = weights / weights.sum()
        self.exact_degree = int(exact_degree)
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def dim(self):
        return self.points.shape[1] - 1

    def __len__(self):
        return self.weights.size

    def __repr__(self):
        return 'QuadratureRule(dim={0:d}, points={1:d}, exact_degree={2:d})'.format(
            self.dim, len(self), self.exact_degree)


def _orbit(*coords):
    """All distinct permutations of a barycentric tuple"""
    from itertools import permutations
    return sorted(set(permutations(coords)))


def _triangle(degree):
    if degree <= 1:
        return [(1 / 3., 1 / 3., 1 / 3.)], [1.0], 1
    if degree == 2:
        return _orbit(2 / 3., 1 / 6., 1 / 6.), [1.0] * 3, 2
    if degree == 3:
        pts = _orbit(0.659027622374092, 0.231933368553031, 0.109039009072877)
        return pts, [1.0] * 6, 3
    if degree == 4:
        a = _orbit(0.816847572980459, 0.091576213509771, 0.091576213509771)
        b = _orbit(0.108103018168070, 0.445948490915965, 0.445948490915965)
        return a + b, [0.109951743655322] * 3 + [0.223381589678011] * 3, 4
    if degree == 5:
        a = _orbit(0.79742698535308720, 0.10128650732345633, 0.10128650732345633)
        b = _orbit(0.05971587178976981, 0.47014206410511505, 0.47014206410511505)
        return ([(1 / 3., 1 / 3., 1 / 3.)] + a + b,
                [0.225] + [0.12593918054482717] * 3 + [0.13239415278850616] * 3, 5)
    a = _orbit(0.873821971016996, 0.063089014491502, 0.063089014491502)
    b = _orbit(0.501426509658179, 0.249286745170910, 0.249286745170910)
    c = _orbit(0.636502499121399, 0.310352451033785, 0.053145049844816)
    return (a + b + c,
            [0.050844906370207] * 3 + [0.116786275726379] * 3 + [0.082851075618374] * 6, 6)


def _tetrahedron(degree):
    if degree <= 1:
        return [(0.25,) * 4], [1.0], 1
    if degree == 2:
        a, b = 0.585410196624969, 0.138196601125011
        return _orbit(a, b, b, b), [1.0] * 4, 2
    if degree <= 4:
        # the 5-point cubic rule has a negative weight; use Keast's positive quartic rule
        a = _orbit(0.5, 0.5, 0.0, 0.0)
        b = _orbit(0.6984197043243866, 0.1005267652252045, 0.1005267652252045,
                   0.1005267652252045)
        c = _orbit(0.0568813795204234, 0.3143728734931922, 0.3143728734931922,
                   0.3143728734931922)
        return (a + b + c,
                [0.0190476190476190] * 6 + [0.0885898247429807] * 4 + [0.1328387466855907] * 4,
                4)
    if degree == 5:
        a = _orbit(0.0, 1 / 3., 1 / 3., 1 / 3.)
        b = _orbit(0.7272727272727273, 0.0909090909090909, 0.0909090909090909,
                   0.0909090909090909)
        c = _orbit(0.4334498464263357, 0.4334498464263357, 0.0665501535736643,
                   0.0665501535736643)
        return ([(0.25,) * 4] + a + b + c,
                [0.1817020685825351] + [0.0361607142857143] * 4 +
                [0.0698714945161738] * 4 + [0.0656948493683187] * 6, 5)
    a = _orbit(0.3561913862225449, 0.2146028712591517, 0.2146028712591517, 0.2146028712591517)
    b = _orbit(0.8779781243961660, 0.0406739585346113, 0.0406739585346113, 0.0406739585346113)
    c = _orbit(0.0329863295731731, 0.3223378901422757, 0.3223378901422757, 0.3223378901422757)
    d = _orbit(0.2696723314583159, 0.0636610018750175, 0.0636610018750175, 0.6030056647916491)
    return (a + b + c + d,
            [0.0399227502581679] * 4 + [0.0100772110553207] * 4 +
            [0.0553571815436544] * 4 + [0.0482142857142857] * 12, 6)


_CACHE = {}


def quadrature_for(dim, exact_degree):
    """
    A symmetric positive-weight rule on the reference simplex.

    Parameters
    ----------
    dim : int
        2 (triangle) or 3 (tetrahedron).

    exact_degree : int
        Required degree of exactness, at most 6. Values below 1 give the
        one-point centroid rule.

    Returns
    -------
    rule : QuadratureRule
        A rule whose ``exact_degree`` is at least the one requested.

    Raises
    ------
    ValueError
        If ``dim`` is not 2 or 3, or ``exact_degree > 6``.
    """
    if dim not in (2, 3):
        raise ValueError('dim must be 2 or 3, got {0!r}'.format(dim))
    if exact_degree > MAX_DEGREE:
        raise ValueError('exact_degree must be at most {0:d}, got {1!r}'.format(
            MAX_DEGREE, exact_degree))
    key = (dim, max(int(exact_degree), 1))
    if key not in _CACHE:
        points, weights, degree = (_triangle if dim == 2 else _tetrahedron)(key[1])
        _CACHE[key] = QuadratureRule(points, weights, degree)
    return _CACHE[key]


def line_rule(order=4):
    """
    Gauss-Legendre rule on ``[0, 1]``.

    Returns
    -------
    points : ndarray
        Nodes in ``(0, 1)``.

    weights : ndarray
        Weights summing to 1.
    """
    x, w = leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w
