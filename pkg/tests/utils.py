"""utils.py
Small meshes and functions shared by the test modules.
"""

import numpy as np

from measfem.mesh import SimplicialMesh


def reference_triangle():
    """The triangle (0,0), (1,0), (0,1) as a one-cell mesh."""
    return SimplicialMesh([[0., 0.], [1., 0.], [0., 1.]], [[0, 1, 2]], name='triangle')


def reference_tetrahedron():
    """The tetrahedron with vertices at the origin and the unit vectors."""
    return SimplicialMesh([[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]],
                          [[0, 1, 2, 3]], name='tetrahedron')


def reference_cell(dim):
    return reference_triangle() if dim == 2 else reference_tetrahedron()


def two_triangle_square():
    """The unit square cut along the diagonal from (0,0) to (1,1)."""
    return SimplicialMesh([[0., 0.], [1., 0.], [1., 1.], [0., 1.]],
                          [[0, 1, 2], [0, 2, 3]], name='square')


def random_polynomial(k, dim, seed=0):
    """A vectorized random polynomial of total degree ``k`` in ``dim`` variables.

    Returns
    -------
    p : callable
        Maps ``(n, dim)`` coordinates to ``(n,)`` values.
    """
    rng = np.random.RandomState(seed)
    exponents = [e for e in np.ndindex(*(k + 1,) * dim) if sum(e) <= k]
    coefficients = rng.randn(len(exponents))

    def p(x):
        x = np.atleast_2d(x)
        return sum(c * np.prod(x ** np.array(e), axis=1)
                   for c, e in zip(coefficients, exponents))
    return p


def monomial_integral(exponents):
    """Integral of ``prod(x_i ** a_i)`` over the reference simplex."""
    from math import factorial
    dim = len(exponents)
    num = np.prod([factorial(a) for a in exponents])
    return num / float(factorial(dim + sum(exponents)))
