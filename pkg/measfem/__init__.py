"""
measfem
=======

Finite elements for elliptic problems with measure-valued data

Modules
-------
mesh        - Simplicial meshes, generators, red refinement, point location
quadrature  - Symmetric quadrature rules on triangles and tetrahedra
fespace     - Lagrange spaces of degree 1-3 and finite element functions
sparse      - CSR storage and Jacobi-preconditioned conjugate gradients
measures    - Point and line measures used as right-hand sides
assembly    - Stiffness, mass and load vector assembly; Dirichlet elimination
scheme      - The standard and the very weak (Berggren) schemes
analysis    - Prolongation, error norms, convergence rates and studies
config      - Experiment configuration and the built-in presets
cli         - The ``measfem`` command

For more information, see the accompanying README.md

"""

import logging

__all__ = [
    'mesh',
    'quadrature',
    'fespace',
    'sparse',
    'measures',
    'assembly',
    'scheme',
    'analysis',
    'config',
    'errors',
    'utils',
    ]

__version__ = '0.1.0'

logging.getLogger(__name__).addHandler(logging.NullHandler())
