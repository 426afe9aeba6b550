from setuptools import setup, find_packages

setup(name='measfem',
      version='0.1.0',
      description='Finite element convergence studies for elliptic problems with measure data',
      long_description='''
          The measfem package solves -div(A grad u) = mu with homogeneous
          Dirichlet conditions, where mu is a finite measure made of point
          masses and line sources. It provides Lagrange elements of degree
          1 to 3 on triangles and tetrahedra, the standard Galerkin scheme
          and the equivalent very weak scheme, and a harness for measuring
          convergence rates against reference solutions on subdomains.
          ''',
      classifiers=[
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Mathematics',
          'License :: OSI Approved :: MIT License',
          'Operating System :: OS Independent',
          'Programming Language :: Python :: 3',
      ],
      packages=find_packages(exclude=['tests']),
      python_requires='>=3.7',
      install_requires=[
          'numpy>=1.17',
          'scipy>=1.3',
      ],
      license='MIT',
      entry_points={
          'console_scripts': ['measfem = measfem.cli:main'],
      },
      )
