import setuptools

__version__ = '0.0.1dev1'

setuptools.setup(
    name='k3lattice',
    version=__version__,
    packages=setuptools.find_packages(exclude=['tests']),
    py_modules=['run_verifier'],
    python_requires='>=3.9',
    # Exact arithmetic only: object arrays for Gram matrices, sympy for determinants and symbolic checks.
    install_requires=['numpy', 'sympy'],
    extras_require={'test': ['pytest', 'hypothesis']},
)
