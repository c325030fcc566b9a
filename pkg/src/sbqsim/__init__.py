"""Numerical laboratory for sample-based Hamiltonian and Lindbladian
simulation at small dimension: exact channel constructions, diamond-norm
distance estimation, and sweep tooling that checks measured errors against
analytic sample-complexity bounds."""

__version__ = "0.1.0"
