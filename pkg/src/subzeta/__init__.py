"""Subalgebra and ideal zeta functions of Z_p-algebras, counted exactly.

Lattice enumeration in Hermite normal form, subalgebra/ideal/weight/type
statistics, Bruhat-cell parametrisations of primitive lattices, and
solution counts of polynomial congruences for Igusa zeta functions.
"""

__version__ = "0.1.0"
