"""Exact Hecke traces on automorphic forms of SO(7), SO(8), SO(9) from lattice neighbors."""

__version__ = "0.1.0"
