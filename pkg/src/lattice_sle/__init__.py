"""Lattice interfaces, Loewner chains and discrete observables."""

__version__ = "0.1.0"
