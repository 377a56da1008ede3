"""Exact Massey products, lattice minima and systolic inequality chains on nilmanifold models."""

__version__ = "0.1.0"
