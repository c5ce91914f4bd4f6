"""Numerical tools for symplectically flat and zeta-flat connections."""

__version__ = "0.1.0"
