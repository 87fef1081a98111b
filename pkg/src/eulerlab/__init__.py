"""Numerical laboratory for incompressible Euler model problems."""

__version__ = "0.1.0"
