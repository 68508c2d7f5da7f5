"""Numerical workbench for almost complex geometry on C^2."""
__version__ = "0.1.0"
