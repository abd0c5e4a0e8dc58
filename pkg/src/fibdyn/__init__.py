"""Dynamics of f_c(x, y) = (xy + c, x) on R^2 and C^2."""
__version__ = "0.1.0"
