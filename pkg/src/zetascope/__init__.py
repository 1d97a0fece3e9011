"""Poles of local zeta functions of convenient non-degenerate polynomials."""

__version__ = "0.1.0"
