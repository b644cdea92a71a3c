"""Numerical toolkit for Isom(H^3), its square map and representations of
non-orientable surface groups."""

__version__ = "0.1.0"
