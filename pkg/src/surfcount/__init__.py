"""Counting closed essential surfaces in triangulated 3-manifolds."""

__version__ = "0.1.0"
