"""Spectral toolkit for eigenvalue boundary problems on differential forms
over flat star-shaped planar domains."""

__version__ = "0.1.0"
