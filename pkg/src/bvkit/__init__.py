"""Exact linear symplectic geometry of relations, discrete field theories
with boundary, and BV-BFV structural verification."""

__version__ = "0.1.0"
