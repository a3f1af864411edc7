"""Exact computations with finitely presented dg categories."""

__version__ = "0.1.0"
