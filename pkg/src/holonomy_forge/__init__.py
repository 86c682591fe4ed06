"""Exact verification tools for compact exceptional-holonomy constructions."""

__version__ = "0.1.0"
