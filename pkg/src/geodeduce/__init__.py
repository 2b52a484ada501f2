"""Exact geometric deduction: construction scripts to polynomial elimination."""

__version__ = "0.1.0"
