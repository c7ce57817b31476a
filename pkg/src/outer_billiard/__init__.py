"""Outer billiard dynamics, period-4 analysis and exact EDS checks."""

__version__ = "0.1.0"
