"""Exact character-theoretic and Riemann-Roch checks for exceptional quotient singularities."""

__version__ = "0.1.0"
