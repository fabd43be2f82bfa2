"""Periodic travelling waves in nonlinear lattices near the KdV cnoidal limit."""

__version__ = "0.1.0"
