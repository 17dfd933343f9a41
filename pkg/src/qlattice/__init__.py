"""Numerics for calculus and Fourier analysis on geometric lattices."""

__version__ = "0.1.0"
