"""Noiseless privacy accounting for sums over randomized data."""

__version__ = "0.1.0"
