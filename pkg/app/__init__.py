"""Noisy channels in a quantum switch and the Holevo capacity of the result."""

__version__ = "0.1.0"
