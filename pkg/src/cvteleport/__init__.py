"""Gaussian-state toolkit for analog CV teleportation."""
__version__ = "0.1.0"
