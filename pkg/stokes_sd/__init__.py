"""Spectral densities from fluorescence Stokes-shift response functions."""

__version__ = "1.0.0"
