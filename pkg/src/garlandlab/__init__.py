"""Discrete harmonic maps into CAT(0) targets, link spectra and fixed-point certificates."""

__version__ = "0.1.0"
TOOL = "garland-lab"
