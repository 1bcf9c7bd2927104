"""Spectral simulation of the curve-shortening flow under Marcus shift noise."""

__version__ = "0.1.0"
