"""Numerical laboratory for the Emden–Fowler reduced fractional Yamabe operator."""
from yamabelab._version import __version__

__all__ = ["__version__"]
