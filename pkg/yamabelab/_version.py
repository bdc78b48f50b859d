"""Version information for yamabelab."""

__version__ = "0.1.0"
