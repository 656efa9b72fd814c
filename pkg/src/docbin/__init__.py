"""PDE-based binarization of degraded document images."""

__version__ = "0.1.0"
