"""Zero-cycle filtrations, symbol maps and Galois symbols on finite models."""

__version__ = "0.1.0"
