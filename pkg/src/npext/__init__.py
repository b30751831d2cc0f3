"""Norm-preserving holomorphic extension from crossed discs to G2 and the diamond."""

__version__ = "0.1.0"
