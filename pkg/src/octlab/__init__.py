"""Exact computations on Hermitian and skew-Hermitian octonion matrix algebras."""

__version__ = "0.1.0"
