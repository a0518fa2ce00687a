"""Exact computations with log de Rham complexes, Witt vectors and ramification filtrations over Z/p^n."""

__version__ = "0.1.0"
