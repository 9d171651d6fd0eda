"""Exact and numerical verification tools for the classical-quantum resonance
correspondence on real hyperbolic space."""

__version__ = "0.1.0"

__all__ = ["algebra", "symtensor", "liealg", "hypgeo", "horosphere", "bands", "quantum", "poisson", "cli"]
