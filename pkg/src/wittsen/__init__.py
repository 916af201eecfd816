"""Exact computer algebra for truncated Witt vectors, formal group laws,
divided-power operator calculus and the homology of the resulting complexes."""

__version__ = "0.1.0"
