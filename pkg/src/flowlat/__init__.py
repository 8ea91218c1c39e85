"""Lattice polytopes of group-based phylogenetic models."""

__version__ = "0.1.0"
