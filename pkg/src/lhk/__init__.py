"""Exact chain-level duality and Poincare structure machinery on ball complexes."""

__version__ = "0.1.0"
