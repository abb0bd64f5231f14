"""Exact prime statistics of floor function sets {[x/n] : 1 <= n <= x}."""

__version__ = "0.1.0"
