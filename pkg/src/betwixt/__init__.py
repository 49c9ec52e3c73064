"""Exact betweenness geometry, model checking and tiling reductions."""

__version__ = "0.1.0"
