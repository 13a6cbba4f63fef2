"""Adaptive sampling and curvature-based step sizes for stochastic gradient methods."""

__version__ = "0.1.0"
