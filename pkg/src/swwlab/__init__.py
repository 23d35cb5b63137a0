"""Exact Riemann-invariant solutions of the shallow water equations, with and without rotation."""

from .core import Grid, PhysParams, Point, State, WaveKind, WaveVector

__version__ = "0.1.0"

__all__ = ["Grid", "PhysParams", "Point", "State", "WaveKind", "WaveVector", "__version__"]
