"""Domain types and the linear algebra of the shallow water system.

The homogeneous system is written in evolutionary form
``u_t + a1(u) u_x + a2(u) u_y = 0`` for the state ``u = (u, v, h)``.
Wave vectors ``(lam0, lam1, lam2)`` annihilate the characteristic
determinant ``det(lam0 I + lam1 a1 + lam2 a2)``; they come in an entropic
(``E``) family moving with the flow and an acoustic (``S``) family moving at
``+-sqrt(g h)`` relative to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ZeroDirection


@dataclass(frozen=True)
class PhysParams:
    g: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.g) and self.g > 0):
            raise ValueError(f"g must be positive and finite, got {self.g}")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ValueError(f"omega must be >= 0, got {self.omega}")


class Point(NamedTuple):
    t: float
    x: float
    y: float


class State(NamedTuple):
    u: float
    v: float
    h: float


class WaveKind(str, Enum):
    E = "E"
    S = "S"


@dataclass(frozen=True)
class WaveVector:
    lam0: float
    lam1: float
    lam2: float
    kind: WaveKind = WaveKind.E
    eps: int = 1

    def as_array(self) -> np.ndarray:
        return np.array([self.lam0, self.lam1, self.lam2])

    @property
    def direction(self) -> tuple[float, float]:
        return (self.lam1, self.lam2)


@dataclass(frozen=True)
class WaveVectorPair:
    a: WaveVector
    b: WaveVector
    delta: float
    dot: float


@dataclass(frozen=True)
class CoefficientMatrices:
    a1: np.ndarray
    a2: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray

    @property
    def trace_forms(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.A1, self.A2, self.A3)


@dataclass(frozen=True)
class Grid:
    """Tensor grid over (t, x, y); each axis is ``(lo, hi, n)``.

    An axis with ``n == 1`` is the single value ``lo``.
    """

    t: tuple[float, float, int]
    x: tuple[float, float, int]
    y: tuple[float, float, int]

    def __post_init__(self):
        for name in ("t", "x", "y"):
            lo, hi, n = getattr(self, name)
            if int(n) != n or n < 1:
                raise ValueError(f"grid axis {name}: count must be a positive integer")
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"grid axis {name}: range must be finite")

    @classmethod
    def single(cls, t: float, x: float, y: float) -> "Grid":
        return cls((t, t, 1), (x, x, 1), (y, y, 1))

    def axis(self, name: str) -> np.ndarray:
        lo, hi, n = getattr(self, name)
        if n == 1:
            return np.array([float(lo)])
        return np.linspace(lo, hi, int(n))

    @property
    def shape(self) -> tuple[int, int, int]:
        return (int(self.t[2]), int(self.x[2]), int(self.y[2]))

    @property
    def size(self) -> int:
        nt, nx, ny = self.shape
        return nt * nx * ny

    def point(self, index: tuple[int, int, int]) -> Point:
        it, ix, iy = index
        return Point(float(self.axis("t")[it]), float(self.axis("x")[ix]), float(self.axis("y")[iy]))

    def points(self) -> list[Point]:
        """All grid points in row-major (t, x, y) order."""
        ts, xs, ys = self.axis("t"), self.axis("x"), self.axis("y")
        return [Point(float(t), float(x), float(y)) for t in ts for x in xs for y in ys]


def build_coefficient_matrices(s: State, p: PhysParams) -> CoefficientMatrices:
    u, v, h = s
    g = p.g
    a1 = np.array([[u, 0.0, g], [0.0, u, 0.0], [h, 0.0, u]])
    a2 = np.array([[v, 0.0, 0.0], [0.0, v, g], [0.0, h, v]])
    # Rows of the trace forms index (t, x, y); columns index (u, v, h).
    A1 = np.array([[1.0, 0.0, 0.0], [u, 0.0, g], [v, 0.0, 0.0]])
    A2 = np.array([[0.0, 1.0, 0.0], [0.0, u, 0.0], [0.0, v, g]])
    A3 = np.array([[0.0, 0.0, 1.0], [h, 0.0, u], [0.0, h, v]])
    return CoefficientMatrices(a1, a2, A1, A2, A3)


def dispersion_det(s: State, p: PhysParams, lam: Sequence[float]) -> float:
    """Characteristic determinant ``det(lam0 I + lam1 a1 + lam2 a2)``."""
    lam0, lam1, lam2 = (float(c) for c in lam)
    m = build_coefficient_matrices(s, p)
    return float(np.linalg.det(lam0 * np.eye(3) + lam1 * m.a1 + lam2 * m.a2))


def dispersion_factored(s: State, p: PhysParams, lam: Sequence[float]) -> float:
    """The same determinant written as the product of its three roots in lam0.

    The acoustic roots are shifted by ``sqrt(g h)`` times the length of the
    spatial direction, so for unit directions the factors reduce to
    ``w, w + sqrt(g h), w - sqrt(g h)``.
    """
    lam0, lam1, lam2 = (float(c) for c in lam)
    w = lam0 + lam1 * s.u + lam2 * s.v
    c = math.sqrt(p.g * max(s.h, 0.0)) * math.hypot(lam1, lam2)
    return w * (w + c) * (w - c)


def make_wave_vector(kind, eps: int, direction: Sequence[float], s: State, p: PhysParams) -> WaveVector:
    """Build the entropic or acoustic wave vector with the given spatial direction.

    Acoustic directions are normalised to unit length; entropic ones pass through.
    """
    kind = WaveKind(kind)
    lam1, lam2 = (float(c) for c in direction)
    if lam1 == 0.0 and lam2 == 0.0:
        raise ZeroDirection("wave direction must be nonzero")
    if kind is WaveKind.E:
        return WaveVector(-(lam1 * s.u + lam2 * s.v), lam1, lam2, kind, int(eps))
    if eps not in (1, -1):
        raise ValueError(f"eps must be +1 or -1, got {eps}")
    norm = math.hypot(lam1, lam2)
    lam1, lam2 = lam1 / norm, lam2 / norm
    c = math.sqrt(p.g * max(s.h, 0.0))
    return WaveVector(-(lam1 * s.u + lam2 * s.v + eps * c), lam1, lam2, kind, int(eps))


def make_pair(a: WaveVector, b: WaveVector) -> WaveVectorPair:
    delta = a.lam1 * b.lam2 - a.lam2 * b.lam1
    dot = a.lam1 * b.lam1 + a.lam2 * b.lam2
    return WaveVectorPair(a, b, delta, dot)


def riemann_invariant(lam, pt: Point) -> float:
    if isinstance(lam, WaveVector):
        lam = (lam.lam0, lam.lam1, lam.lam2)
    lam0, lam1, lam2 = lam
    return lam0 * pt.t + lam1 * pt.x + lam2 * pt.y
