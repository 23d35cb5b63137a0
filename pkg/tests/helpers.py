"""Small numerical utilities shared by the test modules."""

from __future__ import annotations

import math

import numpy as np

from swwlab.core import PhysParams
from swwlab.verify import SolutionAnsatz

SQRT3 = math.sqrt(3.0)
G1 = PhysParams(g=1.0)


def local_maxima(z: np.ndarray, ring: int = 3, rel_prominence: float = 1e-3) -> list[tuple[int, int]]:
    """Interior strict local maxima of a 2-D array that stand out from their surroundings.

    A cell qualifies when it is strictly larger than its 8 neighbours and
    exceeds every cell on the square ring at Chebyshev distance ``ring`` by at
    least ``rel_prominence`` times the field's range.  The prominence test
    discards numerical ripples on flat plateaus and along slowly varying ridges.
    """
    z = np.asarray(z, dtype=float)
    n, m = z.shape
    span = float(np.nanmax(z) - np.nanmin(z))
    out = []
    for i in range(ring, n - ring):
        for j in range(ring, m - ring):
            c = z[i, j]
            if not np.isfinite(c):
                continue
            nb = z[i - 1:i + 2, j - 1:j + 2].copy()
            nb[1, 1] = -np.inf
            if not c > np.nanmax(nb):
                continue
            box = z[i - ring:i + ring + 1, j - ring:j + ring + 1]
            edge = np.concatenate([box[0], box[-1], box[1:-1, 0], box[1:-1, -1]])
            if c - np.nanmax(edge) >= rel_prominence * span:
                out.append((i, j))
    return out


# ----------------------------------------------------------------------------
# Reference ansatz for the trace conditions (g = 1)


def entropic_ansatz(broken=False):
    l1, l2, u0, h0 = 1.0, 0.5, 0.3, 1.0
    phi = lambda r: 0.5 * math.sin(r)  # noqa: E731

    def f(r):
        r = float(r[0])
        return np.array([u0 - l2 / l1 * phi(r), phi(r), h0 + (r if broken else 0.0)])

    lam = lambda s: np.array([-(l1 * s[0] + l2 * s[1]), l1, l2])  # noqa: E731
    return SolutionAnsatz(f, [lam], G1)


def acoustic_ansatz(eps=1.0):
    l1, l2, u0, v0 = 0.6, 0.8, 0.2, -0.1
    phi = lambda r: 1.0 + 0.5 / math.cosh(r) ** 2  # noqa: E731

    def f(r):
        k = 2.0 * eps * phi(float(r[0]))
        return np.array([u0 + l1 * k, v0 + l2 * k, phi(float(r[0])) ** 2])

    lam = lambda s: np.array([-(l1 * s[0] + l2 * s[1]) - eps * math.sqrt(s[2]), l1, l2])  # noqa: E731
    return SolutionAnsatz(f, [lam], G1)


def scattering_ansatz(eps=1.0, h0=2.0):
    """Entropic x acoustic rank-2 surface with unit entropic scale."""
    F = lambda r: 0.3 * math.sin(r)  # noqa: E731
    G = lambda s: 0.3 * math.sin(0.8 * s)  # noqa: E731

    def f(r):
        r1, r2 = r
        s = r2 - SQRT3 * eps / 2.0 * r1
        g = G(s)
        return np.array([SQRT3 / 3 * eps * g + F(r2), g, (F(r2) - 2 * SQRT3 / 3 * eps * g + h0) ** 2 / 4.0])

    lam_e = lambda st: np.array([SQRT3 * eps * st[0] + st[1], -SQRT3 * eps, -1.0])  # noqa: E731
    lam_s = lambda st: np.array([st[0] + math.sqrt(st[2]), -1.0, 0.0])  # noqa: E731
    return SolutionAnsatz(f, [lam_e, lam_s], G1)


# ----------------------------------------------------------------------------
# Special-function oracles


def maclaurin_fresnel(x: float, terms: int = 40) -> tuple[float, float]:
    """Independent power-series oracle for (S(x), C(x))."""
    a = math.pi / 2.0
    s = math.fsum((-1) ** n * a ** (2 * n + 1) * x ** (4 * n + 3) / (math.factorial(2 * n + 1) * (4 * n + 3))
                  for n in range(terms))
    c = math.fsum((-1) ** n * a ** (2 * n) * x ** (4 * n + 1) / (math.factorial(2 * n) * (4 * n + 1))
                  for n in range(terms))
    return s, c


def five_point(f, z, h):
    return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)


def near_pole(z, half_period, dist):
    period = 2 * half_period
    zr = math.fmod(abs(z), period)
    return min(zr, period - zr) < dist
