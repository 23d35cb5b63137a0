"""Ready-made instances of every family, with boxes where they are well behaved.

Each preset pairs a descriptor with a sampling box (t, x, y ranges) inside
which the seed-connected branch exists and stays away from gradient
catastrophes and from the edge of the family's domain (for example
``h1 + h2 > 0`` for the kink profiles).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import PhysParams, Point
from .families import Family, SolutionDescriptor, make_solution
from .profiles import ProfileFn, ProfileKind

SQRT3 = math.sqrt(3.0)
Box = tuple[tuple[float, float], tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class Preset:
    name: str
    build: Callable[[PhysParams], SolutionDescriptor]
    box: Box
    label: str = ""

    def descriptor(self, params: PhysParams = PhysParams()) -> SolutionDescriptor:
        return self.build(params)

    def sample(self, rng: np.random.Generator, n: int) -> list[Point]:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return [Point(*map(float, lo + (hi - lo) * rng.random(3))) for _ in range(n)]

    def rotating_sample(
        self, rng: np.random.Generator, n: int, omega: float, margin: float = 0.1, half_width: float = 0.5
    ) -> list[Point]:
        """Points for the lifted rotating-frame solution.

        Times are uniform in (-pi/(2 omega) + margin, pi/(2 omega) - margin),
        i.e. almost the whole interval between singular times; positions are
        uniform in the preset's spatial box, shrunk about its centre to sides
        of at most ``2 * half_width``.
        """
        t_half = math.pi / (2.0 * omega) - margin
        if t_half <= 0:
            raise ValueError("margin leaves no time interval")
        lo, hi = [-t_half], [t_half]
        for a, b in self.box[1:]:
            mid, half = 0.5 * (a + b), min(0.5 * (b - a), half_width)
            lo.append(mid - half)
            hi.append(mid + half)
        lo_a, hi_a = np.array(lo), np.array(hi)
        return [Point(*map(float, lo_a + (hi_a - lo_a) * rng.random(3))) for _ in range(n)]


def _sech(A=1.0, offset=0.0, scale=1.0):
    return ProfileFn(ProfileKind.SECH_SQ, A=A, offset=offset, scale=scale)


def _tanh(A=1.0, offset=0.0, scale=1.0):
    return ProfileFn(ProfileKind.TANH_SQ, A=A, offset=offset, scale=scale)


def _sin(A=1.0, offset=0.0, scale=1.0):
    return ProfileFn(ProfileKind.SIN, A=A, offset=offset, scale=scale)


def _kink(A=1.0, B=1.0, offset=0.0, scale=1.0):
    return ProfileFn(ProfileKind.KINK, A=A, B=B, offset=offset, scale=scale)


def _wp(A=1.0):
    return ProfileFn(ProfileKind.WEIERSTRASS_RECIP, A=A)


_CROSSING_PAIR = {"l11": 1.0, "l12": 0.0, "l21": -0.5, "l22": SQRT3 / 2, "eps": 1.0, "u0": 0.0, "v0": 0.0}


def _p(family, constants=None, profiles=None, label=""):
    return lambda params: make_solution(family, constants, profiles, params, label)


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        Preset(
            "e_generic",
            _p(Family.E_GENERIC, {"u0": 0.3, "h0": 1.0, "lam1": 1.0, "lam2": 0.5}, {"phi": _sin(0.5)}),
            ((-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0)),
        ),
        Preset(
            "e_periodic",
            _p(Family.E_PERIODIC, {"C": 1.0, "h0": 2.0}),
            ((-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)),
        ),
        Preset(
            "e_hyperbolic",
            _p(Family.E_HYPERBOLIC, {"C": 0.5, "h0": 1.0}, {"phi": _kink(0.3, B=0.0, offset=1.0)}),
            ((-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0)),
        ),
        Preset(
            "s_simple",
            _p(Family.S_SIMPLE, {"u0": 0.2, "v0": -0.1, "lam1": 0.6, "lam2": 0.8},
               {"phi": _sech(0.5, offset=1.0)}),
            ((-0.4, 0.4), (-1.5, 1.5), (-1.5, 1.5)),
        ),
        Preset(
            "s_rotating",
            _p(Family.S_ROTATING, {"u0": 0.1, "v0": 0.2, "h0": 1.0}, {"phi": _sin(0.3)}),
            ((-0.3, 0.3), (-1.0, 1.0), (-1.0, 1.0)),
        ),
        Preset(
            "s_fresnel",
            _p(Family.S_FRESNEL, {"u0": 0.0, "v0": 0.0, "h0": 1.0}, {"phi": _sech(0.5, offset=0.5)}),
            ((-0.3, 0.3), (-1.0, 1.0), (-1.0, 1.0)),
        ),
        Preset(
            "es_generic",
            _p(Family.ES_RANK2, {"h0": 2.0, "eps": 1.0},
               {"F": _sin(0.3), "G": _sin(0.3, scale=0.8), "lam21": _kink(0.2, B=0.0, offset=1.0)}),
            ((-0.3, 0.3), (-1.5, 1.5), (-1.5, 1.5)),
        ),
        Preset(
            "ss_generic",
            _p(Family.SS_RANK2, {"eps": -1.0, "l11": 1.0, "l12": 0.0, "l21": 0.5, "l22": SQRT3 / 2,
                                 "u0": 0.1, "v0": -0.2},
               {"h1": _sech(0.5, offset=1.0), "h2": _sech(0.3, offset=0.5)}),
            ((-0.3, 0.3), (-1.5, 1.5), (-1.5, 1.5)),
        ),
        Preset(
            "es_tanh_antibump",
            _p(Family.ES_RANK2, {"h0": 2.0, "eps": 1.0}, {"F": _tanh(), "G": _tanh()}, "anti-bump"),
            ((-0.3, 0.3), (-2.0, 2.0), (-2.0, 2.0)),
            "anti-bump",
        ),
        Preset(
            "es_sech_bump",
            _p(Family.ES_RANK2, {"h0": 2.0, "eps": 1.0}, {"F": _sech(), "G": _sech()}, "bump"),
            ((-0.3, 0.3), (-2.0, 2.0), (-2.0, 2.0)),
            "bump",
        ),
        Preset(
            "ss_sech_bump",
            _p(Family.SS_RANK2, _CROSSING_PAIR, {"h1": _sech(), "h2": _sech()}, "bump"),
            ((-0.2, 0.2), (-2.0, 2.0), (-2.0, 2.0)),
            "bump",
        ),
        Preset(
            "ss_kink",
            _p(Family.SS_RANK2, _CROSSING_PAIR, {"h1": _kink(1.0, 1.0), "h2": _kink(1.0, 1.0)}, "kink"),
            ((-0.2, 0.2), (0.3, 2.0), (0.5, 2.0)),
            "kink",
        ),
        Preset(
            "ss_weierstrass_periodic",
            _p(Family.SS_RANK2, _CROSSING_PAIR, {"h1": _wp(1.0), "h2": _wp(1.0)}, "periodic"),
            ((-0.1, 0.1), (-1.5, 1.5), (-1.5, 1.5)),
            "periodic",
        ),
        Preset(
            "ss_mixed",
            _p(Family.SS_MIXED, {"phi1": 0.0, "phi2": math.pi / 3, "u0": 0.1, "v0": 0.0},
               {"h1": _sech(0.5, offset=1.0), "h2": _sech(0.5, offset=0.5)}),
            ((-0.3, 0.3), (-1.5, 1.5), (-1.5, 1.5)),
        ),
        Preset(
            "ss_branch_a",
            _p(Family.SS_BRANCH_A, {"v0": 0.2, "h0": 1.0}, {"F": _sin(0.3, offset=0.5)}),
            ((-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0)),
        ),
        Preset(
            "ee_degenerate",
            _p(Family.EE_DEGENERATE),
            # dF/ds = 1 + t - y exp(-1 - s) vanishes for y near 1 + t; keep y small.
            ((-0.1, 0.2), (-0.2, 0.2), (-0.3, 0.1)),
        ),
    ]
}


def preset(name: str, params: PhysParams = PhysParams()) -> SolutionDescriptor:
    try:
        return PRESETS[name].descriptor(params)
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
