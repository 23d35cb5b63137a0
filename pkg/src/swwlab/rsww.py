"""Solutions of the rotating shallow water system from non-rotating ones.

The point transformation

    t' = -cot(W t) / (2W),  x' = (y - x cot(W t)) / 2,  y' = -(x + y cot(W t)) / 2

maps the rotating system (rotation rate W) onto the non-rotating one, and a
non-rotating state (u, v, h) at the image point lifts to

    u~ = -u cot - v + W (y + x cot),  v~ = u - v cot - W (x - y cot),  h~ = h csc^2.

The map is singular whenever sin(W t) = 0, so solutions live on intervals of
length pi/W.  Evaluating at ``t + t0`` (a time shift, default ``pi/(2W)``)
centres that interval on t = 0.  The implicit relation of a family is solved
directly in rotating coordinates: its residual is composed with the map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .catalog.families import Evaluable, FieldResult, eval_grid, eval_sww
from .core import Grid, Point, State
from .errors import SingularTime
from .solver import ImplicitSystem

_SINGULAR_SIN = 1e-12


@dataclass(frozen=True)
class TimeShift:
    t0: float

    def __post_init__(self):
        if not math.isfinite(self.t0):
            raise ValueError("time shift must be finite")

    @classmethod
    def centred(cls, omega: float) -> "TimeShift":
        """The shift pi/(2 omega) that puts t = 0 mid-way between singular times."""
        _check_omega(omega)
        return cls(math.pi / (2.0 * omega))


def _check_omega(omega: float) -> None:
    if not (math.isfinite(omega) and omega > 0):
        raise ValueError(f"omega must be positive, got {omega}")


def _cot_csc(t: float, omega: float) -> tuple[float, float]:
    s = math.sin(omega * t)
    if abs(s) <= _SINGULAR_SIN:
        raise SingularTime(f"sin({omega} * {t}) = {s:.3e}: transformation is singular")
    return math.cos(omega * t) / s, 1.0 / s


def map_independent(pt: Point, omega: float) -> Point:
    _check_omega(omega)
    t, x, y = pt
    cot, _ = _cot_csc(t, omega)
    return Point(-cot / (2.0 * omega), 0.5 * (y - x * cot), -0.5 * (x + y * cot))


def inverse_map(image: Point, omega: float) -> Point:
    """The preimage of ``image`` with time in (0, pi/omega)."""
    _check_omega(omega)
    tp, xp, yp = image
    cot = -2.0 * omega * tp
    t = (0.5 * math.pi - math.atan(cot)) / omega
    # Solve  -cot x + y = 2 x',  -x - cot y = 2 y'.
    det = cot * cot + 1.0
    x = (-cot * 2.0 * xp - 2.0 * yp) / det
    y = (2.0 * xp - cot * 2.0 * yp) / det
    return Point(t, x, y)


def lift_state(pt: Point, s: State, omega: float) -> State:
    """Rotating-frame state at ``pt`` from the non-rotating state at the image of ``pt``."""
    _check_omega(omega)
    t, x, y = pt
    u, v, h = s
    cot, csc = _cot_csc(t, omega)
    return State(
        -u * cot - v + omega * (y + x * cot),
        u - v * cot - omega * (x - y * cot),
        h * csc * csc,
    )


class RswwSolution:
    """A non-rotating solution carried to the rotating frame; evaluable like a family."""

    def __init__(self, base: Evaluable, omega: float, shift: Optional[TimeShift] = None):
        _check_omega(omega)
        self.base = base
        self.omega = float(omega)
        self.shift = shift if shift is not None else TimeShift.centred(omega)
        seed = inverse_map(base.system.seed_point, self.omega)
        seed_point = Point(seed.t - self.shift.t0, seed.x, seed.y)
        base_sys = base.system
        self._last: tuple[Optional[Point], Optional[Point]] = (None, None)
        self.system = ImplicitSystem(
            base_sys.dim,
            self._residual,
            jacobian=self._jacobian if base_sys.jacobian is not None else None,
            seed_point=seed_point,
            seed_root=tuple(base_sys.seed),
            chart=self._chart,
        )

    def shifted(self, pt: Point) -> Point:
        return Point(pt[0] + self.shift.t0, pt[1], pt[2])

    def image(self, pt: Point) -> Point:
        return map_independent(self.shifted(pt), self.omega)

    def _cached_image(self, pt: Point) -> Point:
        # Solvers evaluate many times at one point; remember the last image.
        key, img = self._last
        if key != pt:
            img = self.image(pt)
            self._last = (pt, img)
        return img

    def stretch(self, pt: Point) -> float:
        """Largest factor by which the map magnifies a small step near ``pt`` (at least 1)."""
        cot, _ = _cot_csc(self.shifted(Point(*pt))[0], self.omega)
        return max(1.0, 0.5 * (1.0 + cot * cot), abs(cot))

    def _chart(self, pt: Point) -> tuple[ImplicitSystem, Point]:
        # The lifted root at pt is the base root at its image; following the base
        # branch in image coordinates never crosses a singular time.
        return self.base.system, self.image(pt)

    def _residual(self, r: np.ndarray, pt: Point) -> np.ndarray:
        return self.base.system.residual(r, self._cached_image(pt))

    def _jacobian(self, r: np.ndarray, pt: Point) -> np.ndarray:
        return self.base.system.jacobian(r, self._cached_image(pt))

    def state(self, root, pt: Point) -> State:
        pt = Point(*pt)
        return lift_state(self.shifted(pt), self.base.state(root, self.image(pt)), self.omega)

    def invariants(self, root, pt: Point) -> tuple[float, float]:
        return self.base.invariants(root, self.image(Point(*pt)))


def eval_rsww(
    d: Evaluable,
    pt: Point,
    omega: float,
    shift: Optional[TimeShift] = None,
    tol: float = 1e-12,
) -> State:
    """Rotating-frame state of the solution ``d`` at ``pt``."""
    sol = RswwSolution(d, omega, shift)
    sol.image(Point(*pt))  # raises SingularTime before any solving
    state, _ = eval_sww(sol, pt, tol=tol)
    return state


def eval_rsww_grid(
    d: Evaluable,
    grid: Grid,
    omega: float,
    shift: Optional[TimeShift] = None,
    tol: float = 1e-12,
    **kwargs,
) -> FieldResult:
    return eval_grid(RswwSolution(d, omega, shift), grid, tol=tol, **kwargs)
