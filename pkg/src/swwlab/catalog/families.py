"""Closed-form rank-1 and rank-2 solution families of the shallow water system.

Each family is an implicit relation ``F(r; t, x, y) = 0`` for one or two
unknowns together with a closed-form map from the solved unknowns to the
state ``(u, v, h)``.  Every family is anchored at the origin, where the
relation becomes linear and its root is known exactly (the analytic seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Callable, Mapping, Optional, Protocol

import numpy as np

from ..core import Grid, PhysParams, Point, State
from ..errors import (
    AngleViolation,
    DomainError,
    MissingProfile,
    NonPositiveH0,
    SwwlabError,
    ZeroDirection,
)
from ..specfn import fresnel_c, fresnel_s
from ..solver import (
    ImplicitSystem,
    SolveReport,
    polish,
    SweepResult,
    continue_from_seed,
    solve_newton,
    sweep_grid,
)
from .profiles import ProfileFn

SQRT3 = math.sqrt(3.0)
ANGLE_TOL = 1e-10


class Family(str, Enum):
    E_GENERIC = "E_GENERIC"
    E_PERIODIC = "E_PERIODIC"
    E_HYPERBOLIC = "E_HYPERBOLIC"
    S_SIMPLE = "S_SIMPLE"
    S_ROTATING = "S_ROTATING"
    S_FRESNEL = "S_FRESNEL"
    ES_RANK2 = "ES_RANK2"
    SS_RANK2 = "SS_RANK2"
    SS_MIXED = "SS_MIXED"
    EE_DEGENERATE = "EE_DEGENERATE"
    SS_BRANCH_A = "SS_BRANCH_A"


@dataclass(frozen=True)
class FamilyInfo:
    rank: int
    unknowns: int
    constants: Mapping[str, float]
    profiles: tuple[str, ...]
    optional_profiles: Mapping[str, ProfileFn]
    summary: str
    origin: str


FAMILY_INFO: dict[Family, FamilyInfo] = {
    Family.E_GENERIC: FamilyInfo(
        1, 1, {"u0": 0.0, "h0": 1.0, "lam1": 1.0, "lam2": 0.0}, ("phi",), {},
        "entropic simple wave with constant direction: u = u0 - (lam2/lam1) phi, v = phi, h = h0",
        "rank-1 entropic, explicit invariant",
    ),
    Family.E_PERIODIC: FamilyInfo(
        1, 1, {"C": 1.0, "h0": 1.0}, (), {},
        "entropic simple wave u = C sin r, v = C cos r, h = h0",
        "rank-1 entropic, direction along the velocity",
    ),
    Family.E_HYPERBOLIC: FamilyInfo(
        1, 1, {"C": 1.0, "h0": 1.0}, ("phi",), {},
        "entropic simple wave u = phi, v = C/phi, h = h0",
        "rank-1 entropic, direction (v, u)",
    ),
    Family.S_SIMPLE: FamilyInfo(
        1, 1, {"u0": 0.0, "v0": 0.0, "lam1": 1.0, "lam2": 0.0, "eps": 1.0}, ("phi",), {},
        "acoustic simple wave with constant direction: h = phi**2",
        "rank-1 acoustic, constant direction",
    ),
    Family.S_ROTATING: FamilyInfo(
        1, 1, {"u0": 0.0, "v0": 0.0, "h0": 1.0, "eps": 1.0}, ("phi",), {},
        "acoustic simple wave with direction (sin phi, cos phi): h = (phi + h0)**2",
        "rank-1 acoustic, rotating direction",
    ),
    Family.S_FRESNEL: FamilyInfo(
        1, 1, {"u0": 0.0, "v0": 0.0, "h0": 1.0, "eps": 1.0}, ("phi",), {},
        "acoustic simple wave with Fresnel-integral velocities: h = (sqrt(phi) + h0)**2",
        "rank-1 acoustic, Fresnel integrals",
    ),
    Family.ES_RANK2: FamilyInfo(
        2, 2, {"h0": 2.0, "eps": 1.0}, ("F", "G"), {"lam21": ProfileFn.const(1.0)},
        "entropic-acoustic interaction (scattering): v = G(s), u = eps v/sqrt3 + F(r2)",
        "rank-2 entropic x acoustic",
    ),
    Family.SS_RANK2: FamilyInfo(
        2, 2,
        {"u0": 0.0, "v0": 0.0, "eps": 1.0, "l11": 1.0, "l12": 0.0, "l21": -0.5, "l22": SQRT3 / 2},
        ("h1", "h2"), {},
        "two acoustic waves at 120 degrees (nonscattering): h = (h1 + h2)**2",
        "rank-2 acoustic x acoustic, equal signs",
    ),
    Family.SS_MIXED: FamilyInfo(
        2, 2, {"u0": 0.0, "v0": 0.0, "phi1": 0.0, "phi2": math.pi / 3}, ("h1", "h2"), {},
        "two acoustic waves of opposite sign at 60 degrees: h = (h1 + h2)**2",
        "rank-2 acoustic x acoustic, opposite signs",
    ),
    Family.EE_DEGENERATE: FamilyInfo(
        1, 1,
        {"C1": 1.0, "C2": -1.0, "C3": 1.0, "C4": 1.0, "C5": math.e, "m": 1.0, "h0": 1.0},
        (), {},
        "two entropic invariants collapsing to one variable s (Jacobian rank 1)",
        "entropic x entropic, degenerate",
    ),
    Family.SS_BRANCH_A: FamilyInfo(
        1, 1, {"v0": 0.0, "h0": 1.0}, ("F",), {},
        "acoustic pair branch reducing to an entropic wave: u = F(s), v = v0 + u**2/2",
        "acoustic x acoustic, rank-1 branch",
    ),
}


class Evaluable(Protocol):
    """Anything with an implicit system and a map from its roots to states."""

    system: ImplicitSystem

    def state(self, root: np.ndarray, pt: Point) -> State: ...

    def invariants(self, root: np.ndarray, pt: Point) -> tuple[float, float]: ...


@dataclass(frozen=True)
class SolutionDescriptor:
    family: Family
    constants: Mapping[str, float]
    profiles: Mapping[str, ProfileFn]
    params: PhysParams = PhysParams()
    label: str = ""
    model: "_Model" = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constants", MappingProxyType(dict(self.constants)))
        object.__setattr__(self, "profiles", MappingProxyType(dict(self.profiles)))
        object.__setattr__(self, "model", _MODELS[self.family](self))

    @property
    def info(self) -> FamilyInfo:
        return FAMILY_INFO[self.family]

    @property
    def rank(self) -> int:
        return self.info.rank

    # The descriptor itself is evaluable through its model.
    @property
    def system(self) -> ImplicitSystem:
        return self.model.system

    def state(self, root, pt: Point) -> State:
        return self.model.state(np.asarray(root, dtype=float), pt)

    def invariants(self, root, pt: Point) -> tuple[float, float]:
        return self.model.invariants(np.asarray(root, dtype=float), pt)


def make_solution(
    family,
    constants: Optional[Mapping[str, float]] = None,
    profiles: Optional[Mapping[str, ProfileFn]] = None,
    params: Optional[PhysParams] = None,
    label: str = "",
) -> SolutionDescriptor:
    """Validate constants/profiles for ``family`` and build its descriptor.

    Missing constants take the family defaults (see ``FAMILY_INFO``).
    """
    family = Family(family)
    info = FAMILY_INFO[family]
    constants = dict(constants or {})
    unknown = set(constants) - set(info.constants)
    if unknown:
        raise ValueError(f"{family.value}: unknown constants {sorted(unknown)}")
    merged = {k: float(constants.get(k, v)) for k, v in info.constants.items()}
    for k, v in merged.items():
        if not math.isfinite(v):
            raise ValueError(f"{family.value}: constant {k} must be finite")
    profiles = dict(profiles or {})
    allowed = set(info.profiles) | set(info.optional_profiles)
    extra = set(profiles) - allowed
    if extra:
        raise ValueError(f"{family.value}: unknown profile slots {sorted(extra)}")
    for name in info.profiles:
        if name not in profiles:
            raise MissingProfile(f"{family.value} needs profile {name!r}")
    for name, default in info.optional_profiles.items():
        profiles.setdefault(name, default)
    for name, prof in profiles.items():
        if not isinstance(prof, ProfileFn):
            profiles[name] = ProfileFn.from_dict(prof)
    _validate(family, merged)
    return SolutionDescriptor(family, merged, profiles, params or PhysParams(), label)


def _validate(family: Family, c: dict[str, float]) -> None:
    if "h0" in c and family is not Family.S_SIMPLE and c["h0"] <= 0:
        raise NonPositiveH0(f"{family.value}: h0 must be positive, got {c['h0']}")
    if "eps" in c and c["eps"] not in (1.0, -1.0):
        raise ValueError(f"{family.value}: eps must be +1 or -1, got {c['eps']}")
    if family is Family.E_GENERIC and c["lam1"] == 0.0:
        raise ZeroDirection("E_GENERIC needs lam1 != 0")
    if family is Family.S_SIMPLE and c["lam1"] == 0.0 and c["lam2"] == 0.0:
        raise ZeroDirection("S_SIMPLE needs a nonzero direction")
    if family is Family.SS_RANK2:
        for a, b in (("l11", "l12"), ("l21", "l22")):
            if c[a] == 0.0 and c[b] == 0.0:
                raise ZeroDirection("SS_RANK2 directions must be nonzero")
        l1 = _unit(c["l11"], c["l12"])
        l2 = _unit(c["l21"], c["l22"])
        dot = l1[0] * l2[0] + l1[1] * l2[1]
        if abs(dot + c["eps"] / 2.0) > ANGLE_TOL:
            raise AngleViolation(
                f"SS_RANK2 needs lam1 . lam2 = -eps/2 = {-c['eps'] / 2}, got {dot:.15g}"
            )
    if family is Family.SS_MIXED:
        d = math.fmod(abs(c["phi1"] - c["phi2"]), 2.0 * math.pi)
        if min(abs(d - math.pi / 3), abs(d - 5 * math.pi / 3)) > ANGLE_TOL:
            raise AngleViolation(f"SS_MIXED needs |phi1 - phi2| = pi/3, got {d:.15g}")
    if family is Family.EE_DEGENERATE:
        if c["m"] == -1.0:
            raise ValueError("EE_DEGENERATE excludes m = -1")
        if c["C1"] == 0.0 or c["C4"] == 0.0:
            raise ValueError("EE_DEGENERATE needs C1 != 0 and C4 != 0")


def _unit(a: float, b: float) -> tuple[float, float]:
    n = math.hypot(a, b)
    return a / n, b / n


# ----------------------------------------------------------------------------
# Family models.  Each defines residual(r, pt), state(root, pt), invariants,
# and the exact root at the origin.


class _Model:
    unknowns = 1
    seed_root: tuple[float, ...] = (0.0,)

    def __init__(self, d: SolutionDescriptor):
        self.c = dict(d.constants)
        self.p = dict(d.profiles)
        self.g = d.params.g
        self.sg = math.sqrt(d.params.g)
        self.setup()
        self.system = ImplicitSystem(
            self.unknowns,
            self.residual,
            jacobian=self.jacobian if type(self).jacobian is not _Model.jacobian else None,
            seed_point=Point(0.0, 0.0, 0.0),
            seed_root=self.seed_root,
        )

    def setup(self) -> None:
        pass

    # Models may override this with the analytic derivative of ``residual`` in r.
    def jacobian(self, r: np.ndarray, pt: Point) -> np.ndarray:
        raise NotImplementedError

    def residual(self, r: np.ndarray, pt: Point) -> np.ndarray:
        raise NotImplementedError

    def state(self, root: np.ndarray, pt: Point) -> State:
        raise NotImplementedError

    def invariants(self, root: np.ndarray, pt: Point) -> tuple[float, float]:
        return float(root[0]), math.nan


class _EGeneric(_Model):
    def residual(self, r, pt):
        c = self.c
        rhs = -c["u0"] * c["lam1"] * pt.t + c["lam1"] * pt.x + c["lam2"] * pt.y
        return np.array([r[0] - rhs])

    def state(self, root, pt):
        c = self.c
        phi = self.p["phi"](root[0])
        return State(c["u0"] - c["lam2"] / c["lam1"] * phi, phi, c["h0"])


class _EPeriodic(_Model):
    def residual(self, r, pt):
        C = self.c["C"]
        s = r[0]
        return np.array([s - C * (-C * pt.t + pt.x * math.sin(s) + pt.y * math.cos(s))])

    def state(self, root, pt):
        C = self.c["C"]
        return State(C * math.sin(root[0]), C * math.cos(root[0]), self.c["h0"])


class _EHyperbolic(_Model):
    def _phi(self, r):
        phi = self.p["phi"](r)
        if phi == 0.0:
            raise DomainError("E_HYPERBOLIC needs phi(r) != 0")
        return phi

    def residual(self, r, pt):
        C = self.c["C"]
        phi = self._phi(r[0])
        return np.array([r[0] - (-2.0 * C * pt.t + C / phi * pt.x + phi * pt.y)])

    def state(self, root, pt):
        phi = self._phi(root[0])
        return State(phi, self.c["C"] / phi, self.c["h0"])


class _SSimple(_Model):
    def setup(self):
        self.l1, self.l2 = _unit(self.c["lam1"], self.c["lam2"])

    def _phi(self, r):
        phi = self.p["phi"](r)
        if phi < 0.0:
            raise DomainError(f"S_SIMPLE needs phi(r) >= 0, got {phi}")
        return phi

    def residual(self, r, pt):
        c = self.c
        phi = self._phi(r[0])
        speed = self.l1 * c["u0"] + self.l2 * c["v0"] + 3.0 * c["eps"] * self.sg * phi
        return np.array([r[0] - (-speed * pt.t + self.l1 * pt.x + self.l2 * pt.y)])

    def state(self, root, pt):
        c = self.c
        phi = self._phi(root[0])
        k = 2.0 * c["eps"] * self.sg * phi
        return State(c["u0"] + self.l1 * k, c["v0"] + self.l2 * k, phi * phi)


class _SRotating(_Model):
    def _phi(self, r):
        phi = self.p["phi"](r)
        if phi + self.c["h0"] <= 0.0:
            raise DomainError("S_ROTATING needs phi(r) + h0 > 0")
        return phi

    def residual(self, r, pt):
        c = self.c
        phi = self._phi(r[0])
        sn, cs = math.sin(phi), math.cos(phi)
        speed = c["u0"] * sn + c["v0"] * cs + c["eps"] * self.sg * (phi + c["h0"])
        return np.array([r[0] - (-speed * pt.t + sn * pt.x + cs * pt.y)])

    def state(self, root, pt):
        c = self.c
        phi = self._phi(root[0])
        k = 2.0 * c["eps"] * self.sg
        return State(c["u0"] - k * math.cos(phi), c["v0"] + k * math.sin(phi), (phi + c["h0"]) ** 2)


class _SFresnel(_Model):
    def _phi(self, r):
        phi = self.p["phi"](r)
        if phi < 0.0:
            raise DomainError(f"S_FRESNEL needs phi(r) >= 0, got {phi}")
        return phi

    def _velocity(self, phi):
        c = self.c
        arg = math.sqrt(2.0 * phi / math.pi)
        k = c["eps"] * math.sqrt(2.0 * math.pi * self.g)
        return c["u0"] + k * fresnel_s(arg), c["v0"] + k * fresnel_c(arg)

    def residual(self, r, pt):
        c = self.c
        phi = self._phi(r[0])
        u, v = self._velocity(phi)
        sn, cs = math.sin(phi), math.cos(phi)
        speed = sn * u + cs * v + c["eps"] * self.sg * (math.sqrt(phi) + c["h0"])
        return np.array([r[0] - (-speed * pt.t + sn * pt.x + cs * pt.y)])

    def state(self, root, pt):
        phi = self._phi(root[0])
        u, v = self._velocity(phi)
        return State(u, v, (math.sqrt(phi) + self.c["h0"]) ** 2)


class _ESRank2(_Model):
    """Unknowns (r2, s); r1 is recovered from s and r2."""

    unknowns = 2
    seed_root = (0.0, 0.0)

    def residual(self, r, pt):
        eps, h0 = self.c["eps"], self.c["h0"]
        r2, s = r[0], r[1]
        F = self.p["F"](r2)
        G = self.p["G"](s)
        f1 = r2 - (1.5 * F + 0.5 * h0) * pt.t + pt.x
        f2 = s - r2 + 0.5 * SQRT3 * eps * ((2.0 * G + SQRT3 * eps * F) * pt.t - SQRT3 * eps * pt.x - pt.y)
        return np.array([f1, f2])

    def state(self, root, pt):
        eps, h0 = self.c["eps"], self.c["h0"]
        F = self.p["F"](root[0])
        G = self.p["G"](root[1])
        bracket = F - 2.0 * SQRT3 / 3.0 * eps * G + h0
        if bracket <= 0.0:
            raise DomainError(f"ES_RANK2 needs F - 2 eps G/sqrt3 + h0 > 0, got {bracket}")
        return State(SQRT3 / 3.0 * eps * G + F, G, bracket * bracket / (4.0 * self.g))

    def invariants(self, root, pt):
        eps = self.c["eps"]
        F = self.p["F"](root[0])
        G = self.p["G"](root[1])
        lam = self.p["lam21"](G)
        r1 = lam * ((2.0 * G + SQRT3 * eps * F) * pt.t - SQRT3 * eps * pt.x - pt.y)
        return float(r1), float(root[0])


class _SSPair(_Model):
    """Two acoustic invariants with constant unit directions and signs (+1, sigma)."""

    unknowns = 2
    seed_root = (0.0, 0.0)

    def setup(self):
        c = self.c
        self.lam = (_unit(c["l11"], c["l12"]), _unit(c["l21"], c["l22"]))
        self.sigma = c["eps"]

    def _heights(self, r):
        return self.p["h1"](r[0]), self.p["h2"](r[1])

    def residual(self, r, pt):
        c = self.c
        hs = self._heights(r)
        out = np.empty(2)
        for i, (sign, (a, b)) in enumerate(zip((1.0, self.sigma), self.lam)):
            speed = a * c["u0"] + b * c["v0"] + 3.0 * sign * self.sg * hs[i]
            out[i] = r[i] - (-speed * pt.t + a * pt.x + b * pt.y)
        return out

    def jacobian(self, r, pt):
        k = 3.0 * self.sg * pt.t
        return np.diag([
            1.0 + k * self.p["h1"].derivative(r[0]),
            1.0 + k * self.sigma * self.p["h2"].derivative(r[1]),
        ])

    def state(self, root, pt):
        c = self.c
        h1, h2 = self._heights(root)
        H = h1 + h2
        if H <= 0.0:
            raise DomainError(f"acoustic pair needs h1 + h2 > 0, got {H}")
        (a1, b1), (a2, b2) = self.lam
        k = 2.0 * self.sg
        u = c["u0"] + k * (a1 * h1 + self.sigma * a2 * h2)
        v = c["v0"] + k * (b1 * h1 + self.sigma * b2 * h2)
        return State(u, v, H * H)

    def invariants(self, root, pt):
        return float(root[0]), float(root[1])


class _SSMixed(_SSPair):
    def setup(self):
        c = self.c
        self.lam = (
            (math.sin(c["phi1"]), math.cos(c["phi1"])),
            (math.sin(c["phi2"]), math.cos(c["phi2"])),
        )
        self.sigma = -1.0


class _EEDegenerate(_Model):
    def setup(self):
        self.seed_root = (self.c["C2"] / self.c["C4"],)

    def velocities(self, s: float) -> tuple[float, float]:
        c = self.c
        m = c["m"]
        if float(m).is_integer():
            if s == 0.0 and m < 0:
                raise DomainError("EE_DEGENERATE: u is singular at s = 0")
            u = (-s) ** int(m)
        else:
            if s > 0.0:
                raise DomainError("EE_DEGENERATE with non-integer m needs s <= 0")
            u = (-s) ** m
        v = c["C5"] * math.exp(c["C3"] / c["C1"] * m * s)
        if u == 0.0 or v == 0.0:
            raise DomainError("EE_DEGENERATE needs u != 0 and v != 0")
        return u, v

    def _r(self, s, pt):
        u, v = self.velocities(s)
        with np.errstate(over="ignore", divide="ignore"):
            r = (pt.t - pt.x / u, pt.t - pt.y / v)
        if not all(map(math.isfinite, r)):
            raise DomainError("EE_DEGENERATE: invariants overflow for velocities this close to 0")
        return r

    def residual(self, r, pt):
        c = self.c
        s = float(r[0])
        r1, r2 = self._r(s, pt)
        return np.array([s * (c["C3"] * r1 + c["C4"]) - (c["C1"] * r2 + c["C2"])])

    def state(self, root, pt):
        u, v = self.velocities(float(root[0]))
        return State(u, v, self.c["h0"])

    def invariants(self, root, pt):
        return self._r(float(root[0]), pt)


class _SSBranchA(_Model):
    def residual(self, r, pt):
        v0 = self.c["v0"]
        U = self.p["F"](r[0])
        q = 1.0 + U * U
        rhs = -U * (U * U - 2.0 * v0) / q * pt.t + 2.0 * U * U / q * pt.x - 2.0 * U / q * pt.y
        return np.array([r[0] - rhs])

    def state(self, root, pt):
        U = self.p["F"](root[0])
        return State(U, self.c["v0"] + 0.5 * U * U, self.c["h0"])


_MODELS: dict[Family, Callable[[SolutionDescriptor], _Model]] = {
    Family.E_GENERIC: _EGeneric,
    Family.E_PERIODIC: _EPeriodic,
    Family.E_HYPERBOLIC: _EHyperbolic,
    Family.S_SIMPLE: _SSimple,
    Family.S_ROTATING: _SRotating,
    Family.S_FRESNEL: _SFresnel,
    Family.ES_RANK2: _ESRank2,
    Family.SS_RANK2: _SSPair,
    Family.SS_MIXED: _SSMixed,
    Family.EE_DEGENERATE: _EEDegenerate,
    Family.SS_BRANCH_A: _SSBranchA,
}


# ----------------------------------------------------------------------------
# Evaluation


def eval_sww(d: Evaluable, pt: Point, tol: float = 1e-12, max_iter: int = 50) -> tuple[State, SolveReport]:
    """Solve the implicit relation at ``pt`` by continuation from the seed and map to a state."""
    report = continue_from_seed(d.system, Point(*pt), tol=tol, max_iter=max_iter)
    return d.state(report.root, Point(*pt)), report


def local_field(
    d: Evaluable, center: Point, tol: float = 1e-12, center_root=None
) -> Callable[[Point], State]:
    """State as a function of position near ``center``.

    The root at ``center`` is found by continuation (unless given); every other
    point is solved by Newton from that root, which keeps all evaluations on
    the same branch.  Roots are polished past ``tol`` so that differencing
    the returned field sees rounding-level noise only.
    """
    center = Point(*center)
    if center_root is None:
        center_root = continue_from_seed(d.system, center, tol=tol).root
    root0 = np.array(center_root, dtype=float)

    def field_at(pt: Point) -> State:
        pt = Point(*pt)
        rep = solve_newton(d.system, pt, root0, tol=tol)
        return d.state(polish(d.system, pt, rep.root), pt)

    return field_at


@dataclass
class FieldResult:
    """Per-cell evaluation of a solution on a grid."""

    grid: Grid
    states: np.ndarray  # shape grid.shape + (3,)
    invariants: np.ndarray  # shape grid.shape + (2,)
    converged: np.ndarray
    catastrophe: np.ndarray
    errors: np.ndarray  # object array of messages ("" when fine)
    sweep: SweepResult

    @property
    def h(self) -> np.ndarray:
        return self.states[..., 2]

    @property
    def all_converged(self) -> bool:
        return bool(self.converged.all())


def eval_grid(
    d: Evaluable,
    grid: Grid,
    tol: float = 1e-12,
    max_iter: int = 50,
    stride: int = 8,
    catastrophe_tol: float = 1e-8,
    threads: Optional[int] = None,
) -> FieldResult:
    sweep = sweep_grid(d.system, grid, tol, max_iter, stride, catastrophe_tol, threads)
    shape = grid.shape
    states = np.full(shape + (3,), np.nan)
    invs = np.full(shape + (2,), np.nan)
    converged = np.zeros(shape, dtype=bool)
    catastrophe = np.zeros(shape, dtype=bool)
    errors = np.full(shape, "", dtype=object)
    axes = (grid.axis("t"), grid.axis("x"), grid.axis("y"))
    for idx, rep in np.ndenumerate(sweep.reports):
        if not rep.converged:
            errors[idx] = rep.error
            continue
        pt = Point(float(axes[0][idx[0]]), float(axes[1][idx[1]]), float(axes[2][idx[2]]))
        try:
            states[idx] = d.state(rep.root, pt)
            invs[idx] = d.invariants(rep.root, pt)
        except (SwwlabError, ZeroDivisionError, OverflowError, ValueError) as exc:
            errors[idx] = f"{type(exc).__name__}: {exc}"
            rep.converged = False
            rep.error = errors[idx]
            continue
        converged[idx] = True
        catastrophe[idx] = rep.catastrophe
    return FieldResult(grid, states, invs, converged, catastrophe, errors, sweep)
