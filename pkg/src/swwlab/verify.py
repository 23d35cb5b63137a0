"""Numerical checks that evaluated fields solve the shallow water systems.

Derivatives of evaluated fields use the fourth-order central stencil
``(-f(+2h) + 8 f(+h) - 8 f(-h) + f(-2h)) / (12 h)``, combined over steps
``h`` and ``h/2`` by Richardson extrapolation ``(16 D(h/2) - D(h)) / 15``.
When a field is defined implicitly, every stencil point is solved from the
root at the centre point with an inner tolerance of ``max(h**4 / 100, 1e-13)``
so that solver noise stays far below the differencing error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .catalog.families import Evaluable, local_field
from .core import PhysParams, Point, State, build_coefficient_matrices
from .errors import DomainSingular, StencilFailure, SwwlabError
from .solver import continue_from_seed

Field = Callable[[Point], State]

DEFAULT_STEP = 1e-3
SQRT3 = math.sqrt(3.0)


class SystemKind(str, Enum):
    SWW = "SWW"
    RSWW = "RSWW"


@dataclass
class ResidualReport:
    res: tuple[float, float, float]  # momentum-x, momentum-y, mass
    fd_step: float
    richardson: bool = True

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.res)))


def inner_tolerance(step: float) -> float:
    return max(step**4 * 1e-2, 1e-13)


def _evaluate(field: Field, pt: Point) -> np.ndarray:
    try:
        s = field(pt)
    except (SwwlabError, ArithmeticError, ValueError) as exc:
        raise StencilFailure(f"field evaluation failed at {tuple(pt)}: {exc}") from exc
    arr = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise StencilFailure(f"non-finite state at {tuple(pt)}")
    return arr


def _d4(field: Field, pt: Point, axis: int, h: float) -> np.ndarray:
    base = np.array(pt, dtype=float)

    def at(k: int) -> np.ndarray:
        q = base.copy()
        q[axis] += k * h
        return _evaluate(field, Point(*q))

    return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)


def derivative(field: Field, pt: Point, axis: int, step: float = DEFAULT_STEP, richardson: bool = True) -> np.ndarray:
    """d(u, v, h)/d(coordinate ``axis``) at ``pt``."""
    d_h = _d4(field, pt, axis, step)
    if not richardson:
        return d_h
    return (16.0 * _d4(field, pt, axis, 0.5 * step) - d_h) / 15.0


def spacetime_jacobian(
    field: Field, pt: Point, step: float = DEFAULT_STEP, richardson: bool = True, axes: Sequence[int] = (0, 1, 2)
) -> tuple[np.ndarray, np.ndarray]:
    """State at ``pt`` and the Jacobian with rows (u, v, h) and one column per axis."""
    pt = Point(*pt)
    centre = _evaluate(field, pt)
    cols = [derivative(field, pt, a, step, richardson) for a in axes]
    return centre, np.column_stack(cols)


def pde_residual(
    field: Field,
    pt: Point,
    p: PhysParams,
    system: SystemKind = SystemKind.SWW,
    step: float = DEFAULT_STEP,
    richardson: bool = True,
) -> ResidualReport:
    """Left-hand sides of the momentum and mass equations at ``pt``.

    For the rotating system the Coriolis terms ``-2 W v`` and ``+2 W u``
    are included; for the non-rotating one they are dropped.
    """
    centre, J = spacetime_jacobian(field, pt, step, richardson)
    return ResidualReport(_equations(centre, J, p, system), step, richardson)


def _equations(centre: np.ndarray, J: np.ndarray, p: PhysParams, system: SystemKind) -> tuple[float, float, float]:
    u, v, h = centre
    (u_t, u_x, u_y), (v_t, v_x, v_y), (h_t, h_x, h_y) = J
    g = p.g
    w = p.omega if SystemKind(system) is SystemKind.RSWW else 0.0
    r1 = u_t + u * u_x + v * u_y + g * h_x - 2.0 * w * v
    r2 = v_t + u * v_x + v * v_y + g * h_y + 2.0 * w * u
    r3 = h_t + u * h_x + v * h_y + h * (u_x + v_y)
    return (float(r1), float(r2), float(r3))


# Relative size of the rounding error of an evaluated (solver-backed) state.
_VALUE_NOISE = 4e-14


def jacobian_error_estimate(field: Field, pt: Point, step: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Richardson Jacobian at ``pt`` with an a-priori error estimate.

    The estimate adds the truncation part ``|D(h/2) - D(h)| / 15`` to the
    rounding part ``noise * |state| / h`` of the differenced values.
    """
    pt = Point(*pt)
    centre = _evaluate(field, pt)
    coarse = np.column_stack([_d4(field, pt, a, step) for a in range(3)])
    fine = np.column_stack([_d4(field, pt, a, 0.5 * step) for a in range(3)])
    J = (16.0 * fine - coarse) / 15.0
    truncation = float(np.max(np.abs(fine - coarse))) / 15.0
    rounding = _VALUE_NOISE * max(1.0, float(np.max(np.abs(centre)))) / step
    return centre, J, truncation + rounding


def trace_form_residual(field: Field, pt: Point, p: PhysParams, step: float = DEFAULT_STEP) -> float:
    """max over mu of |Tr(A^mu(u) du)| with du the space-time Jacobian."""
    centre, J = spacetime_jacobian(field, pt, step)
    m = build_coefficient_matrices(State(*centre), p)
    return float(max(abs(np.trace(A @ J)) for A in m.trace_forms))


def jacobian_rank(
    field: Field, pt: Point, rank_tol: float = 1e-7, step: float = DEFAULT_STEP
) -> tuple[int, tuple[float, ...]]:
    """Numerical rank of d(u, v, h)/d(x, y) at fixed t and its singular values."""
    _, J = spacetime_jacobian(field, pt, step, axes=(1, 2))
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[0] < 1e-12:
        return 0, tuple(float(s) for s in sv)
    rank = int(np.sum(sv / sv[0] > rank_tol))
    return rank, tuple(float(s) for s in sv)


# ----------------------------------------------------------------------------
# Checks on solution ansatzes: u = f(r) with wave vectors lambda^A(u).


@dataclass
class SolutionAnsatz:
    """A rank-k solution surface ``f: R^k -> (u, v, h)`` with its wave-vector functions.

    ``lambdas[A]`` maps a state array (u, v, h) to the wave vector
    (lam0, lam1, lam2) of invariant A.  Derivatives are taken by fourth-order
    central differences with step ``fd_step``.
    """

    f: Callable[[np.ndarray], np.ndarray]
    lambdas: Sequence[Callable[[np.ndarray], np.ndarray]]
    params: PhysParams = field(default_factory=PhysParams)
    fd_step: float = 1e-3

    @property
    def k(self) -> int:
        return len(self.lambdas)

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError("ansatz rank must be 1 or 2")

    def surface(self, r) -> np.ndarray:
        return np.asarray(self.f(np.asarray(r, dtype=float)), dtype=float)

    def f_r(self, r) -> np.ndarray:
        """3 x k matrix df/dr."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return np.column_stack([_central4(self.surface, r, j, self.fd_step) for j in range(r.size)])

    def lam(self, state) -> np.ndarray:
        """k x 3 matrix of wave vectors at ``state``."""
        s = np.asarray(state, dtype=float)
        return np.array([np.asarray(l(s), dtype=float) for l in self.lambdas])

    def eta(self, state) -> list[np.ndarray]:
        """[eta_0, eta_1, eta_2], each k x 3: d lam^A_a / d u^alpha."""
        s = np.asarray(state, dtype=float)
        # dlam[alpha] is the k x 3 derivative of the wave-vector matrix w.r.t. u^alpha.
        dlam = [_central4(self.lam, s, alpha, self.fd_step) for alpha in range(3)]
        return [np.array([[dlam[alpha][A, a] for alpha in range(3)] for A in range(self.k)]) for a in range(3)]


def _central4(func, x: np.ndarray, j: int, h: float) -> np.ndarray:
    def at(k: int):
        q = np.array(x, dtype=float)
        q[j] += k * h
        return np.asarray(func(q), dtype=float)

    return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)


def trace_condition_residual(a: SolutionAnsatz, rvals, p: Optional[PhysParams] = None) -> np.ndarray:
    """Trace conditions for the ansatz at ``rvals``.

    k = 1: Tr(A^mu f_r lam) for mu = 1..3.
    k = 2: the same three, followed by Tr(A^mu f_r eta_a f_r lam) for
    mu = 1..3 (outer) and a = 0..2 (inner).  Entries that cannot be
    evaluated are NaN.
    """
    p = p or a.params
    rvals = np.atleast_1d(np.asarray(rvals, dtype=float))
    if rvals.size != a.k:
        raise ValueError(f"expected {a.k} invariant values, got {rvals.size}")
    try:
        state = a.surface(rvals)
        fr = a.f_r(rvals)
        lam = a.lam(state)
        forms = build_coefficient_matrices(State(*state), p).trace_forms
        out = [np.trace(A @ fr @ lam) for A in forms]
        if a.k == 2:
            etas = a.eta(state)
            out += [np.trace(A @ fr @ eta @ fr @ lam) for A in forms for eta in etas]
    except (SwwlabError, ArithmeticError, ValueError):
        return np.full(3 if a.k == 1 else 12, np.nan)
    return np.array(out, dtype=float)


def dc_check(
    a: SolutionAnsatz,
    X: Callable[[np.ndarray], Sequence[Sequence[float]]],
    field: Field,
    pt: Point,
    step: float = DEFAULT_STEP,
) -> tuple[float, float]:
    """Differential-constraint residuals of the fields ``X(state)`` at ``pt``.

    Returns (max |lam^A_i xi^i_a|, max |xi^i_a du^alpha/dx^i|); the first
    says the fields annihilate the wave vectors, the second that the
    evaluated field is invariant along them.
    """
    centre, J = spacetime_jacobian(field, pt, step)
    xis = np.atleast_2d(np.asarray(X(centre), dtype=float))
    lam = a.lam(centre)
    annihilation = float(np.max(np.abs(lam @ xis.T)))
    invariance = float(np.max(np.abs(J @ xis.T)))
    return annihilation, invariance


# ----------------------------------------------------------------------------
# Evaluated catalog solutions


def _candidate_steps(step: float, factor: float) -> list[float]:
    """Decreasing trial steps: fractional powers of the stretch factor merged
    with halvings, down to ``step / (64 * factor)``."""
    raw = [step * factor ** (-k / 4.0) for k in range(5)]
    floor = step / (64.0 * factor)
    h = step
    while h >= floor:
        raw.append(h)
        h *= 0.5
    steps: list[float] = []
    for h in sorted(raw, reverse=True):
        if not steps or h < 0.9 * steps[-1]:
            steps.append(h)
    return steps


def solution_residual(
    sol: Evaluable,
    pt: Point,
    p: PhysParams,
    system: SystemKind = SystemKind.SWW,
    step: float = DEFAULT_STEP,
    center_root=None,
    adapt_step: bool = True,
) -> ResidualReport:
    """PDE residual of an implicitly defined solution at ``pt``.

    The root at ``pt`` is found by continuation from the analytic seed
    unless ``center_root`` is given.

    Solutions that expose ``stretch(pt)`` (lifted rotating-frame solutions,
    whose coordinate map magnifies small steps near singular times by that
    factor) are differenced, when ``adapt_step`` is set, with the candidate
    step (see ``_candidate_steps``) whose Jacobian error estimate
    (``jacobian_error_estimate``) is smallest; the scan stops once the
    estimate has grown twice in a row.  The step used is
    reported in ``fd_step``.
    """
    pt = Point(*pt)
    stretch = getattr(sol, "stretch", None)
    factor = max(1.0, stretch(pt)) if (adapt_step and stretch is not None) else 1.0
    steps = _candidate_steps(step, factor) if stretch is not None and adapt_step else [step]
    if center_root is None:
        try:
            center_root = continue_from_seed(sol.system, pt, tol=inner_tolerance(steps[-1])).root
        except SwwlabError as exc:
            raise StencilFailure(f"no root at the centre point {tuple(pt)}: {exc}") from exc
    if len(steps) == 1:
        return pde_residual(local_field(sol, pt, inner_tolerance(step), center_root), pt, p, system, step)
    best = None
    failure: Optional[StencilFailure] = None
    worse = 0
    for h in steps:
        field = local_field(sol, pt, inner_tolerance(h), center_root)
        try:
            centre, J, err = jacobian_error_estimate(field, pt, h)
        except StencilFailure as exc:
            failure = exc
            continue
        if best is None or err < best[0]:
            best = (err, h, centre, J)
            worse = 0
        else:
            worse += 1
            if worse >= 2:  # past the truncation/rounding balance point
                break
    if best is None:
        assert failure is not None
        raise failure
    _, h, centre, J = best
    return ResidualReport(_equations(centre, J, p, system), h, True)


# ----------------------------------------------------------------------------
# Algebraic identity for the nonconstant-direction acoustic pair


class GammaCheck(NamedTuple):
    identity: float  # left side of the gamma identity
    g_consistency: float  # (Psi - sqrt3) gamma2 / ((1 + sqrt3 Psi) gamma1) - 1
    gamma1: float
    gamma2: float


def gamma_functions(psi: float) -> tuple[float, float]:
    q = math.sqrt(1.0 + psi * psi)
    d1 = SQRT3 * psi**2 - 2.0 * psi - SQRT3
    d2 = SQRT3 * psi**3 - 5.0 * psi**2 + SQRT3 * psi + 3.0
    if abs(d1) < 1e-12 or abs(d2) < 1e-12:
        raise DomainSingular(f"gamma denominators vanish at Psi = {psi}")
    n2 = 3.0 * psi**4 - 4.0 * SQRT3 * psi**3 - 2.0 * psi**2 + 4.0 * SQRT3 * psi + 3.0
    gamma1 = 2.0 * d2 / (d1 * q)
    gamma2 = 2.0 * n2 / (d2 * q)
    return gamma1, gamma2


def gamma_identity_residual(psi: float) -> GammaCheck:
    """Evaluate the gamma identity and the G = 1 consistency at ``psi``."""
    psi = float(psi)
    g1, g2 = gamma_functions(psi)
    q = math.sqrt(1.0 + psi * psi)
    identity = (
        g1 * (SQRT3 * psi**2 - 2.0 * psi - SQRT3)
        + g2 * (psi**2 - 2.0 * SQRT3 * psi + 3.0)
        + g1 * g2 * q * (SQRT3 - psi)
    )
    denom = (1.0 + SQRT3 * psi) * g1
    if abs(denom) < 1e-12:
        raise DomainSingular(f"G-consistency denominator vanishes at Psi = {psi}")
    g_cons = (psi - SQRT3) * g2 / denom - 1.0
    return GammaCheck(float(identity), float(g_cons), g1, g2)
