"""Nonlinear solvers for the implicit Riemann-invariant relations.

Every solution family is defined implicitly by ``F(r; t, x, y) = 0`` for one
or two invariants ``r``.  Roots are followed continuously from an analytic
seed (a point where the relation is linear and the root is known exactly),
and grid evaluation uses a two-pass continuation whose result does not
depend on how the second pass is scheduled.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Grid, Point
from .errors import DomainError, NoConvergence, SingularJacobian, SwwlabError

_FD_SCALE = np.finfo(float).eps ** (1.0 / 3.0)
_SINGULAR = 1e-14

Residual = Callable[[np.ndarray, Point], np.ndarray]


@dataclass(frozen=True)
class ImplicitSystem:
    """``residual(r, pt)`` vanishes at the invariants of the solution at ``pt``.

    ``seed_point``/``seed_root`` give a point where the root is known exactly;
    continuation always starts there.  ``chart``, if given, maps a point to an
    equivalent system and point (same residual) whose straight continuation
    path should be followed instead, e.g. one that avoids singular coordinates.
    """

    dim: int
    residual: Residual
    jacobian: Optional[Callable[[np.ndarray, Point], np.ndarray]] = None
    seed_point: Point = Point(0.0, 0.0, 0.0)
    seed_root: Optional[tuple[float, ...]] = None
    chart: Optional[Callable[[Point], tuple["ImplicitSystem", Point]]] = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"implicit systems have 1 or 2 unknowns, got {self.dim}")
        if self.seed_root is not None and len(self.seed_root) != self.dim:
            raise ValueError("seed_root length does not match dim")

    @property
    def seed(self) -> np.ndarray:
        if self.seed_root is None:
            return np.zeros(self.dim)
        return np.asarray(self.seed_root, dtype=float)

    def evaluate(self, r: np.ndarray, pt: Point) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.residual(r, pt), dtype=float))

    def jac(self, r: np.ndarray, pt: Point) -> np.ndarray:
        if self.jacobian is not None:
            return np.atleast_2d(np.asarray(self.jacobian(r, pt), dtype=float))
        return fd_jacobian(lambda q: self.evaluate(q, pt), r)


@dataclass
class SolveReport:
    root: np.ndarray
    converged: bool
    iterations: int
    jac_min_sv: float
    jac_det: float = math.nan
    residual: float = math.nan
    catastrophe: bool = False
    error: str = ""

    @classmethod
    def failure(cls, dim: int, error: str, iterations: int = 0) -> "SolveReport":
        return cls(np.full(dim, np.nan), False, iterations, math.nan, error=error)


def fd_jacobian(func: Callable[[np.ndarray], np.ndarray], r: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian with step cbrt(eps) * max(1, |r_j|)."""
    r = np.asarray(r, dtype=float)
    cols = []
    for j in range(r.size):
        step = _FD_SCALE * max(1.0, abs(r[j]))
        rp = r.copy()
        rm = r.copy()
        rp[j] += step
        rm[j] -= step
        cols.append((func(rp) - func(rm)) / (rp[j] - rm[j]))
    return np.column_stack(cols)


def min_singular_value(J: np.ndarray) -> float:
    """Smallest singular value of a 1x1 or 2x2 matrix (closed form), else by SVD."""
    if J.shape == (1, 1):
        return abs(float(J[0, 0]))
    if J.shape == (2, 2):
        det = abs(float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]))
        fro2 = float(np.sum(J * J))
        smax = math.sqrt(0.5 * (fro2 + math.sqrt(max(fro2 * fro2 - 4.0 * det * det, 0.0))))
        return det / smax if smax > 0 else 0.0
    return float(np.linalg.svd(J, compute_uv=False)[-1])


def _norm(f: np.ndarray) -> float:
    n = float(np.max(np.abs(f)))
    return n if math.isfinite(n) else math.inf


def _safe_eval(sys: ImplicitSystem, r: np.ndarray, pt: Point) -> tuple[np.ndarray, float]:
    try:
        f = sys.evaluate(r, pt)
    except (DomainError, ZeroDivisionError, OverflowError, ValueError):
        return np.full(sys.dim, np.inf), math.inf
    return f, _norm(f)


def _jac_summary(sys: ImplicitSystem, r: np.ndarray, pt: Point) -> tuple[float, float]:
    try:
        J = sys.jac(r, pt)
    except (SwwlabError, ZeroDivisionError, OverflowError, ValueError):
        return math.nan, math.nan
    if not np.all(np.isfinite(J)):
        return math.nan, math.nan
    return min_singular_value(J), float(np.linalg.det(J))


def _bracket(sys: ImplicitSystem, pt: Point, center: float, radius: float, samples: int = 64):
    """Closest sign-changing bracket around ``center`` (scalar systems)."""
    f0, n0 = _safe_eval(sys, np.array([center]), pt)
    if not math.isfinite(n0):
        return None
    prev = {1: (center, f0[0]), -1: (center, f0[0])}
    for k in range(1, samples + 1):
        off = radius * k / samples
        for side in (1, -1):
            r = center + side * off
            f, n = _safe_eval(sys, np.array([r]), pt)
            if not math.isfinite(n):
                continue
            r_prev, f_prev = prev[side]
            if f_prev == 0.0:
                return (r_prev, r_prev)
            if np.sign(f[0]) != np.sign(f_prev):
                return (min(r, r_prev), max(r, r_prev))
            prev[side] = (r, f[0])
    return None


def _bisect(sys: ImplicitSystem, pt: Point, lo: float, hi: float, tol: float, max_iter: int = 200):
    flo = sys.evaluate(np.array([lo]), pt)[0]
    if lo == hi:
        return lo, abs(flo), 0
    it = 0
    mid = 0.5 * (lo + hi)
    fmid = sys.evaluate(np.array([mid]), pt)[0]
    while it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        fmid = sys.evaluate(np.array([mid]), pt)[0]
        if abs(fmid) <= tol or hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(mid)):
            break
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return mid, abs(fmid), it


def solve_newton(
    sys: ImplicitSystem,
    pt: Point,
    seed: Sequence[float],
    tol: float = 1e-12,
    max_iter: int = 50,
    bracket_radius: float = 1.0,
) -> SolveReport:
    """Damped Newton iteration for ``sys.residual(., pt) = 0`` from ``seed``.

    Scalar systems fall back to bisection on the nearest sign-changing
    bracket within ``seed +- bracket_radius`` when Newton stalls or the
    derivative vanishes.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    r = np.array(seed, dtype=float).reshape(sys.dim)
    if not np.all(np.isfinite(r)):
        raise ValueError("seed must be finite")
    f = sys.evaluate(r, pt)
    fn = _norm(f)
    it = 0
    stalled = ""
    while fn > tol and it < max_iter:
        J = sys.jac(r, pt)
        if not np.all(np.isfinite(J)) or min_singular_value(J) < _SINGULAR:
            stalled = "singular"
            break
        step = -np.linalg.solve(J, f)
        lam = 1.0
        while True:
            trial = r + lam * step
            ft, ftn = _safe_eval(sys, trial, pt)
            if ftn <= tol or ftn < (1.0 - 1e-4 * lam) * fn:
                break
            lam *= 0.5
            if lam < 2.0**-30:
                break
        it += 1
        if not ftn < fn:
            stalled = "line search"
            break
        moved = float(np.max(np.abs(trial - r)))
        r, f, fn = trial, ft, ftn
        if moved <= 4 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(r)))):
            stalled = "stagnated"
            break

    if fn > tol and sys.dim == 1:
        br = _bracket(sys, pt, float(r[0]), bracket_radius)
        if br is None and stalled != "":
            br = _bracket(sys, pt, float(np.asarray(seed, dtype=float).reshape(1)[0]), bracket_radius)
        if br is not None:
            root, fb, extra = _bisect(sys, pt, br[0], br[1], tol)
            it += extra
            if fb < fn:
                r, fn = np.array([root]), fb
    if fn > tol:
        if stalled == "singular":
            raise SingularJacobian(f"derivative vanished at r = {r} with |F| = {fn:.3e}")
        raise NoConvergence(it, fn, stalled)
    min_sv, det = _jac_summary(sys, r, pt)
    return SolveReport(r, True, it, min_sv, det, fn)


def polish(sys: ImplicitSystem, pt: Point, root: Sequence[float], sweeps: int = 2) -> np.ndarray:
    """Refine a converged root with plain Newton steps, kept only while |F| drops.

    Used where roots feed finite differences: it pushes the residual from the
    solver tolerance down towards rounding level.
    """
    r = np.array(root, dtype=float).reshape(sys.dim)
    fn = _norm(sys.evaluate(r, pt))
    for _ in range(sweeps):
        if fn == 0.0:
            break
        try:
            trial = r - np.linalg.solve(sys.jac(r, pt), sys.evaluate(r, pt))
        except np.linalg.LinAlgError:
            break
        _, ftn = _safe_eval(sys, trial, pt)
        if not ftn < fn:
            break
        r, fn = trial, ftn
    return r


def _sign(x: float) -> int:
    if not math.isfinite(x) or x == 0.0:
        return 0
    return 1 if x > 0 else -1


def seed_orientation(sys: ImplicitSystem) -> int:
    """Sign of det(dF/dr) on the seed-connected branch at the seed point."""
    return _sign(_jac_summary(sys, sys.seed, sys.seed_point)[1])


def _flag(report: SolveReport, orientation: int, catastrophe_tol: float) -> SolveReport:
    if report.converged:
        small = not (report.jac_min_sv >= catastrophe_tol)
        flipped = orientation != 0 and _sign(report.jac_det) not in (orientation, 0)
        report.catastrophe = report.catastrophe or small or flipped
    return report


def continue_from_seed(
    sys: ImplicitSystem,
    pt: Point,
    tol: float = 1e-12,
    max_iter: int = 50,
    catastrophe_tol: float = 1e-8,
    max_step: float = 0.25,
) -> SolveReport:
    """Follow the seed-connected root along the segment from the seed point to ``pt``.

    The report is flagged ``catastrophe`` if the orientation of dF/dr changes
    along the way (the branch folded) or the Jacobian is numerically singular.
    """
    if sys.chart is not None:
        inner, inner_pt = sys.chart(Point(*pt))
        return continue_from_seed(inner, inner_pt, tol, max_iter, catastrophe_tol, max_step)
    orientation = seed_orientation(sys)
    p0 = np.array(sys.seed_point, dtype=float)
    p1 = np.array(pt, dtype=float)
    dist = float(np.max(np.abs(p1 - p0)))
    r = sys.seed
    s = 0.0
    ds = 1.0 if dist == 0.0 else min(1.0, max_step / dist)
    folded = False
    total = 0
    report = None
    while s < 1.0:
        s_next = min(1.0, s + ds)
        q = Point(*(p0 + s_next * (p1 - p0)))
        try:
            report = solve_newton(sys, q, r, tol=tol, max_iter=max_iter)
        except (NoConvergence, SingularJacobian, DomainError) as exc:
            ds *= 0.5
            if ds * max(dist, 1.0) < 1e-6:
                raise NoConvergence(total, math.nan, f"continuation stalled at s = {s:.6g}: {exc}") from exc
            continue
        jump = float(np.max(np.abs(report.root - r)))
        if s_next < 1.0 and ds > 1e-4 and jump > 0.5 * max(1.0, float(np.max(np.abs(r)))):
            ds *= 0.5
            continue
        total += report.iterations
        if orientation != 0 and _sign(report.jac_det) not in (orientation, 0):
            folded = True
        r = report.root
        s = s_next
        ds = min(2.0 * ds, 1.0 if dist == 0.0 else max_step / dist)
    if report is None:
        report = solve_newton(sys, pt, r, tol=tol, max_iter=max_iter)
    report.iterations = total
    report.catastrophe = folded
    return _flag(report, orientation, catastrophe_tol)


def _threads() -> int:
    raw = os.environ.get("SWWLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n <= 0:
        return os.cpu_count() or 1
    return n


def _coarse_indices(n: int, stride: int) -> list[int]:
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    return idx


def _nearest(sorted_idx: list[int], i: int) -> list[int]:
    """Coarse indices ordered by distance to ``i`` (ties toward lower index)."""
    return sorted(sorted_idx, key=lambda c: (abs(c - i), c))


@dataclass
class SweepResult:
    grid: Grid
    reports: np.ndarray  # object array of SolveReport, shape grid.shape
    coarse: tuple[list[int], list[int], list[int]] = field(default_factory=lambda: ([], [], []))

    def roots(self) -> np.ndarray:
        dim = next((rep.root.size for rep in self.reports.flat), 1)
        out = np.full(self.grid.shape + (dim,), np.nan)
        for idx, rep in np.ndenumerate(self.reports):
            if rep.converged:
                out[idx] = rep.root
        return out

    @property
    def converged(self) -> np.ndarray:
        return np.vectorize(lambda rep: rep.converged, otypes=[bool])(self.reports)

    @property
    def catastrophe(self) -> np.ndarray:
        return np.vectorize(lambda rep: rep.catastrophe, otypes=[bool])(self.reports)


def sweep_grid(
    sys: ImplicitSystem,
    grid: Grid,
    tol: float = 1e-12,
    max_iter: int = 50,
    stride: int = 8,
    catastrophe_tol: float = 1e-8,
    threads: Optional[int] = None,
) -> SweepResult:
    """Solve the implicit system at every grid cell by two-pass continuation.

    Pass 1 walks a coarse subgrid (every ``stride``-th index per axis, plus the
    last) in row-major order, seeding each cell from an already solved coarse
    neighbour; the first cell is reached by continuation from the analytic seed.
    Pass 2 solves every remaining cell independently from its nearest coarse
    root, so its result does not depend on scheduling.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    shape = grid.shape
    axes = (grid.axis("t"), grid.axis("x"), grid.axis("y"))
    coarse = tuple(_coarse_indices(n, stride) for n in shape)
    reports = np.empty(shape, dtype=object)
    orientation = seed_orientation(sys)

    def point(idx):
        return Point(float(axes[0][idx[0]]), float(axes[1][idx[1]]), float(axes[2][idx[2]]))

    def from_seed(pt):
        try:
            return continue_from_seed(sys, pt, tol, max_iter, catastrophe_tol)
        except SwwlabError as exc:
            return SolveReport.failure(sys.dim, f"{type(exc).__name__}: {exc}")

    def from_neighbour(pt, seed):
        try:
            rep = solve_newton(sys, pt, seed, tol=tol, max_iter=max_iter)
        except SwwlabError as exc:
            return SolveReport.failure(sys.dim, f"{type(exc).__name__}: {exc}")
        return _flag(rep, orientation, catastrophe_tol)

    pos = [{c: k for k, c in enumerate(ax)} for ax in coarse]
    for it in coarse[0]:
        for ix in coarse[1]:
            for iy in coarse[2]:
                idx = (it, ix, iy)
                pt = point(idx)
                neighbours = []
                for axis in (2, 1, 0):
                    k = pos[axis][idx[axis]]
                    if k > 0:
                        nb = list(idx)
                        nb[axis] = coarse[axis][k - 1]
                        neighbours.append(tuple(nb))
                rep = None
                for nb in neighbours:
                    prev = reports[nb]
                    if prev.converged and not prev.catastrophe:
                        rep = from_neighbour(pt, prev.root)
                        if rep.converged:
                            break
                if rep is None or not rep.converged:
                    rep = from_seed(pt)
                reports[idx] = rep

    coarse_sets = [set(c) for c in coarse]
    fine = [
        idx
        for idx in np.ndindex(*shape)
        if not all(idx[a] in coarse_sets[a] for a in range(3))
    ]

    def solve_fine(idx):
        pt = point(idx)
        candidates = [
            (ct, cx, cy)
            for ct in _nearest(coarse[0], idx[0])[:2]
            for cx in _nearest(coarse[1], idx[1])[:2]
            for cy in _nearest(coarse[2], idx[2])[:2]
        ]
        candidates.sort(key=lambda c: (sum(abs(c[a] - idx[a]) for a in range(3)), c))
        for c in candidates:
            prev = reports[c]
            if prev.converged and not prev.catastrophe:
                rep = from_neighbour(pt, prev.root)
                if rep.converged:
                    return rep
        return from_seed(pt)

    n_threads = threads if threads is not None else _threads()
    if n_threads > 1 and len(fine) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(solve_fine, fine))
    else:
        results = [solve_fine(idx) for idx in fine]
    for idx, rep in zip(fine, results):
        reports[idx] = rep
    return SweepResult(grid, reports, coarse)
