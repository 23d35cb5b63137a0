"""Point symmetries of the rotating shallow water system and their commutators.

Vector fields act on the six-dimensional space (t, x, y, u, v, h); a field is
represented by its coefficient map ``pt6 -> (xi_t, xi_x, xi_y, eta_u, eta_v,
eta_h)``.  Brackets are evaluated numerically from the closed-form
coefficients, and the structure constants of the nine-dimensional algebra
are recovered by least squares over sample points.

The module also provides the first-order vector fields on (t, x, y) that
annihilate the wave vectors of the simple-wave and two-wave ansatzes
(conditional symmetries); they are functions of the state (u, v, h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import PhysParams
from .errors import DegenerateSamples

Coeffs = Callable[[np.ndarray], np.ndarray]

BASE_IDS = ("P0", "P1", "P2", "L", "G1", "G2", "D", "Z1", "Z2")
Y_IDS = tuple(f"Y{i}" for i in range(1, 10))
SOLVABLE_IDEAL = Y_IDS[:6]

_STEP = 1e-4


@dataclass(frozen=True)
class GeneratorField:
    """A vector field on (t, x, y, u, v, h) given by its coefficient map."""

    id: str
    omega: float
    coeffs: Coeffs = field(repr=False, compare=False)

    def __call__(self, pt6: Sequence[float]) -> np.ndarray:
        return np.asarray(self.coeffs(np.asarray(pt6, dtype=float)), dtype=float)


def _base_coeffs(gid: str, w: float) -> Coeffs:
    def p0(q):
        return np.array([1.0, 0, 0, 0, 0, 0])

    def p1(q):
        return np.array([0, 1.0, 0, 0, 0, 0])

    def p2(q):
        return np.array([0, 0, 1.0, 0, 0, 0])

    def rot(q):
        t, x, y, u, v, h = q
        return np.array([0.0, y, -x, v, -u, 0.0])

    def g1(q):
        c, s = math.cos(2 * w * q[0]), math.sin(2 * w * q[0])
        return np.array([0.0, -c / (2 * w), s / (2 * w), s, c, 0.0])

    def g2(q):
        c, s = math.cos(2 * w * q[0]), math.sin(2 * w * q[0])
        return np.array([0.0, s / (2 * w), c / (2 * w), c, -s, 0.0])

    def dil(q):
        t, x, y, u, v, h = q
        return np.array([0.0, x, y, u, v, 2.0 * h])

    def z1(q):
        t, x, y, u, v, h = q
        c, s = math.cos(2 * w * t), math.sin(2 * w * t)
        return np.array([
            s,
            w * (x * c + y * s),
            w * (y * c - x * s),
            w * ((2 * w * y - u) * c - (2 * w * x - v) * s),
            -w * ((2 * w * x + v) * c + (2 * w * y + u) * s),
            -2 * w * h * c,
        ])

    def z2(q):
        t, x, y, u, v, h = q
        c, s = math.cos(2 * w * t), math.sin(2 * w * t)
        return np.array([
            c,
            w * (y * c - x * s),
            -w * (x * c + y * s),
            -w * ((2 * w * y - u) * s + (2 * w * x - v) * c),
            w * ((2 * w * x + v) * s - (2 * w * y + u) * c),
            2 * w * h * s,
        ])

    table = {"P0": p0, "P1": p1, "P2": p2, "L": rot, "G1": g1, "G2": g2, "D": dil, "Z1": z1, "Z2": z2}
    return table[gid]


# Y_i as linear combinations of the base generators; entries may depend on omega.
# Y7, Y8 carry +omega*L: with that sign Y1, Y2, Y7 are exactly the coordinate
# fields of the map used in ``swwlab.rsww`` (Y7 t' = 1, Y7 x' = Y7 y' = 0).
_Y_COMBINATIONS: dict[str, Callable[[float], dict[str, float]]] = {
    "Y1": lambda w: {"P2": 1.0, "G2": -2 * w},
    "Y2": lambda w: {"P1": -1.0, "G1": -2 * w},
    "Y3": lambda w: {"P1": 1.0, "G1": -2 * w},
    "Y4": lambda w: {"P2": 1.0, "G2": 2 * w},
    "Y5": lambda w: {"L": -1.0},
    "Y6": lambda w: {"D": 1.0},
    "Y7": lambda w: {"P0": 1.0, "L": w, "Z2": -1.0},
    "Y8": lambda w: {"P0": 1.0, "L": w, "Z2": 1.0},
    "Y9": lambda w: {"Z1": -1.0 / w},
}


def _check_omega(omega: float) -> float:
    omega = float(omega)
    if not (math.isfinite(omega) and omega > 0):
        raise ValueError(f"omega must be positive, got {omega}")
    return omega


def combine(gid: str, omega: float, terms: Iterable[tuple[float, GeneratorField]]) -> GeneratorField:
    """The linear combination sum(c * X) of fields, as a new field."""
    terms = [(float(c), f) for c, f in terms]

    def coeffs(q):
        return sum(c * f(q) for c, f in terms)

    return GeneratorField(gid, omega, coeffs)


def generator(gid: str, omega: float) -> GeneratorField:
    """One of the nine base generators (P0..Z2) or of the Y1..Y9 basis."""
    w = _check_omega(omega)
    if gid in BASE_IDS:
        return GeneratorField(gid, w, _base_coeffs(gid, w))
    if gid in _Y_COMBINATIONS:
        combo = _Y_COMBINATIONS[gid](w)
        return combine(gid, w, [(c, generator(b, w)) for b, c in combo.items()])
    raise KeyError(f"unknown generator {gid!r}; expected one of {BASE_IDS + Y_IDS}")


def generator_coeffs(gid: str, pt6: Sequence[float], omega: float) -> np.ndarray:
    """Coefficients (xi_t, xi_x, xi_y, eta_u, eta_v, eta_h) of a generator at ``pt6``."""
    return generator(gid, omega)(pt6)


def y_basis(omega: float) -> list[GeneratorField]:
    return [generator(g, omega) for g in Y_IDS]


def _directional_derivative(f: GeneratorField, q: np.ndarray, direction: np.ndarray, step: float) -> np.ndarray:
    """sum_j direction_j * d f / d q_j with 4th-order central differences."""
    out = np.zeros(6)
    for j in range(6):
        if direction[j] == 0.0:
            continue
        hj = step * max(1.0, abs(q[j]))
        e = np.zeros(6)
        e[j] = hj
        d = (-f(q + 2 * e) + 8 * f(q + e) - 8 * f(q - e) + f(q - 2 * e)) / (12 * hj)
        out += direction[j] * d
    return out


def lie_bracket(a: GeneratorField, b: GeneratorField, pt6: Sequence[float], step: float = _STEP) -> np.ndarray:
    """Commutator coefficients of two fields at ``pt6``.

    With the fields read as derivations, the commutator is taken in the
    order that makes ``[a, b]`` act as ``b(a(.)) - a(b(.))``, i.e.
    ``[a, b]^i = b^j d_j a^i - a^j d_j b^i``; this is the convention in
    which the table returned by ``reference_table`` is stated.
    """
    q = np.asarray(pt6, dtype=float)
    return _directional_derivative(a, q, b(q), step) - _directional_derivative(b, q, a(q), step)


def bracket_field(a: GeneratorField, b: GeneratorField, step: float = _STEP) -> GeneratorField:
    """The commutator of two fields, itself usable as a field (numerically)."""
    return GeneratorField(f"[{a.id},{b.id}]", a.omega, lambda q: lie_bracket(a, b, q, step))


# ----------------------------------------------------------------------------
# Structure constants


@dataclass(frozen=True)
class StructureTable:
    """Expansion of the commutators of the Y basis in that basis.

    ``coeffs[i, j, k]`` is the coefficient of Y_{k+1} in [Y_{i+1}, Y_{j+1}];
    ``residual[i, j]`` is the largest pointwise misfit of that expansion.
    """

    omega: float
    coeffs: np.ndarray
    residual: np.ndarray

    def entry(self, i: int, j: int) -> np.ndarray:
        """Coefficient vector of [Y_i, Y_j] (1-based indices)."""
        return self.coeffs[i - 1, j - 1]

    @property
    def closure_residual(self) -> float:
        return float(np.max(self.residual))

    @property
    def antisymmetry(self) -> float:
        return float(np.max(np.abs(self.coeffs + self.coeffs.transpose(1, 0, 2))))


def _basis_matrix(basis: Sequence[GeneratorField], samples: np.ndarray) -> np.ndarray:
    return np.array([np.concatenate([f(q) for q in samples]) for f in basis]).T


def structure_constants(
    omega: float,
    sample_points: Sequence[Sequence[float]],
    step: float = _STEP,
    rank_tol: float = 1e-9,
) -> StructureTable:
    """Least-squares structure constants of the Y basis over ``sample_points``."""
    w = _check_omega(omega)
    samples = np.asarray(sample_points, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 6:
        raise ValueError("sample points must be 6-vectors (t, x, y, u, v, h)")
    if len(samples) < 6:
        raise DegenerateSamples(f"need at least 6 sample points, got {len(samples)}")
    if not np.all(np.isfinite(samples)):
        raise ValueError("sample points must be finite")
    basis = y_basis(w)
    M = _basis_matrix(basis, samples)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= rank_tol * sv[0]:
        raise DegenerateSamples(
            f"basis fields are not independent on the samples (sigma_min/sigma_max = {sv[-1] / sv[0]:.2e})"
        )
    n = len(basis)
    coeffs = np.zeros((n, n, n))
    residual = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            rhs = np.concatenate([lie_bracket(basis[i], basis[j], q, step) for q in samples])
            c, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            coeffs[i, j], coeffs[j, i] = c, -c
            residual[i, j] = residual[j, i] = float(np.max(np.abs(M @ c - rhs)))
    return StructureTable(w, coeffs, residual)


def reference_table(omega: float) -> np.ndarray:
    """Closed-form structure constants of the Y basis (same layout as ``StructureTable.coeffs``)."""
    w = _check_omega(omega)
    c = np.zeros((9, 9, 9))
    upper = {
        (1, 5): {2: -1}, (1, 6): {1: -1}, (1, 8): {3: -2 * w}, (1, 9): {1: -1},
        (2, 5): {1: 1}, (2, 6): {2: -1}, (2, 8): {4: -2 * w}, (2, 9): {2: -1},
        (3, 5): {4: -1}, (3, 6): {3: -1}, (3, 7): {1: 2 * w}, (3, 9): {3: 1},
        (4, 5): {3: 1}, (4, 6): {4: -1}, (4, 7): {2: 2 * w}, (4, 9): {4: 1},
        (7, 8): {9: -4 * w * w}, (7, 9): {7: -2}, (8, 9): {8: 2},
    }
    for (i, j), terms in upper.items():
        for k, val in terms.items():
            c[i - 1, j - 1, k - 1] = val
            c[j - 1, i - 1, k - 1] = -val
    return c


def random_samples(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """``n`` sample points in the cube [-scale, scale]^6."""
    return rng.uniform(-scale, scale, size=(n, 6))


def jacobi_residual(
    a: GeneratorField, b: GeneratorField, c: GeneratorField, pt6: Sequence[float], step: float = 1e-3
) -> float:
    """max |[[a,b],c] + [[b,c],a] + [[c,a],b]| at ``pt6`` (nested numerical brackets)."""
    q = np.asarray(pt6, dtype=float)
    total = (
        lie_bracket(bracket_field(a, b, step), c, q, step)
        + lie_bracket(bracket_field(b, c, step), a, q, step)
        + lie_bracket(bracket_field(c, a, step), b, q, step)
    )
    return float(np.max(np.abs(total)))


def ideal_leakage(table: StructureTable, ideal: Sequence[str] = SOLVABLE_IDEAL) -> float:
    """Largest coefficient outside ``ideal`` in brackets of ``ideal`` with anything."""
    inside = [Y_IDS.index(g) for g in ideal]
    outside = [k for k in range(9) if k not in inside]
    if not outside:
        return 0.0
    return float(np.max(np.abs(table.coeffs[np.ix_(inside, range(9), outside)])))


def derived_series_dims(coeffs: np.ndarray, indices: Sequence[int], tol: float = 1e-6) -> list[int]:
    """Dimensions of the derived series of the subalgebra spanned by ``indices``.

    ``coeffs`` uses the ``StructureTable.coeffs`` layout; the subalgebra is
    assumed closed.  The series stops when the dimension no longer drops.
    """
    n = coeffs.shape[0]
    basis = np.eye(n)[list(indices)]
    dims = [len(basis)]
    while len(basis):
        brackets = [np.einsum("i,j,ijk->k", a, b, coeffs) for a in basis for b in basis]
        mat = np.array(brackets)
        u, s, vt = np.linalg.svd(mat)
        rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
        basis = vt[:rank]
        if rank == dims[-1]:
            break
        dims.append(rank)
    return dims


def is_solvable(coeffs: np.ndarray, indices: Sequence[int], tol: float = 1e-6) -> bool:
    return derived_series_dims(coeffs, indices, tol)[-1] == 0


# ----------------------------------------------------------------------------
# Conditional-symmetry fields on (t, x, y)
#
# Each factory returns ``state -> array (m, 3)`` whose rows are the (t, x, y)
# components of fields annihilating the corresponding wave vectors.

StateFields = Callable[[Sequence[float]], np.ndarray]


def _speed(h: float, g: float) -> float:
    return math.sqrt(g * max(h, 0.0))


def entropic_simple_fields(direction: Sequence[float]) -> StateFields:
    """Two fields annihilating the entropic wave vector with a fixed direction."""
    l1, l2 = map(float, direction)

    def fields(s):
        u, v, _ = s
        a = l1 * u + l2 * v
        return np.array([[l1, a, 0.0], [l2, 0.0, a]])

    return fields


def acoustic_simple_fields(direction: Sequence[float], eps: int = 1, params: PhysParams = PhysParams()) -> StateFields:
    """Two fields annihilating the acoustic wave vector (sign ``eps``) with a fixed unit direction."""
    l1, l2 = map(float, direction)
    norm = math.hypot(l1, l2)
    l1, l2 = l1 / norm, l2 / norm

    def fields(s):
        u, v, h = s
        a = l1 * u + l2 * v + eps * _speed(h, params.g)
        return np.array([[l1, a, 0.0], [l2, 0.0, a]])

    return fields


def material_field() -> StateFields:
    """The particle-path field d_t + u d_x + v d_y (annihilates every entropic wave vector)."""

    def fields(s):
        u, v, _ = s
        return np.array([[1.0, u, v]])

    return fields


def entropic_acoustic_field(
    entropic_dir: Sequence[float], acoustic_dir: Sequence[float], eps: int = 1, params: PhysParams = PhysParams()
) -> StateFields:
    """One field annihilating an entropic and an acoustic wave vector of fixed directions."""
    a1, a2 = map(float, entropic_dir)
    b1, b2 = map(float, acoustic_dir)
    nb = math.hypot(b1, b2)
    b1, b2 = b1 / nb, b2 / nb
    delta = a1 * b2 - a2 * b1

    def fields(s):
        u, v, h = s
        c = eps * _speed(h, params.g)
        return np.array([[delta, delta * u - a2 * c, delta * v + a1 * c]])

    return fields


def acoustic_pair_field(phi1: float, phi2: float, params: PhysParams = PhysParams()) -> StateFields:
    """One field annihilating acoustic waves of opposite signs with directions (sin phi, cos phi)."""
    s12 = math.sin(phi1 - phi2)
    cx = math.cos(phi1) + math.cos(phi2)
    sy = math.sin(phi1) + math.sin(phi2)

    def fields(s):
        u, v, h = s
        c = _speed(h, params.g)
        return np.array([[s12, s12 * u + cx * c, s12 * v - sy * c]])

    return fields


def cross_field(wave_vectors: Callable[[Sequence[float]], np.ndarray]) -> StateFields:
    """The field lam1 x lam2 for any pair of wave vectors given as a function of the state."""

    def fields(s):
        lam = np.asarray(wave_vectors(s), dtype=float)
        return np.cross(lam[0], lam[1])[None, :]

    return fields


def conditional_fields_for(d) -> Optional[StateFields]:
    """Conditional-symmetry fields of a catalog solution, where they are known in closed form.

    Entropic families use the particle-path field; constant-direction
    acoustic families use the fields built from their fixed directions.
    Returns None for families whose wave directions vary with the state.
    """
    from .catalog.families import Family
    from .core import make_wave_vector

    fam, c, params = d.family, d.constants, d.params
    if fam in (Family.E_GENERIC, Family.E_PERIODIC, Family.E_HYPERBOLIC, Family.EE_DEGENERATE):
        return material_field()
    if fam is Family.S_SIMPLE:
        return acoustic_simple_fields((c["lam1"], c["lam2"]), int(c["eps"]), params)
    if fam is Family.SS_MIXED:
        return acoustic_pair_field(c["phi1"], c["phi2"], params)
    if fam is Family.SS_RANK2:
        (a1, b1), (a2, b2) = d.model.lam
        signs = (1, int(d.model.sigma))

        def waves(s):
            from .core import State

            st = State(*map(float, s))
            return np.array([
                make_wave_vector("S", signs[0], (a1, b1), st, params).as_array(),
                make_wave_vector("S", signs[1], (a2, b2), st, params).as_array(),
            ])

        return cross_field(waves)
    return None


def annihilation_residual(fields: StateFields, wave_vectors: np.ndarray, state: Sequence[float]) -> float:
    """max |lam^A_i xi^i_a| for the given wave vectors (rows) at ``state``."""
    xis = np.atleast_2d(fields(state))
    return float(np.max(np.abs(np.atleast_2d(wave_vectors) @ xis.T)))


def commutation_report(
    omega: float, samples: int, rng: Optional[np.random.Generator] = None
) -> tuple[StructureTable, float]:
    """Structure table from random samples and its largest deviation from ``reference_table``."""
    rng = rng if rng is not None else np.random.default_rng(0)
    table = structure_constants(omega, random_samples(rng, samples))
    return table, float(np.max(np.abs(table.coeffs - reference_table(omega))))
