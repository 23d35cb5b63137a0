import math

import numpy as np
import pytest

from helpers import acoustic_ansatz, entropic_ansatz, scattering_ansatz
from swwlab.catalog import local_field
from swwlab.catalog.presets import PRESETS, preset
from swwlab.core import PhysParams, Point
from swwlab.errors import DomainSingular, StencilFailure
from swwlab.symmetry import acoustic_simple_fields, entropic_simple_fields
from swwlab.verify import (
    SystemKind,
    dc_check,
    derivative,
    gamma_functions,
    gamma_identity_residual,
    jacobian_rank,
    pde_residual,
    solution_residual,
    trace_condition_residual,
    trace_form_residual,
)

SQRT3 = math.sqrt(3.0)
G1 = PhysParams(g=1.0)


def constant_field(u=0.3, v=-0.2, h=1.5):
    return lambda pt: (u, v, h)


# ----------------------------------------------------------------------------
# Residuals


def test_constant_field_residual():
    rep = pde_residual(constant_field(), Point(0.1, 0.2, 0.3), G1, SystemKind.SWW)
    assert rep.max_abs <= 1e-13
    assert rep.richardson


def test_acoustic_simple_wave_residual():
    # phi(r) = 0.1 r, direction (1, 0): r = -(3 * 0.1 r) t + x solved in closed form.
    from swwlab.catalog import Family, ProfileFn, ProfileKind, make_solution

    d = make_solution(Family.S_SIMPLE, {"u0": 0.0, "v0": 0.0, "lam1": 1.0, "lam2": 0.0},
                      {"phi": ProfileFn(ProfileKind.KINK, A=0.1, B=0.0)}, G1)
    pt = Point(0.1, 0.3, 0.0)
    root = [0.3 / 1.03]  # the seed has h = 0, so start from the closed-form root

    def exact(q):
        r = q.x / (1.0 + 0.3 * q.t)
        phi = 0.1 * r
        return (2.0 * phi, 0.0, phi * phi)

    assert local_field(d, pt, 1e-14, root)(pt) == pytest.approx(exact(pt), abs=1e-14)
    assert pde_residual(exact, pt, G1, SystemKind.SWW, 1e-3).max_abs <= 1e-7
    assert solution_residual(d, pt, G1, SystemKind.SWW, 1e-3, center_root=root).max_abs <= 1e-7


def test_stencil_failure_propagates():
    def broken(pt):
        if pt.x > 0.1005:
            raise StencilFailure("outside")
        return (0.0, 0.0, 1.0)

    with pytest.raises(StencilFailure):
        pde_residual(broken, Point(0.0, 0.1, 0.0), G1)


def test_fourth_order_convergence():
    field = lambda pt: (math.sin(pt.x), 0.0, 0.0)  # noqa: E731
    pt = Point(0.0, 0.4, 0.0)
    exact = math.cos(0.4)
    e1 = abs(derivative(field, pt, 1, 0.1, richardson=False)[0] - exact)
    e2 = abs(derivative(field, pt, 1, 0.05, richardson=False)[0] - exact)
    assert e1 / e2 >= 8.0
    assert abs(derivative(field, pt, 1, 0.1)[0] - exact) < e2


def test_rotating_residual_sees_coriolis_terms():
    # A state at rest is a solution without rotation but not with it unless balanced.
    field = lambda pt: (0.0, 0.0, 1.0 + 0.1 * pt.x)  # noqa: E731
    assert pde_residual(field, Point(0, 0, 0), G1, SystemKind.SWW).max_abs == pytest.approx(0.1, rel=1e-9)
    geostrophic = lambda pt: (0.0, 0.05, 1.0 + 0.1 * pt.x)  # noqa: E731 - 2 W v = g h_x with W = 1
    rep = pde_residual(geostrophic, Point(0, 0, 0), PhysParams(1.0, 1.0), SystemKind.RSWW)
    assert rep.max_abs <= 1e-12


# ----------------------------------------------------------------------------
# Trace form


def test_trace_form_examples():
    assert trace_form_residual(constant_field(), Point(0, 0, 0), G1) <= 1e-13
    shear = lambda pt: (pt.x, pt.y, 1.0)  # noqa: E731
    assert trace_form_residual(shear, Point(0.0, 0.2, 0.3), G1) == pytest.approx(2.0, abs=1e-10)
    d = preset("e_generic", G1)
    pt = Point(0.1, 0.2, -0.3)
    assert trace_form_residual(local_field(d, pt, 1e-14), pt, G1) <= 1e-7


def test_trace_form_matches_residual_on_random_fields():
    rng = np.random.default_rng(7)
    for _ in range(100):
        c = rng.normal(size=(3, 4))
        p = PhysParams(g=rng.uniform(0.5, 2.0))

        def field(pt, c=c):
            t, x, y = pt
            return tuple(c[k, 0] * math.sin(c[k, 1] * x + t) + c[k, 2] * y * y + c[k, 3] * t * x for k in range(2)) + \
                (2.0 + 0.3 * math.cos(c[2, 0] * x + c[2, 1] * y + c[2, 2] * t),)

        pt = Point(*rng.uniform(-1, 1, 3))
        a = trace_form_residual(field, pt, p)
        b = pde_residual(field, pt, p, SystemKind.SWW).max_abs
        assert a == pytest.approx(b, abs=1e-9)


# ----------------------------------------------------------------------------
# Rank


def test_rank_of_constant_field():
    assert jacobian_rank(constant_field(), Point(0, 0, 0))[0] == 0


def test_rank_two_for_crossing_waves():
    d = preset("ss_sech_bump", G1)
    for pt in PRESETS["ss_sech_bump"].sample(np.random.default_rng(2), 5):
        rank, sv = jacobian_rank(local_field(d, pt, 1e-14), pt)
        assert rank == 2
        assert sv[1] / sv[0] > 1e-3
        assert len(sv) == 2


# ----------------------------------------------------------------------------
# Trace conditions and differential constraints


def test_entropic_trace_conditions():
    a = entropic_ansatz()
    for r in np.linspace(-2, 2, 9):
        assert np.max(np.abs(trace_condition_residual(a, [r]))) <= 1e-8


def test_broken_entropic_ansatz_fails():
    res = trace_condition_residual(entropic_ansatz(broken=True), [0.4])
    assert np.max(np.abs(res)) >= 0.1 * G1.g * 1.0


@pytest.mark.parametrize("eps", [1.0, -1.0])
def test_acoustic_trace_conditions(eps):
    a = acoustic_ansatz(eps)
    for r in np.linspace(-2, 2, 9):
        assert np.max(np.abs(trace_condition_residual(a, [r]))) <= 1e-8


@pytest.mark.parametrize("eps", [1.0, -1.0])
def test_scattering_trace_conditions(eps):
    a = scattering_ansatz(eps)
    rng = np.random.default_rng(11)
    for rv in rng.uniform(-1.5, 1.5, (10, 2)):
        res = trace_condition_residual(a, rv)
        assert res.shape == (12,)
        assert np.max(np.abs(res)) <= 1e-6


def test_trace_condition_rank_mismatch():
    with pytest.raises(ValueError):
        trace_condition_residual(entropic_ansatz(), [0.1, 0.2])


def test_entropic_constraints():
    d = preset("e_generic", G1)
    c = d.constants
    pt = Point(0.1, 0.3, -0.2)
    X = entropic_simple_fields((c["lam1"], c["lam2"]))
    ann, inv = dc_check(entropic_ansatz(), X, local_field(d, pt, 1e-14), pt)
    assert ann <= 1e-8 and inv <= 1e-8


def test_acoustic_constraints():
    d = preset("s_simple", G1)
    c = d.constants
    pt = Point(0.1, 0.3, -0.2)
    X = acoustic_simple_fields((c["lam1"], c["lam2"]), int(c["eps"]), G1)
    ann, inv = dc_check(acoustic_ansatz(), X, local_field(d, pt, 1e-14), pt)
    assert ann <= 1e-8 and inv <= 1e-8


def test_non_invariant_field_fails_constraints():
    X = entropic_simple_fields((1.0, 0.5))
    field = lambda pt: (0.3 + pt.x, 0.0, 1.0)  # noqa: E731
    ann, inv = dc_check(entropic_ansatz(), X, field, Point(0, 0.2, 0))
    assert inv >= 0.01


# ----------------------------------------------------------------------------
# Nonconstant-direction identity


def test_gamma_examples():
    assert gamma_functions(0.0) == pytest.approx((-2 * SQRT3, 2.0), abs=1e-14)
    assert gamma_functions(1.0) == pytest.approx((math.sqrt(2) * (1 - SQRT3), math.sqrt(2) * (SQRT3 + 1)), abs=1e-14)
    for psi in (0.0, 1.0):
        assert abs(gamma_identity_residual(psi).identity) <= 1e-12
    with pytest.raises(DomainSingular):
        gamma_identity_residual(SQRT3)


def test_gamma_identity_grid():
    worst = 0.0
    for psi in np.linspace(-5, 5, 100):
        check = gamma_identity_residual(psi)
        worst = max(worst, abs(check.identity), abs(check.g_consistency))
    assert worst <= 1e-10
