import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import local_maxima
from swwlab.catalog import FAMILY_INFO, Family, ProfileFn, ProfileKind, eval_grid, eval_sww, local_field, make_solution
from swwlab.catalog.presets import PRESETS, preset
from swwlab.core import Grid, PhysParams, Point
from swwlab.errors import AngleViolation, ConfigError, DomainError, MissingProfile, NonPositiveH0
from swwlab.verify import jacobian_rank

SQRT3 = math.sqrt(3.0)
G1 = PhysParams(g=1.0)
SECH = ProfileFn(ProfileKind.SECH_SQ)


# ----------------------------------------------------------------------------
# Construction and validation


def ss(l2, eps=1.0, profiles=None):
    return make_solution(Family.SS_RANK2, {"l11": 1.0, "l12": 0.0, "l21": l2[0], "l22": l2[1], "eps": eps},
                         profiles or {"h1": SECH, "h2": SECH}, G1)


def test_pair_at_120_degrees_accepted():
    d = ss((-0.5, SQRT3 / 2))
    l1, l2 = d.model.lam
    assert l1[0] * l2[0] + l1[1] * l2[1] == pytest.approx(-0.5, abs=1e-15)


def test_pair_at_60_degrees_accepted_for_negative_sign():
    ss((0.5, SQRT3 / 2), eps=-1.0)


@pytest.mark.parametrize("l2", [(0.0, 1.0), (0.5, SQRT3 / 2), (-0.5, SQRT3 / 2 + 1e-8)])
def test_pair_angle_violation(l2):
    with pytest.raises(AngleViolation):
        ss(l2)


def test_mixed_pair_angle():
    make_solution(Family.SS_MIXED, {"phi1": 0.0, "phi2": math.pi / 3}, {"h1": SECH, "h2": SECH}, G1)
    make_solution(Family.SS_MIXED, {"phi1": 1.0, "phi2": 1.0 - math.pi / 3}, {"h1": SECH, "h2": SECH}, G1)
    with pytest.raises(AngleViolation):
        make_solution(Family.SS_MIXED, {"phi1": 0.0, "phi2": math.pi / 4}, {"h1": SECH, "h2": SECH}, G1)


def test_missing_profile():
    with pytest.raises(MissingProfile):
        make_solution(Family.ES_RANK2, {}, {"F": SECH})


def test_non_positive_depth():
    with pytest.raises(NonPositiveH0):
        make_solution(Family.E_PERIODIC, {"h0": 0.0})


def test_unknown_constant_rejected():
    with pytest.raises(ValueError):
        make_solution(Family.E_PERIODIC, {"nope": 1.0})


def test_every_family_has_metadata():
    for fam in Family:
        make_args = {name: SECH for name in FAMILY_INFO[fam].profiles}
        d = make_solution(fam, {}, make_args, G1)
        assert d.rank in (1, 2)


# ----------------------------------------------------------------------------
# Point evaluation


def test_constant_entropic_state():
    d = make_solution(Family.E_GENERIC, {"u0": 0.4, "h0": 1.5}, {"phi": ProfileFn.const(0.0)}, G1)
    state, _ = eval_sww(d, Point(0.3, -1.2, 2.0))
    assert state == pytest.approx((0.4, 0.0, 1.5))


def test_periodic_entropic_state():
    d = make_solution(Family.E_PERIODIC, {"C": 1.0, "h0": 2.0}, {}, G1)
    state, rep = eval_sww(d, Point(0.0, 0.0, 1.0))
    r = 0.7390851332151607  # root of r = cos r (bisection oracle)
    assert rep.root[0] == pytest.approx(r, abs=1e-12)
    assert state == pytest.approx((math.sin(r), math.cos(r), 2.0), abs=1e-12)
    assert state == pytest.approx((0.673612, 0.739085, 2.0), abs=1e-6)


def test_constant_acoustic_pair():
    one = ProfileFn.const(1.0)
    d = ss((-0.5, SQRT3 / 2), profiles={"h1": one, "h2": one})
    for pt in [Point(0, 0, 0), Point(0.3, 1.0, -2.0)]:
        state, _ = eval_sww(d, pt)
        assert state == pytest.approx((1.0, SQRT3, 4.0), abs=1e-12)


ZERO_DEPTH_AT_SEED = {"ss_kink", "ss_weierstrass_periodic"}


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_seed_point_reproduces_closed_form(name):
    d = preset(name, G1)
    sys = d.system
    assert np.max(np.abs(sys.evaluate(sys.seed, sys.seed_point))) == 0.0
    if name in ZERO_DEPTH_AT_SEED:
        # The profiles vanish at zero, so h = (h1 + h2)**2 = 0: the seed is on the domain edge.
        with pytest.raises(DomainError):
            d.state(sys.seed, sys.seed_point)
        return
    state, rep = eval_sww(d, sys.seed_point)
    assert rep.iterations == 0 or np.array_equal(rep.root, sys.seed)
    assert state == d.state(sys.seed, sys.seed_point)


def test_domain_error_for_negative_root_argument():
    d = make_solution(Family.S_FRESNEL, {}, {"phi": ProfileFn(ProfileKind.KINK, A=1.0, B=0.0, offset=-1.0)}, G1)
    with pytest.raises(DomainError):
        d.state(np.array([0.0]), Point(0, 0, 0))


# ----------------------------------------------------------------------------
# Structural properties


def test_degenerate_entropic_pair_has_rank_one():
    pr = PRESETS["ee_degenerate"]
    d = pr.descriptor(G1)
    rng = np.random.default_rng(3)
    checked = 0
    for pt in pr.sample(rng, 20):
        rank, sv = jacobian_rank(local_field(d, pt, 1e-14), pt)
        assert rank == 1
        assert sv[1] / sv[0] < 1e-7
        checked += 1
    assert checked == 20


def test_branch_reduces_to_entropic_wave():
    pr = PRESETS["ss_branch_a"]
    d = pr.descriptor(G1)
    v0 = d.constants["v0"]
    for pt in pr.sample(np.random.default_rng(4), 20):
        field = local_field(d, pt, 1e-14)
        u, v, h = field(pt)
        assert v == pytest.approx(v0 + 0.5 * u * u, abs=1e-12)
        assert jacobian_rank(field, pt)[0] == 1


def test_scattering_pair_internal_consistency():
    d = preset("es_sech_bump", G1)
    res = eval_grid(d, Grid((-0.2, 0.2, 3), (-2, 2, 9), (-2, 2, 9)), tol=1e-12)
    eps, h0 = d.constants["eps"], d.constants["h0"]
    F, G = d.profiles["F"], d.profiles["G"]
    assert res.all_converged
    for idx in np.ndindex(*res.grid.shape):
        u, v, h = res.states[idx]
        r1, r2 = res.invariants[idx]
        # s is recovered through G's argument: v = G(s).  Check the two algebraic relations.
        assert u - SQRT3 / 3 * eps * v - F(r2) == pytest.approx(0.0, abs=1e-11)
        assert 4 * d.params.g * h - (F(r2) - 2 * SQRT3 / 3 * eps * v + h0) ** 2 == pytest.approx(0.0, abs=1e-11)


def test_constant_grid():
    d = make_solution(Family.E_GENERIC, {"u0": 0.2}, {"phi": ProfileFn.const(0.0)}, G1)
    res = eval_grid(d, Grid((0, 0, 1), (0, 1, 4), (0, 1, 4)))
    assert res.all_converged
    assert np.all(res.states == res.states[0, 0, 0])
    assert res.states.reshape(-1, 3).shape[0] == 16


def test_bump_pair_height_bound():
    d = preset("es_sech_bump", G1)
    res = eval_grid(d, Grid((0, 0, 1), (-5, 5, 64), (-5, 5, 64)))
    assert res.all_converged
    h0 = d.constants["h0"]
    assert np.max(res.h) <= (1 + 2 * SQRT3 / 3 + h0) ** 2 / (4 * d.params.g)


def test_crossing_bumps_at_initial_time():
    # h = (sech^2 xi1 + sech^2 xi2)^2 with independent linear xi: one peak at the crossing.
    d = preset("ss_sech_bump", G1)
    grid = Grid((0, 0, 1), (-4, 4, 65), (-4, 4, 65))
    res = eval_grid(d, grid)
    assert res.all_converged
    h = res.h[0]
    assert np.max(h) == pytest.approx(4.0, abs=1e-12)
    assert local_maxima(h) == [(32, 32)]
    assert np.all(h > 0)


# ----------------------------------------------------------------------------
# Profiles


PROFILES = [
    ProfileFn(ProfileKind.TANH_SQ, A=1.3, offset=0.2, scale=0.7),
    ProfileFn(ProfileKind.SECH_SQ, A=0.5, offset=1.0, scale=1.5),
    ProfileFn(ProfileKind.KINK, A=1.0, B=2.0),
    ProfileFn(ProfileKind.SIN, A=0.3, scale=0.8),
    ProfileFn(ProfileKind.WEIERSTRASS_RECIP, A=1.0),
    ProfileFn(ProfileKind.CUSTOM_TABLE, knots=(-2, -1, 0, 1, 2), values=(0, 0.5, 0.7, 1.5, 1.6)),
]


@pytest.mark.parametrize("prof", PROFILES, ids=lambda p: p.kind.value)
def test_profile_derivative(prof):
    for r in np.linspace(-1.7, 1.7, 15):
        h = 1e-7  # small enough that a jump in the second derivative at a table knot is harmless
        fd = (prof(r + h) - prof(r - h)) / (2 * h)
        assert prof.derivative(r) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("prof", PROFILES, ids=lambda p: p.kind.value)
def test_profile_dict_round_trip(prof):
    assert ProfileFn.from_dict(prof.to_dict()) == prof


def test_kink_formula():
    k = ProfileFn(ProfileKind.KINK, A=2.0, B=3.0)
    assert k(0.5) == pytest.approx(2.0 * 0.5 / math.sqrt(1 + 3 * 0.25))


@settings(max_examples=200, deadline=None)
@given(st.floats(-20.0, 20.0))
def test_weierstrass_profile_bounded(r):
    # 0 <= A / P <= A / e_max with e_max the largest root of the cubic.
    prof = ProfileFn(ProfileKind.WEIERSTRASS_RECIP, A=1.0)
    val = prof(r)
    assert 0.0 <= val <= 1.0 / prof._invariants.real_minimum() + 1e-12


def test_pchip_table_is_c1_and_linear_table_is_not():
    knots, values = (-1.0, 0.0, 1.0), (0.0, 1.0, 0.0)
    smooth = ProfileFn(ProfileKind.CUSTOM_TABLE, knots=knots, values=values)
    kinked = ProfileFn(ProfileKind.CUSTOM_TABLE, knots=knots, values=values, interp="linear")
    e = 1e-7
    assert abs(smooth.derivative(-e) - smooth.derivative(e)) < 1e-5
    slope_left = (kinked(0.0) - kinked(-e)) / e
    slope_right = (kinked(e) - kinked(0.0)) / e
    assert slope_left - slope_right == pytest.approx(2.0, abs=1e-6)


def test_bad_profile_specs():
    with pytest.raises(ConfigError):
        ProfileFn.from_dict({"kind": "nope"})
    with pytest.raises(ConfigError):
        ProfileFn.from_dict({"kind": "sin", "zz": 1})
    with pytest.raises(ValueError):
        ProfileFn(ProfileKind.CUSTOM_TABLE, knots=(1.0, 0.0), values=(0.0, 1.0))
