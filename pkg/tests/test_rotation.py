import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from wada_lab import Lift
from wada_lab.families import (EPS0, make_arnold, make_five_piece, make_random_two_turn,
                               make_tent_two_turn, phi_star)
from wada_lab.rotation import (NotTwoTurn, backward_orbit, backward_orbit_in_climbing,
                               climbing_intervals, climbing_set, envelope, exact_envelope_rotation,
                               in_set, pointwise_rotation, pouring_envelope, rot_monotone,
                               rotation_interval)

seeds = st.integers(0, 10_000)


def test_rigid_rotation():
    est = rot_monotone(Lift.rotation(0.25))
    assert est.value == 0.25 and est.exact_rational == (1, 4)


def test_monotone_arnold_has_rotation_zero():
    est = rot_monotone(envelope(make_arnold(0.5), "upper"))
    assert est.value == 0.0 and est.exact_rational == (0, 1)


def test_phi_star_upper_is_half():
    est = rot_monotone(envelope(phi_star(EPS0), "upper"))
    assert est.exact_rational == (1, 2)
    assert abs(est.estimate - 0.5) <= est.error_bound


def test_envelope_of_monotone_is_itself():
    f = Lift.rotation(0.3)
    xs = np.linspace(0, 1, 11)
    assert np.array_equal(envelope(f, "upper").eval(xs), f.eval(xs))
    assert np.array_equal(envelope(f, "lower").eval(xs), f.eval(xs))


def test_upper_envelope_plateau_on_z0_w0():
    f = make_tent_two_turn(1.2)
    ci = climbing_intervals(f)
    F = envelope(f, "upper")
    xs = np.linspace(ci.z0, ci.w0, 101)
    assert np.abs(F.eval(xs) - f.eval(ci.z0)).max() < 1e-12


def test_tent_w0_is_unique_branch_solution():
    # exact: f(w) = 6/5 on [y0, z0 + 1] = [3/4, 3/2]
    xs = [Fraction(0), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
    vs = [Fraction(0), Fraction(6, 5), Fraction(7, 10), Fraction(1)]
    sols = [x for x in oracles.pa_preimages(xs, vs, Fraction(6, 5)) if Fraction(3, 4) <= x <= Fraction(3, 2)]
    assert sols == [Fraction(13, 12)]
    assert climbing_intervals(make_tent_two_turn(1.2)).w0 == pytest.approx(13 / 12, abs=1e-14)


def test_five_piece_envelopes():
    f = make_five_piece()
    assert rot_monotone(envelope(f, "upper")).exact_rational == (1, 1)
    assert rot_monotone(envelope(f, "lower")).exact_rational == (-1, 1)


@pytest.mark.parametrize("f", [Lift.identity(), make_arnold(0.0)])
def test_trivial_intervals(f):
    ri = rotation_interval(f)
    assert ri.as_tuple() == (0.0, 0.0)


def test_five_piece_interval_is_exact():
    ri = rotation_interval(make_five_piece())
    assert (ri.lo.exact_rational, ri.hi.exact_rational) == ((-1, 1), (1, 1))


@pytest.mark.parametrize("x, want", [(0.25, 1.0), (0.375, -1.0), (0.125, -1.0), (0.7, 0.0)])
def test_five_piece_pointwise(x, want):
    assert pointwise_rotation(make_five_piece(), x, 10_000).value == pytest.approx(want, abs=1e-6)


@pytest.mark.parametrize("eps", [0.1, 0.2, EPS0])
def test_phi_star_climbing_set_is_half_of_J(eps):
    want = [(eps / 2, 0.5 - eps / 2), (0.5 + eps / 2, 1 - eps / 2)]
    got = climbing_set(phi_star(eps))
    assert np.allclose(got, want, atol=1e-12)


def test_monotone_lift_has_no_climbing_intervals():
    with pytest.raises(NotTwoTurn):
        climbing_intervals(Lift.rotation(0.1))


def test_backward_orbit_of_rigid_rotation():
    bo = backward_orbit_in_climbing(Lift.rotation(1 / 3), 30)
    assert bo.forward.value == pytest.approx(1 / 3)
    assert bo.backward == pytest.approx(1 / 3, abs=1e-12)


def test_backward_orbit_phi_star():
    bo = backward_orbit_in_climbing(phi_star(EPS0), 100)
    assert abs(bo.forward.value - 0.5) <= 0.03
    assert abs(bo.backward - 0.5) <= 0.03


def test_backward_orbit_arnold_four():
    eta = rot_monotone(envelope(make_arnold(4.0), "upper")).value
    bo = backward_orbit_in_climbing(make_arnold(4.0), 10_000)
    assert abs(bo.forward.value - eta) < 1e-3
    assert abs(bo.backward - eta) < 1e-3


def test_lower_backward_orbit_five_piece():
    bo = backward_orbit(make_five_piece(), "lower", 50)
    assert bo.rho_upper.exact_rational == (-1, 1)
    assert bo.backward == pytest.approx(-1.0, abs=1e-12)


# ------------------------------------------------------------ properties

def _lift(seed):
    return make_random_two_turn(random.Random(seed))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_envelope_sandwich(seed):
    f, _, _ = _lift(seed)
    x = np.random.default_rng(seed).uniform(-1, 2, 10_000)
    lo, hi = envelope(f, "lower").eval(x), envelope(f, "upper").eval(x)
    fx = f.eval(x)
    assert np.all(lo <= fx + 1e-10) and np.all(fx <= hi + 1e-10)


@pytest.mark.parametrize("f", [phi_star(EPS0), make_five_piece(), make_tent_two_turn(1.3)],
                         ids=["phi_star", "five_piece", "tent"])
def test_pointwise_rotation_inside_interval(f):
    n = 10_000
    ri = rotation_interval(f)
    xs = np.random.default_rng(5).uniform(0, 1, 1000)
    vals = np.array([pointwise_rotation(f, x, n).value for x in xs])
    assert vals.min() >= ri.lo.value - 2 / n
    assert vals.max() <= ri.hi.value + 2 / n


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_exact_oracle_agrees_with_certified_endpoints(seed):
    _, xs, vs = _lift(seed)
    f, _, _ = _lift(seed)
    ri = rotation_interval(f)
    assert exact_envelope_rotation(xs, vs, "upper") == ri.hi.exact_rational
    assert exact_envelope_rotation(xs, vs, "lower") == ri.lo.exact_rational


@settings(max_examples=6, deadline=None)
@given(seeds)
def test_grid_bruteforce_bounds_upper_endpoint(seed):
    # running-max envelope composed in exact arithmetic; its p/q is a lower bound,
    # attained whenever the certified denominator is small
    f, xs, vs = _lift(seed)
    hi = rot_monotone(envelope(f, "upper"))
    lower_bound = oracles.upper_envelope_rotation_bruteforce(xs, vs, q_max=8, grid=128)
    assert lower_bound <= Fraction(hi.value).limit_denominator(64)
    if hi.exact_rational and hi.exact_rational[1] <= 8:
        assert lower_bound == Fraction(*hi.exact_rational)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_pouring_matches_general_envelope(seed):
    from wada_lab.rotation import LowerClimbingAbsent
    f, _, _ = _lift(seed)
    x = np.linspace(-1, 2, 10_000)
    assert np.abs(pouring_envelope(f, "upper").eval(x) - envelope(f, "upper").eval(x)).max() < 1e-10
    try:
        low = pouring_envelope(f, "lower")
    except LowerClimbingAbsent:
        return
    assert np.abs(low.eval(x) - envelope(f, "lower").eval(x)).max() < 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_backward_orbit_stays_in_climbing_set(seed):
    f, _, _ = _lift(seed)
    bo = backward_orbit_in_climbing(f, 200)
    assert all(in_set(x, bo.climbing, f.base) for x in bo.orbit)
    assert abs(bo.backward - bo.rho_upper.value) <= 2 / 200 + 1e-4
