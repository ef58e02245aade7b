import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wada_lab.chart import C0, C1, C2, ChartPoint, PantsMap, five_piece_annulus, smash, AnnulusMap
from wada_lab.families import EPS0, ChainPoint, make_tent_two_turn
from wada_lab.rotation import agreement_set

PANTS = PantsMap(EPS0)
Q0 = math.sqrt(2) / 4          # C2 parameter of beta_0(sqrt2/2)
Q1 = 0.5 + math.sqrt(2) / 4    # C2 parameter of beta_1(sqrt2/2)


def _in(x, intervals):
    return any(a <= x <= b for a, b in intervals)


def test_pants_anchors():
    for u in (0.1, 0.3, 0.45):
        assert PANTS.chain.same(PANTS.anchor(C2, u), ChainPoint(0, 2 * u))
    assert PANTS.chain.same(PANTS.anchor(C0, 0.0), ChainPoint(0, 0.0))


def test_annulus_anchor():
    assert five_piece_annulus("A").anchor(C1, 0.3) == 0.3


@pytest.mark.parametrize("eps, s, want", [(0.2, 0.0, 0.0), (0.2, 0.4, 0.5), (0.2, 0.95, 1.0)])
def test_smash(eps, s, want):
    assert smash(eps, s) == pytest.approx(want, abs=1e-15)


def test_chart_point_text_round_trip():
    p = ChartPoint(2, 0.125, 0.75)
    assert ChartPoint.parse(p.format()) == p
    with pytest.raises(ValueError):
        ChartPoint(0, 0.1, 1.5)


def test_boundary_points_fixed():
    rng = np.random.default_rng(0)
    u = rng.uniform(0, 1, 10_000)
    c = rng.integers(0, 2, 10_000)
    oc, ou, os_ = PANTS.unwrap(c, u, np.zeros_like(u))
    assert np.array_equal(oc, c) and np.array_equal(ou, u % 1.0) and np.all(os_ == 0)


def _graph_position(dm, c, u):
    pts = [dm.anchor(int(ci), float(ui)) for ci, ui in zip(c, u)]
    return dm.chain.position(np.array([p.i for p in pts]), np.array([p.t for p in pts]))


def test_unwrap_then_collapse_is_the_graph_map():
    rng = np.random.default_rng(1)
    u = rng.uniform(0, 1, 10_000)
    c, f, lv = PANTS.unwrap(np.full(u.size, C2), u, np.ones_like(u))
    assert np.all(c == C2)
    off = np.abs(u - np.round(2 * u) / 2) > 1e-9
    assert np.all(lv[off] >= 1 - PANTS.eps) and np.all(lv[off] < 1)
    img = [PANTS.chain(PANTS.anchor(C2, x)) for x in u]
    want = PANTS.chain.position(np.array([p.i for p in img]), np.array([p.t for p in img]))
    got = _graph_position(PANTS, c, f)
    assert np.abs(got - want).max() < 1e-10


def test_psi_maps_q0_to_q1():
    c, u, s = PANTS.psi(np.array([C2]), np.array([Q0]), np.array([1.0]))
    assert c[0] == C2 and s[0] == 1.0
    assert PANTS.chain.same(PANTS.anchor(C2, u[0]), ChainPoint(1, math.sqrt(2) / 2), 1e-12)


def test_psi_radial_arc_over_q0_lands_in_arc_over_q1():
    c, u, s = PANTS.psi(*PANTS.radial_arc(C2, Q0, 1000))
    assert np.all(c == C2)
    assert np.abs(u - Q1).max() < 1e-9
    assert s[-1] == 1.0


def test_psi_pulls_boundary_inward():
    u = np.linspace(0, 1, 200, endpoint=False)
    for s0 in (0.1, 0.5, 0.8):
        _, _, s = PANTS.psi(np.full(u.size, C2), u, np.full(u.size, s0))
        assert np.all(s > s0)


def test_psi_is_smash_of_extended_unwrap():
    rng = np.random.default_rng(3)
    c = np.full(2000, C2)
    u = rng.uniform(0, 1, 2000)
    s = rng.uniform(0, 1, 2000)
    e = PANTS.eps
    inside = s >= 1 - e
    ec, eu, es = c.copy(), PANTS.boundary_map(c, u) % 1.0, s.copy()
    ic, iu, is_ = PANTS.collar(*PANTS.unwrap(c[inside], u[inside], (s[inside] - 1 + e) / e))
    ec[inside], eu[inside], es[inside] = ic, iu, is_
    pc, pu, ps = PANTS.psi(c, u, s)
    assert np.array_equal(pc, ec) and np.array_equal(pu, eu)
    assert np.array_equal(ps, smash(e, es))


def test_radial_arc_top_anchors_to_point():
    c, u, s = PANTS.radial_arc(C2, 0.3, 16)
    assert s[-1] == 1.0 and np.all(u == 0.3) and np.all(c == C2)


def test_annulus_inner_arc_is_radial():
    dm = five_piece_annulus("A")
    c, u, s = dm.radial_arc(C0, 0.7, 64)
    assert np.all(c == C0) and s[0] == 0.0


def test_variant_b_fixed_arc_off_radial_arcs():
    dm = five_piece_annulus("B")
    y = np.linspace(0.5, 1.0, 201)[1:-1]
    h = dm.height(y)
    assert np.all(np.abs(h) < dm.delta)
    assert np.all(np.abs(dm.inner.eval(y) - y) > 1e-9)
    assert np.all(np.abs(dm.outer.eval(y) - y) > 1e-9)


def test_variant_a_inner_map_fixes_arc():
    dm = five_piece_annulus("A")
    y = np.linspace(0.5, 1.0, 201)
    assert np.abs(dm.inner.eval(y) - y).max() < 1e-15
    assert np.allclose(dm.height(y), -dm.delta)


# ------------------------------------------------------------ properties

def _radial_images(dm, comp, ys, n=64):
    for y in ys:
        c, u, s = dm.unwrap(*dm.radial_arc(comp, y, n))
        yield y, c, u, s


@pytest.mark.parametrize("eps", [0.1, 0.2, EPS0])
def test_pants_climbing_arcs_stay_radial(eps):
    dm = PantsMap(eps)
    ys = np.concatenate([np.linspace(a, b, 500) for a, b in dm.climbing()])
    for y, c, u, s in _radial_images(dm, C2, ys):
        fy = dm.lift.eval(y) % 1.0
        assert np.all(c == C2)
        assert np.abs(((u - fy + 0.5) % 1.0) - 0.5).max() < 1e-9
        assert np.all(np.diff(s) >= 0)


ANNULI = {"five_A": five_piece_annulus("A"), "five_B": five_piece_annulus("B"),
          "tent": AnnulusMap(make_tent_two_turn(1.3), name="tent")}


@pytest.mark.parametrize("name", sorted(ANNULI))
@pytest.mark.parametrize("comp", [C0, C1])
def test_annulus_climbing_arcs_stay_radial(name, comp):
    dm = ANNULI[name]
    env = dm.outer if comp == C1 else dm.inner
    J = agreement_set(dm.lift, env)
    ys = np.concatenate([np.linspace(a, b, 1000 // len(J)) for a, b in J])
    for y, c, u, s in _radial_images(dm, comp, ys):
        fy = dm.lift.eval(y) % 1.0
        assert np.all(c == comp)
        assert np.abs(((u - fy + 0.5) % 1.0) - 0.5).max() < 1e-9
        assert np.all(np.diff(s) >= -1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1 - EPS0, exclude_max=True),
       st.floats(0, 1, exclude_max=True), st.floats(0, 1 - EPS0, exclude_max=True))
def test_psi_injective_below_collar(u, s, u2, s2):
    if (u, s) == (u2, s2):
        return
    a = PANTS.psi(np.array([C2]), np.array([u]), np.array([s]))
    b = PANTS.psi(np.array([C2]), np.array([u2]), np.array([s2]))
    if abs(s - s2) > 1e-9:
        assert abs(a[2][0] - b[2][0]) > 1e-9
    else:
        # equal levels: distinct unless both lie on a plateau of the boundary map
        d = (PANTS.W.eval(u) - PANTS.W.eval(u2)) % 1.0
        flat = min(d, 1 - d) < 1e-12
        assert flat or abs(a[1][0] - b[1][0]) > 1e-9


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([C0, C1, C2]), st.floats(0, 1, exclude_max=True), st.floats(1e-6, 1))
def test_psi_levels_nondecreasing(c, u, s):
    c, u, s = np.array([c]), np.array([u]), np.array([s])
    prev = s[0]
    for _ in range(8):
        c, u, s = PANTS.psi(c, u, s)
        assert s[0] >= prev - 1e-12
        prev = s[0]
