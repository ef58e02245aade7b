"""The acceptance suite: one function per criterion, each returning a :class:`Check`.

Used by ``tests/test_acceptance.py`` and by ``wada-lab selftest``.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .chart import C0, C1, PantsMap, five_piece_annulus
from .families import (EPS0, ChainPoint, entropy_closed_form, lap_growth, make_arnold,
                       make_five_piece, make_g3, make_phi_eps, make_random_two_turn, phi_star)
from .rotation import (backward_orbit_in_climbing, envelope, exact_envelope_rotation, in_set,
                       pointwise_rotation, rot_monotone, rotation_interval)


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    seconds: float
    budget: float
    detail: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        why = "" if self.passed else "  [" + "; ".join(self.failures) + "]"
        return f"{verdict} {self.number:2d} {self.name} ({self.seconds:.2f}s / {self.budget:g}s){why}"


class _Recorder:
    def __init__(self, number, name, budget):
        self.number, self.name, self.budget = number, name, budget
        self.detail, self.failures = {}, []
        self.t0 = time.perf_counter()

    def expect(self, ok: bool, what: str):
        if not ok:
            self.failures.append(what)

    def done(self) -> Check:
        dt = time.perf_counter() - self.t0
        self.expect(dt < self.budget, f"runtime {dt:.1f}s over budget")
        return Check(self.number, self.name, not self.failures, dt, self.budget, self.detail,
                     self.failures)


def c01_prime_ends_value() -> Check:
    r = _Recorder(1, "prime-ends value at eps0 is 1/2", 1.0)
    est = rot_monotone(envelope(phi_star(EPS0), "upper"), tol=1e-5)
    r.detail.update(value=est.value, estimate=est.estimate, exact=est.exact_rational,
                    n=est.iterations, error_bound=est.error_bound)
    r.expect(est.exact_rational == (1, 2), f"certified {est.exact_rational}")
    r.expect(est.iterations == 100_000, f"n = {est.iterations}")
    r.expect(abs(est.estimate - 0.5) < 1e-4, f"estimate {est.estimate}")
    r.expect(abs(est.estimate - 0.5) <= est.error_bound + 1e-15, "estimate outside 1/n bound")
    return r.done()


def c02_period_two() -> Check:
    r = _Recorder(2, "beta0(sqrt2/2) has period 2", 1.0)
    phi = make_phi_eps(EPS0)
    p = ChainPoint(0, math.sqrt(2) / 2)
    q = phi(p)
    p2 = phi(q)
    d = float(np.linalg.norm(phi.position(np.array([p2.i]), np.array([p2.t]))
                             - phi.position(np.array([p.i]), np.array([p.t]))))
    r.detail.update(image=(q.i, q.t), return_distance=d)
    r.expect(q.i == 1, f"intermediate image on S{q.i}")
    r.expect(d < 1e-12, f"|phi^2(p) - p| = {d:.3e}")
    return r.done()


def c03_monotonicity_sweep(tol: float = 1e-5) -> Check:
    r = _Recorder(3, "sup rotation increasing in eps, decaying dyadically", 30.0)
    grid = np.linspace(0.02, EPS0, 25)
    hi = [rot_monotone(envelope(phi_star(e), "upper"), tol).value for e in grid]
    dy = [EPS0 * 2.0 ** -j for j in range(7)]
    hd = [rot_monotone(envelope(phi_star(e), "upper"), tol).value for e in dy]
    exact = [rot_monotone(envelope(phi_star(e), "upper"), tol).format_exact() for e in grid]
    locked = sorted({x for x, y in zip(exact, exact[1:]) if x == y and x != "-"})
    r.detail.update(grid=list(map(float, grid)), hi=hi, dyadic=dy, dyadic_hi=hd,
                    nondecreasing=all(b >= a for a, b in zip(hi, hi[1:])), locked=locked)
    r.expect(all(b > a for a, b in zip(hi, hi[1:])),
             "grid values not strictly increasing (locked at " + ", ".join(locked) + ")")
    r.expect(min(hi) > 0, "nonpositive value on the grid")
    r.expect(all(b < a for a, b in zip(hd, hd[1:])), "dyadic values not strictly decreasing")
    return r.done()


def c04_entropy(n: int = 12) -> Check:
    r = _Recorder(4, "lap growth matches log 1/(1-2eps)", 10.0)
    rows = {}
    for eps in (0.1, 0.2, EPS0):
        est = lap_growth(make_phi_eps(eps), n)
        exact = entropy_closed_form(eps)
        rel = abs(est - exact) / exact
        rows[f"{eps:.6f}"] = {"lap_growth": est, "closed_form": exact, "rel_error": rel}
        r.expect(rel < 0.05, f"eps={eps:.4g}: {est:.4f} vs {exact:.4f} ({100 * rel:.1f}%)")
    cf = entropy_closed_form(EPS0)
    r.detail.update(rows=rows, closed_form_eps0=cf)
    r.expect(abs(cf - math.log(math.sqrt(2) + 1)) < 1e-12, "closed form at eps0")
    return r.done()


def c05_five_piece() -> Check:
    r = _Recorder(5, "five-piece map: interval [-1, 1], pointwise data", 5.0)
    f = make_five_piece()
    ri = rotation_interval(f)
    r.detail.update(lo=ri.lo.exact_rational, hi=ri.hi.exact_rational)
    r.expect(ri.lo.exact_rational == (-1, 1), f"lo {ri.lo.exact_rational}")
    r.expect(ri.hi.exact_rational == (1, 1), f"hi {ri.hi.exact_rational}")
    pw = {}
    for x, want in ((0.125, -1.0), (0.375, -1.0), (0.25, 1.0)):
        est = pointwise_rotation(f, x, 10_000)
        pw[x] = est.value
        r.expect(abs(est.value - want) < 1e-6, f"rho({x}) = {est.value}")
    xs = np.linspace(0.5, 1.0, 1001)
    dev = float(np.abs(f.eval(xs) - xs).max())
    r.detail.update(pointwise=pw, fixed_arc_deviation=dev)
    r.expect(dev < 1e-12, f"fixed arc moves by {dev:.2e}")
    return r.done()


def c06_two_embeddings(depth: int = 20) -> Check:
    from .attract import accessible_arc, fixed_arc_access
    r = _Recorder(6, "variant A accessible fixed point, variant B inaccessible", 30.0)
    A, B = five_piece_annulus("A"), five_piece_annulus("B")
    ain = accessible_arc(A, C0, depth)
    aout = accessible_arc(A, C1, depth)
    f = A.lift
    fixed_pt = abs(f.eval(ain.point) - ain.point) < 1e-12
    r.detail["A"] = {"in_point": ain.point, "in_rotation": ain.rho.value, "in_radial": ain.radial,
                     "out_point": aout.point, "out_rotation": aout.rho.value,
                     "fixed_arc": fixed_arc_access(A, samples=1000)}
    r.expect(ain.rho.exact_rational == (0, 1) and fixed_pt and ain.radial,
             "variant A interior arc does not land on a fixed point")
    r.expect(aout.rho.exact_rational == (1, 1) and aout.radial, "variant A exterior rotation")
    acc = fixed_arc_access(B, samples=1000)
    bin_ = accessible_arc(B, C0, depth)
    p = bin_.point % 1.0
    on_arc = p >= 0.5 - 1e-9 or p < 1e-9
    r.detail["B"] = {"fixed_arc": acc, "substitute_point": bin_.point,
                     "substitute_rotation": bin_.rho.value}
    r.expect(acc["fixed_samples"] == 1000 and acc["landing"] == 0,
             f"{acc['landing']} radial arcs land on the fixed arc")
    r.expect(not on_arc, "accessible interior point lies on the fixed arc")
    return r.done()


def c07_g3() -> Check:
    from .attract import min_displacement, outer_loop_order
    r = _Recorder(7, "g fixed-point free, accessible 4-cycle advances 3", 10.0)
    g = make_g3()
    dmin = min_displacement(g, 100_000)
    q = [g.marked[f"q{j}"] for j in (1, 2, 3, 4)]
    exact = all(g(q[j]) == q[(j + 1) % 4] or g.same(g(q[j]), q[(j + 1) % 4], 0.0) for j in range(4))
    minimal = not any(g.same(g.iterate(q[0], k), q[0]) for k in (1, 2, 3))
    order = outer_loop_order(g)
    r.detail.update(min_displacement=dmin, order=order["order"], steps=order["steps"])
    r.expect(dmin > 0.01, f"min displacement {dmin}")
    r.expect(exact and minimal, "marked orbit is not exactly 4-periodic")
    r.expect(order["advance"] == 3, f"cyclic steps {order['steps']}")
    return r.done()


def c08_arnold(tol: float = 1e-5) -> Check:
    r = _Recorder(8, "Arnold family symmetry, degeneracy, continuity", 60.0)
    sym = {}
    for t in (2.0, 3.0, 4.0):
        ri = rotation_interval(make_arnold(t), tol)
        sym[t] = (ri.lo.value, ri.hi.value)
        r.expect(abs(ri.lo.value + ri.hi.value) < 1e-6, f"t={t}: lo+hi = {ri.lo.value + ri.hi.value}")
    zero = {}
    for t in (0.0, 0.5, 1.0):
        ri = rotation_interval(make_arnold(t), tol)
        zero[t] = (ri.lo.value, ri.hi.value)
        r.expect(ri.lo.value == 0 and ri.hi.value == 0, f"t={t}: [{ri.lo.value}, {ri.hi.value}]")
    hi4 = sym[4.0][1]
    r.expect(hi4 > 0.01, f"t=4: hi = {hi4} (threshold t* ~ 4.6033)")
    ts = np.linspace(1.0, 4.0, 101)
    his = [rot_monotone(envelope(make_arnold(t), "upper"), tol).value for t in ts]
    jump = float(np.max(np.abs(np.diff(his))))
    r.expect(jump < 0.02, f"max adjacent jump {jump}")
    ri5 = rotation_interval(make_arnold(5.0), tol)
    resonance = {}
    for t in (4.0, 5.0):
        hi = ri5.hi if t == 5.0 else rotation_interval(make_arnold(t), tol).hi
        resonance[t] = hi.format_exact() if hi.exact_rational else "none with q <= 64"
    r.detail.update(symmetric=sym, degenerate=zero, max_jump=jump,
                    t5=(ri5.lo.value, ri5.hi.value), resonance=resonance)
    return r.done()


def c09_wada(res: int = 1024, k: int = 3) -> Check:
    from .attract import basin_label, choose_depth, control_pattern, wada_score
    r = _Recorder(9, "Wada score at eps0", 180.0)
    P = PantsMap(EPS0)
    ap = choose_depth(P, res)
    bg = basin_label(P, ap.depth, res, ap)
    scores = wada_score(bg, k)
    ctrl = wada_score(control_pattern(), k)
    r.detail.update(depth=ap.depth, dh_history=ap.dh_history, scores=scores, control=ctrl)
    r.expect(len(scores) == 3, f"{len(scores)} basins")
    for c, v in scores.items():
        r.expect(v >= 0.99, f"basin C{c}: {v:.4f}")
    r.expect(all(abs(v - 0.5) < 0.05 for v in ctrl.values()), f"control {ctrl}")
    return r.done()


def c10_climbing_suite(count: int = 10, depth: int = 200, tol: float = 1e-4, seed: int = 7) -> Check:
    r = _Recorder(10, "backward orbits in climbing sets, oracle agreement", 20.0)
    rng = random.Random(seed)
    rows = []
    while len(rows) < count:
        lift, xs, vs = make_random_two_turn(rng)
        bo = backward_orbit_in_climbing(lift, depth, tol)
        inside = all(in_set(x, bo.climbing, lift.base) for x in bo.orbit)
        gap = abs(bo.backward - bo.rho_upper.value)
        oracle = exact_envelope_rotation(xs, vs, "upper", 64)
        rows.append({"lift": lift.name, "rho": bo.rho_upper.value, "exact": bo.rho_upper.exact_rational,
                     "oracle": oracle, "inside": inside, "backward_gap": gap})
        r.expect(inside, f"{lift.name}: orbit leaves J")
        r.expect(gap <= 2.0 / depth + tol, f"{lift.name}: backward average off by {gap}")
        r.expect(oracle == bo.rho_upper.exact_rational, f"{lift.name}: oracle {oracle}")
    r.detail["lifts"] = rows
    return r.done()


def c11_hausdorff(res: int = 1024, N: int = 6) -> Check:
    from .attract import boundary_curves, hausdorff, rasterize
    r = _Recorder(11, "d_H shrinks as the parameter step halves", 120.0)
    base = EPS0 - 0.04

    def band(eps):
        P = PantsMap(eps)
        return rasterize(P, boundary_curves(P, N, res), res, dilate=0)

    b0 = band(base)
    deltas = [0.04, 0.02, 0.01, 0.005]
    d = [hausdorff(b0, band(base + dl)) for dl in deltas]
    r.detail.update(base=base, depth=N, deltas=deltas, d_H=d)
    r.expect(all(b < a for a, b in zip(d, d[1:])), f"d_H not decreasing: {d}")
    return r.done()


CRITERIA = [c01_prime_ends_value, c02_period_two, c03_monotonicity_sweep, c04_entropy,
            c05_five_piece, c06_two_embeddings, c07_g3, c08_arnold, c09_wada,
            c10_climbing_suite, c11_hausdorff]


def run_all(printer=print) -> list[Check]:
    out = []
    for fn in CRITERIA:
        chk = fn()
        printer(chk.line())
        out.append(chk)
    return out
