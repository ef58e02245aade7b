"""Concrete maps: phi_eps on two circles, g = R o xi on three, Arnold, five-piece.

Chains of circles are handled in arc-length coordinates.  A point is
``(i, t)`` with ``t in [0, 1)`` running clockwise along circle ``S_i`` from
its base junction.  A :class:`ChainMap` is a list of affine rules per circle;
each rule sends a source arc ``[a, b]`` onto the target circle with target
parameters ``t_a -> t_b`` (unreduced, so full turns and orientation reversal
are explicit).

Geometry used for rendering and distance checks:

* two circles: unit circles centred at ``(-1, 0)`` and ``(1, 0)``, touching
  at the origin ``x0``.
* three circles: unit circles centred at ``(-2, 0)``, ``(0, 0)``, ``(2, 0)``,
  with junctions ``a1 = (-1, 0)`` and ``a3 = (1, 0)``.  ``R`` is the rotation
  by ``pi`` about the origin.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .circle_lift import ArnoldLift, Lift, LiftBase, LiftError

EPS0 = 1.0 - math.sqrt(2.0) / 2.0
JUNCTION_TOL = 1e-13


@dataclass(frozen=True)
class ChainPoint:
    i: int
    t: float


@dataclass(frozen=True)
class Rule:
    a: float
    b: float
    target: int
    ta: float
    tb: float

    @property
    def slope(self) -> float:
        return (self.tb - self.ta) / (self.b - self.a)

    def apply(self, t):
        return self.ta + (t - self.a) * self.slope


@dataclass
class ChainMap:
    """Self-map of a chain of ``k`` circles given by affine rules per circle."""

    k: int
    rules: list  # rules[i] is a list of Rule covering [0, 1] in order
    kind: str
    params: dict = field(default_factory=dict)
    marked: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, rs in enumerate(self.rules):
            if abs(rs[0].a) > 1e-15 or abs(rs[-1].b - 1) > 1e-15:
                raise LiftError(f"rules on circle {i} do not cover [0, 1]")
            for r0, r1 in zip(rs[:-1], rs[1:]):
                if abs(r0.b - r1.a) > 1e-15:
                    raise LiftError(f"gap between rules on circle {i}")
        self._cuts = [np.array([r.a for r in rs] + [1.0]) for rs in self.rules]

    # ---- topology
    def canonical(self, i: int, t: float) -> ChainPoint:
        t = t - math.floor(t)
        if t > 1 - JUNCTION_TOL:
            t = 0.0
        if t < JUNCTION_TOL:
            t = 0.0
        if self.k == 2 and t == 0.0:
            return ChainPoint(0, 0.0)
        if self.k == 3:
            if i == 1 and t == 0.0:
                return ChainPoint(0, 0.0)
            if i == 2 and t == 0.0:
                return ChainPoint(1, 0.5)
            if i == 1 and abs(t - 0.5) < JUNCTION_TOL:
                return ChainPoint(1, 0.5)
        return ChainPoint(int(i), float(t))

    def same(self, p: ChainPoint, q: ChainPoint, tol: float = 1e-12) -> bool:
        p = self.canonical(p.i, p.t)
        q = self.canonical(q.i, q.t)
        if p.i != q.i:
            return False
        d = abs(p.t - q.t)
        return min(d, 1 - d) < tol

    # ---- evaluation
    def _rule(self, i: int, t: float) -> Rule:
        rs = self.rules[i]
        j = int(np.searchsorted(self._cuts[i], t, side="right")) - 1
        return rs[min(max(j, 0), len(rs) - 1)]

    def __call__(self, p: ChainPoint) -> ChainPoint:
        t = p.t - math.floor(p.t)
        r = self._rule(p.i, t)
        return self.canonical(r.target, r.apply(t))

    def iterate(self, p: ChainPoint, n: int) -> ChainPoint:
        for _ in range(n):
            p = self(p)
        return p

    def eval_many(self, idx: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(idx, dtype=np.int64)
        t = np.asarray(t, dtype=float) % 1.0
        out_i = np.empty_like(idx)
        out_t = np.empty_like(t)
        for i in range(self.k):
            sel = idx == i
            if not sel.any():
                continue
            ts = t[sel]
            j = np.clip(np.searchsorted(self._cuts[i], ts, side="right") - 1, 0, len(self.rules[i]) - 1)
            rs = self.rules[i]
            a = np.array([r.a for r in rs])[j]
            ta = np.array([r.ta for r in rs])[j]
            sl = np.array([r.slope for r in rs])[j]
            out_i[sel] = np.array([r.target for r in rs])[j]
            out_t[sel] = (ta + (ts - a) * sl) % 1.0
        return out_i, out_t

    # ---- geometry
    def position(self, i, t) -> np.ndarray:
        """Planar position(s) of chain points."""
        i = np.asarray(i)
        t = np.asarray(t, dtype=float)
        ang = 2 * np.pi * t
        if self.k == 2:
            x = np.where(i == 0, -1 + np.cos(ang), 1 - np.cos(ang))
            y = np.where(i == 0, -np.sin(ang), np.sin(ang))
        else:
            cx = np.choose(i, [-2.0, 0.0, 2.0])
            sgn = np.choose(i, [1.0, -1.0, -1.0])  # S0 starts at its right, S1/S2 at their left
            x = cx + sgn * np.cos(ang)
            y = -sgn * np.sin(ang)
        return np.stack([x, y], axis=-1)

    def slopes(self) -> list[float]:
        return [abs(r.slope) for rs in self.rules for r in rs]


# ------------------------------------------------------------------ phi_eps

def make_phi_eps(eps: float) -> ChainMap:
    """Two-circle map: ``[0, 1-2e]`` wraps ``S_i`` once, the rest folds onto ``S_{1-i}``.

    Every rule scales by ``1/(1-2e)``.
    """
    if not 0 < eps <= EPS0 + 1e-15:
        raise LiftError(f"eps must lie in (0, {EPS0}]")
    lam = 1.0 / (1.0 - 2.0 * eps)
    c = eps * lam
    rules = []
    for i in (0, 1):
        rules.append([
            Rule(0.0, 1 - 2 * eps, i, 0.0, 1.0),
            Rule(1 - 2 * eps, 1 - eps, 1 - i, 0.0, c),
            Rule(1 - eps, 1.0, 1 - i, c, 0.0),
        ])
    marked = {
        "J": [(0, eps, 1 - eps), (1, eps, 1 - eps)],
        "q0": ChainPoint(0, math.sqrt(2) / 2) if abs(eps - EPS0) < 1e-15 else None,
        "q1": ChainPoint(1, math.sqrt(2) / 2) if abs(eps - EPS0) < 1e-15 else None,
    }
    return ChainMap(2, rules, "phi", {"eps": eps}, marked)


def quotient_lift(cm: ChainMap) -> Lift:
    """Lift of the induced circle map, ``u in [0, 1/2) -> beta_0(2u)``, ``[1/2, 1) -> beta_1(2u - 1)``.

    Each rule targets circle ``j`` with unreduced parameters ``t_a -> t_b``,
    i.e. quotient values ``(j + t)/2``; pieces are shifted by integers so the
    lift is continuous.  (Going through reduced chain points would lose the
    distinction between the two copies of ``x0`` at ``u = 0`` and ``u = 1/2``.)
    """
    if cm.kind != "phi":
        raise LiftError("quotient_lift needs a phi_eps chain map")
    xs, vs = [0.0], []
    for i in (0, 1):
        for r in cm.rules[i]:
            va = 0.5 * (r.target + r.ta)
            vb = 0.5 * (r.target + r.tb)
            if vs:
                shift = round(vs[-1] - va)
                va, vb = va + shift, vb + shift
            else:
                vs.append(va)
            xs.append(0.5 * (i + r.b))
            vs.append(vb)
    return _merge_collinear(Lift(np.array(xs), np.array(vs), name=f"phi*({cm.params['eps']})"))


def _merge_collinear(lift: Lift) -> Lift:
    xs, vs = lift._xs, lift._vs
    kx, kv = [xs[0]], [vs[0]]
    for j in range(1, len(xs) - 1):
        s0 = (vs[j] - kv[-1]) / (xs[j] - kx[-1])
        s1 = (vs[j + 1] - vs[j]) / (xs[j + 1] - xs[j])
        if abs(s0 - s1) > 1e-9 * max(1.0, abs(s0)):
            kx.append(xs[j])
            kv.append(vs[j])
    kx.append(xs[-1])
    kv.append(vs[-1])
    return Lift(np.array(kx), np.array(kv), turns=lift.turns, name=lift.name)


def phi_star(eps: float) -> Lift:
    return quotient_lift(make_phi_eps(eps))


def quotient_to_chain(u: float) -> ChainPoint:
    u = u - math.floor(u)
    if u < 0.5:
        return ChainPoint(0, 2 * u)
    return ChainPoint(1, 2 * u - 1)


# ----------------------------------------------------------------------- g3

def _rotate_rule(r: Rule) -> Rule:
    """Post-compose a rule with R (S0 <-> S2 keeping parameters, S1 shifted by 1/2)."""
    if r.target == 1:
        return Rule(r.a, r.b, 1, r.ta + 0.5, r.tb + 0.5)
    return Rule(r.a, r.b, 2 - r.target, r.ta, r.tb)


def _shift_source(r: Rule, ds: float) -> Rule:
    return Rule(r.a + ds, r.b + ds, r.target, r.ta, r.tb)


def make_xi() -> ChainMap:
    """The map xi on three circles (R-equivariant).

    On ``S0`` (``tau`` clockwise from ``a1``): ``[0, 1/2]`` wraps ``S0``
    counterclockwise at slope 2; ``[1/2, 3/4]`` runs along the lower quarter
    of ``S1`` from ``a1`` to ``q3``; ``[3/4, 1]`` comes back.  On the upper
    half of ``S1``: ``[0, 1/4]`` runs up ``S0`` to ``q4``, ``[1/4, 3/8]``
    back to ``a1``, ``[3/8, 1/2]`` across the upper half of ``S1`` to ``a3``.
    """
    s0 = [
        Rule(0.0, 0.5, 0, 0.0, -1.0),
        Rule(0.5, 0.75, 1, 0.0, -0.25),
        Rule(0.75, 1.0, 1, -0.25, 0.0),
    ]
    s1_top = [
        Rule(0.0, 0.25, 0, 0.0, -0.25),
        Rule(0.25, 0.375, 0, -0.25, 0.0),
        Rule(0.375, 0.5, 1, 0.0, 0.5),
    ]
    s1 = s1_top + [_rotate_rule(_shift_source(r, 0.5)) for r in s1_top]
    s2 = [_rotate_rule(r) for r in s0]
    return ChainMap(3, [s0, s1, s2], "xi")


def make_g3() -> ChainMap:
    """``g = R o xi``: fixed-point free, with the 4-cycle ``q1 -> q2 -> q3 -> q4``."""
    xi = make_xi()
    rules = [[_rotate_rule(r) for r in rs] for rs in xi.rules]
    marked = {
        "q1": ChainPoint(1, 0.25),   # top of S1
        "q2": ChainPoint(2, 0.75),   # bottom of S2
        "q3": ChainPoint(1, 0.75),   # bottom of S1
        "q4": ChainPoint(0, 0.75),   # top of S0
        "q5": ChainPoint(0, 0.5),
        "q6": ChainPoint(1, 0.375),
        "a1": ChainPoint(0, 0.0),
        "a3": ChainPoint(1, 0.5),
    }
    g = ChainMap(3, rules, "g3", {}, marked)
    cyc = [marked[f"q{j}"] for j in (1, 2, 3, 4)]
    for j in range(4):
        if not g.same(g(cyc[j]), cyc[(j + 1) % 4]):
            raise LiftError("4-cycle of g does not close")
    return g


def rotate_R(cm: ChainMap, p: ChainPoint) -> ChainPoint:
    if p.i == 1:
        return cm.canonical(1, p.t + 0.5)
    return cm.canonical(2 - p.i, p.t)


# ------------------------------------------------------- circle families

def make_arnold(t: float) -> ArnoldLift:
    return ArnoldLift(t)


FIVE_PIECE_X = (0.0, 0.125, 0.25, 0.375, 0.5, 1.0)
FIVE_PIECE_V = (0.0, -0.875, 1.25, -0.625, 0.5, 1.0)


def make_five_piece() -> Lift:
    """Affine on five pieces; identity on ``[1/2, 1]``; ``f(1/8) = 1/8 - 1``, ``f(1/4) = 1/4 + 1``."""
    return Lift(np.array(FIVE_PIECE_X), np.array(FIVE_PIECE_V), name="five_piece")


def make_tent_two_turn(peak: float = 1.2) -> Lift:
    """A small two-turn lift: rises to ``peak`` at 1/2, falls to ``peak - 1/2`` at 3/4."""
    xs = np.array([0.0, 0.5, 0.75, 1.0])
    vs = np.array([0.0, peak, peak - 0.5, 1.0])
    return Lift(xs, vs, turns={"z0": 0.5, "y0": 0.75}, name=f"tent({peak})")


def make_random_two_turn(rng, denom: int = 16):
    """Random two-turn lift with rational data: ``c`` at 0, rising to ``A + c`` at ``z``,
    falling to ``B + c`` at ``y``.

    Returns the lift together with its exact breakpoint data as Fractions.
    """
    while True:
        z = Fraction(rng.randint(1, denom // 2), denom)
        y = Fraction(rng.randint(z.numerator * (denom // z.denominator) + 1, denom - 1), denom)
        a = z + Fraction(rng.randint(1, denom - 1), denom)
        b = a - Fraction(rng.randint(1, denom - 1), denom)
        if not (a > 0 and b < 1):
            continue
        c = Fraction(rng.randint(0, denom - 1), denom)  # vertical offset
        xs = [Fraction(0), z, y, Fraction(1)]
        vs = [c, a + c, b + c, 1 + c]
        lift = Lift(np.array([float(x) for x in xs]), np.array([float(v) for v in vs]),
                    turns={"z0": float(z), "y0": float(y)}, name=f"two_turn({z},{y},{a},{b},{c})")
        return lift, xs, vs


# ------------------------------------------------------------------ entropy

def entropy_closed_form(eps: float) -> float:
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    return math.log(1.0 / (1.0 - 2.0 * eps))


LAP_GUARD = 10_000_000


def lap_count(lift: Lift, n: int, guard: int = LAP_GUARD) -> int:
    """Number of maximal monotone pieces of ``f^n`` on one period.

    Piece composition: ``f`` splits an interval at its turning points into
    monotone pieces, each carried onto an image interval; the laps of
    ``f^n`` are the laps of ``f^{n-1}`` over those image intervals.  A turn
    of ``f`` stays a turn of every iterate (the image folds back onto one
    side), so no merging is needed as long as ``f`` has no flat pieces.
    """
    if not isinstance(lift, Lift):
        raise LiftError("lap_count needs a piecewise-affine lift")
    if np.any(np.diff(lift.values) == 0):
        raise LiftError("lap_count assumes no flat pieces")
    xs, vs = lift.breakpoints, lift.values
    s = np.sign(np.diff(vs))
    turn = [xs[j] for j in range(1, len(xs) - 1) if s[j - 1] != s[j]]
    if s[0] != s[-1]:
        turn.append(xs[0])
    turn = np.array(sorted(turn))
    x0 = lift.base

    def turns_in(a, b):
        if turn.size == 0:
            return []
        out = []
        for m in range(math.floor(a - x0) - 1, math.floor(b - x0) + 2):
            for c in turn + m:
                if a < c < b:
                    out.append(c)
        return sorted(out)

    @lru_cache(maxsize=None)
    def laps(k, a, b):
        if k == 0:
            return 1
        cuts = [a] + turns_in(a, b) + [b]
        total = 0
        for c0, c1 in zip(cuts[:-1], cuts[1:]):
            y0, y1 = lift.eval(c0), lift.eval(c1)
            lo, hi = (y0, y1) if y0 <= y1 else (y1, y0)
            total += laps(k - 1, round(lo, 13), round(hi, 13))
            if total > guard:
                raise OverflowError(f"more than {guard} laps")
        return total

    # start at a turning point so the period boundary is not an artificial cut
    start = float(turn[0]) if turn.size else x0
    return laps(n, round(start, 13), round(start + 1.0, 13))


def lap_entropy(obj, n: int, guard: int = LAP_GUARD) -> float:
    """``(1/n) log`` of the lap number of the ``n``-th iterate."""
    if n < 4:
        raise ValueError("n must be at least 4")
    lift = quotient_lift(obj) if isinstance(obj, ChainMap) else obj
    return math.log(lap_count(lift, n, guard)) / n


def lap_growth(obj, n: int, guard: int = LAP_GUARD) -> float:
    """Growth-rate estimate ``log(L_n / L_{n-1})``, free of the constant prefactor."""
    lift = quotient_lift(obj) if isinstance(obj, ChainMap) else obj
    return math.log(lap_count(lift, n, guard) / lap_count(lift, n - 1, guard))


# ----------------------------------------------------------------- registry

def registry() -> dict:
    with resources.files(__package__).joinpath("families.json").open() as fh:
        return json.load(fh)


ALIASES = {"phi-quotient": "phi_star", "phi_quotient": "phi_star", "five-piece": "five_piece",
           "g": "g3"}


def canonical_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in registry():
        raise KeyError(f"unknown family {name!r}")
    return name


def build(name: str, **params) -> LiftBase | ChainMap:
    """Construct a registered family by name (used by the CLI)."""
    name = canonical_name(name)
    if name == "phi":
        return make_phi_eps(params.get("eps", EPS0))
    if name == "phi_star":
        return phi_star(params.get("eps", EPS0))
    if name == "g3":
        return make_g3()
    if name == "arnold":
        return make_arnold(params.get("t", 4.0))
    if name == "five_piece":
        return make_five_piece()
    if name == "tent":
        return make_tent_two_turn(params.get("peak", 1.2))
    raise KeyError(f"unknown family {name!r}")
