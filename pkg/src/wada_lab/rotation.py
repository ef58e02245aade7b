"""Rotation numbers, monotone envelopes and climbing intervals.

The rotation set of a degree-one lift ``f`` is the interval
``[rho(F-), rho(F+)]`` where ``F+(x) = sup_{y <= x} f(y)`` and
``F-(x) = inf_{y >= x} f(y)`` are the monotone ("water-pouring") envelopes.
For a monotone lift the orbit bound ``|F^n(x) - x - n rho| < 1`` gives a
rigorous ``1/n`` error, and ``rho = p/q`` exactly iff ``F^q(x) = x + p`` has
a solution, which for piecewise-affine ``F`` is decided on the breakpoints
of ``F^q``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .circle_lift import Lift, LiftBase, LiftError, MonotoneLift, PlateauLift

QMAX = 64
ZERO_TOL = 1e-10
MEMBER_TOL = 1e-10


class LowerClimbingAbsent(LiftError):
    pass


class NotTwoTurn(LiftError):
    pass


@dataclass
class RotationEstimate:
    value: float
    error_bound: float
    iterations: int
    exact_rational: tuple[int, int] | None = None
    method: str = ""
    estimate: float | None = None  # raw orbit average before snapping to p/q

    def __post_init__(self):
        if not self.error_bound > 0:
            raise ValueError("error_bound must be positive")

    def format_exact(self) -> str:
        if self.exact_rational is None:
            return "-"
        p, q = self.exact_rational
        return f"{p}/{q}"


@dataclass
class RotationInterval:
    lo: RotationEstimate
    hi: RotationEstimate

    @property
    def width(self) -> float:
        return self.hi.value - self.lo.value

    def as_tuple(self) -> tuple[float, float]:
        return self.lo.value, self.hi.value


@dataclass
class ClimbingIntervals:
    z0: float
    y0: float
    w0: float
    w0_lower: float

    @property
    def efficient(self) -> tuple[float, float]:
        return self.w0, self.z0 + 1.0

    @property
    def lower(self) -> tuple[float, float]:
        return self.y0, self.w0_lower


# ---------------------------------------------------------------- envelopes

def _reflect(lift: Lift) -> Lift:
    """``x -> -f(-x)``; swaps the roles of upper and lower envelopes."""
    return Lift(-lift.breakpoints[::-1], -lift.values[::-1], name=lift.name)


def _upper_pa(lift: Lift) -> MonotoneLift:
    xs, vs = lift._xs, lift._vs
    level = max(vs) - 1.0  # sup of f over the previous period
    out_x, out_v = [xs[0]], [max(level, vs[0])]
    level = out_v[0]
    for i in range(len(xs) - 1):
        xa, xb, va, vb = xs[i], xs[i + 1], vs[i], vs[i + 1]
        if vb > level:
            if va < level:
                xc = xa + (level - va) * (xb - xa) / (vb - va)
                if xc > out_x[-1]:
                    out_x.append(xc)
                    out_v.append(level)
            level = vb
        out_x.append(xb)
        out_v.append(level)
    out_v[-1] = out_v[0] + 1.0
    px, pv = _simplify(out_x, out_v)
    return MonotoneLift(px, pv, name=f"upper({lift.name})")


def _simplify(xs, vs):
    """Drop repeated and collinear interior breakpoints."""
    px, pv = [xs[0]], [vs[0]]
    for x, v in zip(xs[1:], vs[1:]):
        if x - px[-1] <= 1e-15:
            pv[-1] = v
            continue
        if len(px) >= 2:
            s0 = (pv[-1] - pv[-2]) / (px[-1] - px[-2])
            s1 = (v - pv[-1]) / (x - px[-1])
            if abs(s0 - s1) <= 1e-13 * max(1.0, abs(s0)):
                px[-1], pv[-1] = x, v
                continue
        px.append(x)
        pv.append(v)
    return np.array(px), np.array(pv)


def envelope(lift: LiftBase, side: str = "upper") -> LiftBase:
    """Monotone envelope ``F+`` (``side="upper"``) or ``F-`` (``"lower"``)."""
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    if isinstance(lift, Lift):
        if lift.is_monotone():
            return lift if isinstance(lift, MonotoneLift) else \
                MonotoneLift(lift.breakpoints, lift.values, name=lift.name)
        if side == "upper":
            return _upper_pa(lift)
        r = _upper_pa(_reflect(lift))
        return MonotoneLift(-r.breakpoints[::-1], -r.values[::-1], name=f"lower({lift.name})")
    if not lift.turns:
        return lift  # smooth monotone lift
    return pouring_envelope(lift, side)


def pouring_envelope(lift: LiftBase, side: str = "upper") -> LiftBase:
    """Two-turn construction: ``f`` with one plateau per period.

    Upper: constant ``f(z0)`` on ``[z0, w0]``.  Lower: constant ``f(y0) + 1``
    on ``[w0', y0 + 1]``.
    """
    ci = climbing_intervals(lift)
    if side == "upper":
        a, b, level = ci.z0, ci.w0, lift.eval(ci.z0)
    else:
        a, b, level = ci.w0_lower, ci.y0 + 1.0, lift.eval(ci.y0) + 1.0
    env = PlateauLift(lift, a, b, level, name=f"{side}({getattr(lift, 'name', '')})")
    if isinstance(lift, Lift):
        xs = np.concatenate([[a], [b], lift.breakpoints + np.floor(b - lift.base)])
        xs = xs[(xs >= a) & (xs <= a + 1)]
        xs = np.unique(np.concatenate([xs, [a + 1]]))
        vs = np.asarray(env.eval(xs), dtype=float)
        vs[-1] = vs[0] + 1.0
        px, pv = _simplify(list(xs), list(vs))
        return MonotoneLift(px, pv, name=env.name)
    return env


# ---------------------------------------------------- rational certification

def _monotone_inverse(m: Lift, y: np.ndarray) -> np.ndarray:
    j = np.floor(y - m.values[0])
    return np.interp(y - j, m.values, m.breakpoints) + j


def power_breakpoints(m: Lift, q: int, cap: int = 200_000) -> np.ndarray:
    """Breakpoints of ``m^q`` in the base period (``m`` monotone, piecewise affine).

    ``m^{j+1} = m^j o m`` so its breakpoints are those of ``m`` together with
    the ``m``-preimages of the breakpoints of ``m^j``.  Flat pieces contribute
    their endpoints through the base set.
    """
    base = m.breakpoints[:-1]
    pts = base.copy()
    x0 = m.base
    for _ in range(q - 1):
        pre = _monotone_inverse(m, pts)
        pre = pre - np.floor(pre - x0)
        pts = np.unique(np.concatenate([base, pre]))
        keep = np.concatenate([[True], np.diff(pts) > 1e-15])
        pts = pts[keep]
        if pts.size > cap:
            raise LiftError("breakpoint explosion in power_breakpoints")
    return pts


def _sample_points(m: LiftBase, q: int) -> np.ndarray:
    if isinstance(m, Lift):
        return power_breakpoints(m, q)
    pts = np.linspace(m.base, m.base + 1, 4097)[:-1]
    if isinstance(m, PlateauLift):
        pts = np.concatenate([pts, [m.a, m.b - math.floor(m.b - m.a)]])
    return pts


def _iterate_many(m: LiftBase, xs: np.ndarray, n: int) -> np.ndarray:
    if hasattr(m, "iterate_many"):
        return m.iterate_many(xs, n)
    return np.array([m.iterate(x, n) for x in xs])


def has_rational(m: LiftBase, p: int, q: int, atol: float = ZERO_TOL) -> bool:
    """Does ``m^q(x) = x + p`` have a solution?  ``m`` must be monotone."""
    xs = _sample_points(m, q)
    h = _iterate_many(m, xs, q) - xs - p
    return bool(h.min() <= atol and h.max() >= -atol)


def certify_rational(m: LiftBase, value: float, err: float, qmax: int = QMAX):
    """Smallest-denominator ``p/q`` within ``err`` of ``value`` that ``m`` realizes."""
    for q in range(1, qmax + 1):
        for p in range(math.ceil(q * (value - err)), math.floor(q * (value + err)) + 1):
            if math.gcd(p, q) != 1:
                continue
            if has_rational(m, p, q):
                return p, q
    return None


def rot_monotone(m: LiftBase, tol: float = 1e-5, qmax: int = QMAX,
                 certify: bool = True) -> RotationEstimate:
    """Rotation number of a nondecreasing degree-one lift.

    Error bound ``1/n`` with ``n = ceil(1/tol)``; exact rationals with
    denominator up to ``qmax`` are certified by a sign change of
    ``m^q - id - p``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if isinstance(m, Lift) and not m.is_monotone():
        raise LiftError("rot_monotone needs a nondecreasing lift")
    n = math.ceil(1.0 / tol)
    value = m.displacement(m.base, n) / n
    err = 1.0 / n
    exact = certify_rational(m, value, err, qmax) if certify else None
    if exact is None:
        return RotationEstimate(value, err, n, None, method="orbit", estimate=value)
    method = "breakpoints" if isinstance(m, Lift) else "grid"
    return RotationEstimate(exact[0] / exact[1], err, n, exact, method=method, estimate=value)


def rotation_interval(lift: LiftBase, tol: float = 1e-5, qmax: int = QMAX) -> RotationInterval:
    lo = rot_monotone(envelope(lift, "lower"), tol, qmax)
    hi = rot_monotone(envelope(lift, "upper"), tol, qmax)
    return RotationInterval(lo, hi)


# ------------------------------------------------------- pointwise rotation

def _checkpoints(n: int, per_decade: int = 40) -> np.ndarray:
    ks = np.unique(np.round(np.logspace(0, math.log10(n), per_decade * max(1, round(math.log10(n))))))
    ks = ks.astype(np.int64)
    return ks[(ks >= 1) & (ks <= n)]


def orbit_displacements(lift: LiftBase, x: float, ks) -> np.ndarray:
    """``f^k(x) - x`` for increasing ``ks``, advancing one orbit in chunks."""
    r0, k0 = lift.reduce(float(x))
    r, k = r0, k0
    done = 0
    out = np.empty(len(ks))
    for i, target in enumerate(ks):
        r, dk = lift.iterate_split(r, int(target - done))
        k += dk
        done = int(target)
        out[i] = (r - r0) + (k - k0)
    return out


def pointwise_rotation(lift: LiftBase, x: float, n: int = 10_000) -> RotationEstimate:
    """Limsup of ``(f^k(x) - x)/k``: running maximum over log-spaced checkpoints.

    The error bound is heuristic: the spread of the averages over the last
    decade of checkpoints (never below ``1/n``).
    """
    if n < 1000:
        raise ValueError("n must be at least 1000")
    ks = _checkpoints(n)
    if ks[-1] != n:
        ks = np.append(ks, n)
    avg = orbit_displacements(lift, x, ks) / ks
    last = avg[ks >= n / 10]
    value = float(last.max())
    spread = float(last.max() - last.min())
    return RotationEstimate(value, max(spread, 1.0 / n), n, method="limsup")


# ------------------------------------------------------- climbing intervals

def _branch_solve(lift: LiftBase, a: float, b: float, target: float, pick: str) -> float | None:
    """Largest (``pick="max"``) or smallest solution of ``f = target`` on ``[a, b]``."""
    if isinstance(lift, Lift):
        sols = [x for x in lift.preimages(target) if a - 1e-12 <= x <= b + 1e-12]
        if not sols:
            return None
        return max(sols) if pick == "max" else min(sols)
    fa, fb = lift.eval(a) - target, lift.eval(b) - target
    if abs(fa) < 1e-15 and (pick == "min" or abs(fb) > 1e-15):
        return a
    if abs(fb) < 1e-15:
        return b
    if fa * fb > 0:
        return None
    return brentq(lambda x: lift.eval(x) - target, a, b, xtol=1e-15, rtol=1e-15)


def climbing_intervals(lift: LiftBase) -> ClimbingIntervals:
    """Efficient ``[w0, z0 + 1]`` and lower ``[y0, w0']`` climbing intervals."""
    if not lift.turns:
        raise NotTwoTurn("climbing intervals need two-turn markers z0, y0")
    z0, y0 = float(lift.turns["z0"]), float(lift.turns["y0"])
    w0 = _branch_solve(lift, y0, z0 + 1, lift.eval(z0), "max")
    if w0 is None:  # f(z0) is always attained on the branch of a valid two-turn lift
        raise LiftError("f(z0) not attained on the increasing branch")
    top = lift.eval(y0) + 1.0
    if lift.eval(z0 + 1) < top - 1e-12:
        raise LowerClimbingAbsent("f(y0) + 1 is not attained on [y0, z0 + 1]")
    w0l = _branch_solve(lift, y0, z0 + 1, top, "min")
    if w0l is None:
        raise LowerClimbingAbsent("f(y0) + 1 is not attained on [y0, z0 + 1]")
    return ClimbingIntervals(z0, y0, w0, w0l)


def climbing_set(lift: LiftBase, side: str = "upper") -> list[tuple[float, float]]:
    """Where the envelope equals ``f`` and strictly climbs, as base-period intervals.

    For a two-turn lift this is the efficient (resp. lower) climbing interval
    reduced mod 1; for lifts with more turns it is the natural generalization.
    """
    x0 = lift.base
    if lift.turns:
        ci = climbing_intervals(lift)
        a, b = ci.efficient if side == "upper" else ci.lower
        return _reduce_interval(a, b, x0)
    if not isinstance(lift, Lift):
        return [(x0, x0 + 1)]  # monotone smooth lift climbs everywhere it is not flat
    return agreement_set(lift, envelope(lift, side))


def agreement_set(lift: Lift, env: Lift) -> list[tuple[float, float]]:
    """Intervals of one period where the monotone map ``env`` equals ``lift`` and climbs."""
    x0 = lift.base
    shift = np.floor(env.breakpoints - x0)
    ebp = np.unique(np.concatenate([env.breakpoints - shift, [x0, x0 + 1]]))
    cuts = np.unique(np.concatenate([ebp, lift.breakpoints]))
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        climbing = env.eval(b) - env.eval(a) > 1e-14 and abs(env.eval(mid) - lift.eval(mid)) < 1e-12
        if not climbing:
            continue
        if out and abs(out[-1][1] - a) < 1e-15:
            out[-1] = (out[-1][0], b)
        else:
            out.append((float(a), float(b)))
    return out


def _reduce_interval(a, b, x0):
    k = math.floor(a - x0)
    a, b = a - k, b - k
    if b <= x0 + 1 + 1e-15:
        return [(a, min(b, x0 + 1))]
    return [(x0, b - 1), (a, x0 + 1)]


def in_set(x: float, intervals, x0: float, tol: float = MEMBER_TOL) -> bool:
    r = x - math.floor(x - x0)
    for a, b in intervals:
        for rr in (r, r + 1, r - 1):
            if a - tol <= rr <= b + tol:
                return True
    return False


# ---------------------------------------------------------- backward orbits

@dataclass
class BackwardOrbit:
    point: float
    orbit: list = field(repr=False)  # orbit[k] is the k-th preimage, orbit[0] = point
    climbing: list
    rho_upper: RotationEstimate
    forward: RotationEstimate
    follow_steps: int

    @property
    def depth(self) -> int:
        return len(self.orbit) - 1

    @property
    def backward(self) -> float:
        return (self.orbit[0] - self.orbit[-1]) / self.depth


def _periodic_point(lift, env, J, p, q):
    """A point of ``J`` with ``F^q(x) = x + p`` whose orbit never sits on a plateau.

    Prefers an upward crossing of ``F^q - id - p`` (a repelling cycle, hence
    slope > 0 everywhere along it); otherwise a zero touching from below.
    """
    xs = _sample_points(env, q)
    if not isinstance(env, Lift):
        xs = np.sort(np.concatenate([xs, np.linspace(env.base, env.base + 1, 20001)[:-1]]))
    xs = np.append(xs, xs[0] + 1.0)
    inside = np.array([in_set(x, J, env.base) for x in xs])
    h = _iterate_many(env, xs, q) - xs - p
    g = lambda x: env.iterate(x, q) - x - p  # noqa: E731
    for i in range(len(xs) - 1):
        if inside[i] and inside[i + 1] and h[i] < 0 < h[i + 1]:
            return brentq(g, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15)
    cand = np.where(inside)[0]
    if cand.size == 0:
        return None
    zeros = cand[np.abs(h[cand]) < 1e-8]
    if zeros.size == 0:
        return None
    for i in zeros:
        if i + 1 < xs.size and inside[i + 1] and abs(h[i + 1]) < 1e-8:
            mid = 0.5 * (xs[i] + xs[i + 1])
            if abs(g(mid)) < 1e-8:
                return float(mid)  # interior of an arc of periodic points
    return float(xs[zeros[zeros.size // 2]])


def backward_orbit_in_climbing(lift: LiftBase, depth: int = 100, tol: float = 1e-4,
                               qmax: int = QMAX, env: LiftBase | None = None,
                               J: list | None = None) -> BackwardOrbit:
    """A point realizing ``sup rho(f)`` and a backward orbit inside translates of ``J``.

    ``J`` is the efficient climbing interval (for lifts with more turns, the
    set where ``F+`` coincides with ``f`` and climbs).  Among preimages in
    ``J + Z`` the one closest to ``current - rho(F+)`` is taken.  Passing
    ``env`` and ``J`` replaces the upper envelope by another monotone map
    that agrees with ``f`` on ``J``.
    """
    if env is None:
        env = envelope(lift, "upper")
        J = climbing_set(lift, "upper")
    elif J is None:
        J = agreement_set(lift, env)
    rho = rot_monotone(env, tol, qmax)
    x0 = lift.base
    n = rho.iterations

    point = None
    if rho.exact_rational is not None:
        p, q = rho.exact_rational
        point = _periodic_point(lift, env, J, p, q)
    if point is None:
        a, b = J[0]
        point = env.iterate(0.5 * (a + b), 2000)
        point -= math.floor(point - x0)

    # forward: follow f while it agrees with F+ (orbit inside J + Z)
    follow = 0
    y = point
    while follow < n and in_set(y, J, x0):
        fy = lift.eval(y)
        if abs(fy - env.eval(y)) > 1e-9:
            break
        y = fy
        follow += 1
    if rho.exact_rational is not None and point is not None:
        p, q = rho.exact_rational
        if abs(lift.iterate(point, q) - point - p) < 1e-8 and follow >= q:
            fwd = RotationEstimate(p / q, rho.error_bound, q, (p, q), method="periodic")
        else:
            fwd = RotationEstimate(env.displacement(point, n) / n, 1.0 / n, n, method="envelope")
    else:
        fwd = RotationEstimate(env.displacement(point, n) / n, 1.0 / n, n, method="envelope")

    orbit = [point]
    cur = point
    for _ in range(depth):
        cands = [x for x in lift.preimages(cur) if in_set(x, J, x0)]
        if not cands:
            raise LiftError(f"no preimage of {cur!r} in the climbing set")
        target = cur - rho.value
        cur = min(cands, key=lambda x: abs(x - target))
        orbit.append(cur)
    return BackwardOrbit(point, orbit, J, rho, fwd, follow)


def backward_orbit(lift: LiftBase, side: str = "upper", depth: int = 100,
                   tol: float = 1e-4, qmax: int = QMAX) -> BackwardOrbit:
    """``backward_orbit_in_climbing`` for either envelope.

    The lower side runs the upper construction on ``x -> -f(-x)`` and maps
    the result back, so rotation values change sign.
    """
    if side == "upper":
        return backward_orbit_in_climbing(lift, depth, tol, qmax)
    if side != "lower":
        raise ValueError("side must be 'upper' or 'lower'")
    if not isinstance(lift, Lift):
        raise LiftError("lower backward orbits need a piecewise-affine lift")
    bo = backward_orbit_in_climbing(_reflect(lift), depth, tol, qmax)

    def neg(est: RotationEstimate) -> RotationEstimate:
        ex = None if est.exact_rational is None else (-est.exact_rational[0], est.exact_rational[1])
        return RotationEstimate(-est.value, est.error_bound, est.iterations, ex, est.method,
                                None if est.estimate is None else -est.estimate)

    pt = -bo.point
    shift = math.floor(pt - lift.base)
    orbit = [-x - shift for x in bo.orbit]
    J = climbing_set(lift, "lower")
    return BackwardOrbit(orbit[0], orbit, J, neg(bo.rho_upper), neg(bo.forward), bo.follow_steps)


# ------------------------------------------------------------ exact oracle

def exact_envelope_rotation(xs, vs, side: str = "upper", qmax: int = QMAX):
    """Brute-force rational rotation number of an envelope in exact arithmetic.

    ``xs``/``vs`` are ``Fraction`` breakpoint data.  The envelope is evaluated
    as a direct max (min) over the breakpoints in the one-period window, and
    every ``p/q`` with ``q <= qmax`` is tested for a solution of
    ``F^q(x) = x + p`` on the breakpoints of ``F^q``.  Returns ``(p, q)`` or
    ``None``.  Slow; intended as a test oracle.
    """
    xs = [Fraction(x) for x in xs]
    vs = [Fraction(v) for v in vs]
    x0 = xs[0]

    def f(x):
        k = math.floor(x - x0)
        r = x - k
        for i in range(len(xs) - 1):
            if xs[i] <= r <= xs[i + 1]:
                return vs[i] + (vs[i + 1] - vs[i]) * (r - xs[i]) / (xs[i + 1] - xs[i]) + k
        raise AssertionError

    def all_bps(a, b):
        out = [a, b]
        for m in range(math.floor(a - x0) - 1, math.floor(b - x0) + 2):
            out += [x + m for x in xs if a <= x + m <= b]
        return out

    if side == "upper":
        def F(x):
            return max(f(y) for y in all_bps(x - 1, x))
    else:
        def F(x):
            return min(f(y) for y in all_bps(x, x + 1))

    # envelope breakpoints: where F changes between following f and a plateau
    grid = set()
    for i in range(len(xs) - 1):
        grid.add(xs[i])
    cand = set(grid)
    levels = {F(x) for x in grid}
    for lv in levels:
        for k in (-1, 0, 1):
            for i in range(len(xs) - 1):
                a, b, va, vb = xs[i], xs[i + 1], vs[i] + k, vs[i + 1] + k
                if va != vb and min(va, vb) <= lv <= max(va, vb):
                    cand.add(a + (lv - va) * (b - a) / (vb - va))
    pts = sorted({c - math.floor(c - x0) for c in cand})
    ebx = pts + [x0 + 1]
    ebv = [F(x) for x in ebx]

    def Fpa(x):
        k = math.floor(x - x0)
        r = x - k
        for i in range(len(ebx) - 1):
            if ebx[i] <= r <= ebx[i + 1]:
                return ebv[i] + (ebv[i + 1] - ebv[i]) * (r - ebx[i]) / (ebx[i + 1] - ebx[i]) + k
        raise AssertionError

    def Finv(y):
        k = math.floor(y - ebv[0])
        y = y - k
        for i in range(len(ebx) - 1):
            if ebv[i] <= y <= ebv[i + 1]:
                if ebv[i] == ebv[i + 1]:
                    return ebx[i] + k
                return ebx[i] + (y - ebv[i]) * (ebx[i + 1] - ebx[i]) / (ebv[i + 1] - ebv[i]) + k
        raise AssertionError

    base = ebx[:-1]
    level_pts = list(base)
    for q in range(1, qmax + 1):
        if q > 1:
            pre = {Finv(y) for y in level_pts}
            level_pts = sorted(set(base) | {x - math.floor(x - x0) for x in pre})
        hs = []
        for x in level_pts:
            y = x
            for _ in range(q):
                y = Fpa(y)
            hs.append(y - x)
        lo, hi = min(hs), max(hs)
        for p in range(math.ceil(lo), math.floor(hi) + 1):
            if math.gcd(p, q) == 1:
                return p, q
    return None
