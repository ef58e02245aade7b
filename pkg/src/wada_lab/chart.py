"""Disk dynamics in radial-chart coordinates.

A chart point is ``(c, u, s)``: boundary component ``c``, boundary parameter
``u in [0, 1)`` and radial level ``s in [0, 1]``.  ``s = 0`` is the boundary
circle and ``s = 1`` the graph (spine).  All maps act on numpy arrays of the
three coordinates.

Two disks are modelled:

* :class:`PantsMap` -- the pair of pants around the two-circle graph, for
  ``phi_eps``.  ``C0`` and ``C1`` sit inside ``S0`` and ``S1``; ``C2`` is
  the outer boundary, parametrized by the quotient circle of ``phi*_eps``.
* :class:`AnnulusMap` -- an annulus around a circle, for the Arnold and
  five-piece lifts.  ``C0`` is the inner boundary and ``C1`` the outer.

Each map exposes ``unwrap`` (the graph embedded into the collar of the
image fibers), ``collar`` (the shrink ``s -> 1 - eps + eps s``), the
realization ``H = collar o unwrap`` used for attractor approximations, and
``psi = smash o (collar-conjugated unwrap)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle_lift import Lift, LiftBase
from .families import EPS0, ChainPoint, make_five_piece, make_phi_eps, quotient_lift
from .rotation import envelope

C0, C1, C2 = 0, 1, 2


@dataclass(frozen=True)
class ChartPoint:
    c: int
    u: float
    s: float

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise ValueError("radial level must lie in [0, 1]")

    def format(self) -> str:
        return f"{self.c}:{self.u!r}:{self.s!r}"

    @classmethod
    def parse(cls, text: str) -> "ChartPoint":
        c, u, s = text.split(":")
        return cls(int(c), float(u) % 1.0, float(s))


def smash(eps: float, s):
    """Radial smash ``gamma_eps``: ``s/(1 - eps)`` below the collar, 1 inside it."""
    return np.minimum(np.asarray(s, dtype=float) / (1.0 - eps), 1.0)


def _wrap(d):
    """Signed representative of ``d`` mod 1 in ``[-1/2, 1/2)``."""
    return d - np.floor(d + 0.5)


class DiskMap:
    eps: float
    components: tuple = ()
    kind = ""

    def collar(self, c, u, s):
        return c, u, 1.0 - self.eps + self.eps * np.asarray(s, dtype=float)

    def H(self, c, u, s):
        """Realization map: unwrap, then shrink into the collar."""
        return self.collar(*self.unwrap(c, u, s))

    def H_iter(self, c, u, s, n: int):
        for _ in range(n):
            c, u, s = self.H(c, u, s)
        return c, u, s

    def smash(self, s):
        return smash(self.eps, s)

    def psi(self, c, u, s):
        """``smash o fbar``; ``fbar`` is the collar conjugate of ``unwrap`` in the collar
        and the boundary map times identity below it."""
        c = np.asarray(c, dtype=np.int64)
        u = np.asarray(u, dtype=float)
        s = np.asarray(s, dtype=float)
        inside = s >= 1.0 - self.eps
        oc, ou, os_ = c.copy(), u.copy(), s.copy()
        if inside.any():
            sc = (s[inside] - (1.0 - self.eps)) / self.eps
            cc, uu, ss = self.collar(*self.unwrap(c[inside], u[inside], sc))
            oc[inside], ou[inside], os_[inside] = cc, uu, ss
        out = ~inside
        if out.any():
            ou[out] = self.boundary_map(c[out], u[out]) % 1.0
        return oc, ou, self.smash(os_)

    def as_arrays(self, p: ChartPoint):
        return np.array([p.c]), np.array([p.u]), np.array([p.s])

    def apply(self, fn, p: ChartPoint) -> ChartPoint:
        c, u, s = fn(*self.as_arrays(p))
        return ChartPoint(int(c[0]), float(u[0]) % 1.0, float(min(max(s[0], 0.0), 1.0)))

    def radial_arc(self, c: int, u: float, n: int = 256):
        s = np.linspace(0.0, 1.0, n)
        return np.full(n, c, dtype=np.int64), np.full(n, u % 1.0), s

    def pixel(self, xy: np.ndarray, res: int) -> np.ndarray:
        """World coordinates to (column, row) pixel coordinates."""
        lo, hi = self.extent
        scale = res / (hi - lo)
        col = (xy[..., 0] - lo) * scale
        row = (hi - xy[..., 1]) * scale
        return np.stack([col, row], axis=-1)


# ------------------------------------------------------------------ pants

class PantsMap(DiskMap):
    """Pants chart for ``phi_eps``.

    Rendering: ``C2`` is the circle of radius 3 about the origin ``x0``; a
    ``C2`` point ``(u, s)`` sits at radius ``3(1 - s) + s r(u)`` on the ray
    of angle ``-pi/2 - 2 pi u`` with ``r(u) = 2 |sin 2 pi u|`` (the polar
    form of the figure eight, so ``s = 1`` lands on ``beta_0(2u)`` or
    ``beta_1(2u - 1)``).  ``C0``, ``C1`` are circles of radius 1/2 about
    ``(-1, 0)`` and ``(1, 0)``.
    """

    kind = "pants"
    components = (C0, C1, C2)
    extent = (-3.1, 3.1)

    def __init__(self, eps: float = EPS0):
        self.eps = float(eps)
        self.name = f"pants_{self.eps:.6g}"
        self.chain = make_phi_eps(self.eps)
        self.lift = quotient_lift(self.chain)
        self.W = envelope(self.lift, "upper")
        e = self.eps
        self.a = e / (2.0 * (1.0 - 2.0 * e))
        self.s_start = 1.0 - e / 2.0
        self.s_end = 1.0 - 3.0 * e / 4.0

    # ---- anchors and geometry
    def anchor(self, c: int, u: float) -> ChainPoint:
        u = u % 1.0
        if c == C2:
            if u < 0.5:
                return self.chain.canonical(0, 2 * u)
            return self.chain.canonical(1, 2 * u - 1)
        return self.chain.canonical(c, -u)

    def climbing(self) -> list[tuple[float, float]]:
        """``J_eps`` in quotient coordinates: two copies of the efficient climbing interval."""
        e = self.eps
        return [(e / 2, 0.5 - e / 2), (0.5 + e / 2, 1 - e / 2)]

    def to_xy(self, c, u, s) -> np.ndarray:
        c = np.asarray(c)
        u = np.asarray(u, dtype=float)
        s = np.asarray(s, dtype=float)
        ang2 = -np.pi / 2 - 2 * np.pi * u
        r2 = 2.0 * np.abs(np.sin(2 * np.pi * u))
        rho = 3.0 * (1 - s) + s * r2
        x = np.where(c == C2, rho * np.cos(ang2), 0.0)
        y = np.where(c == C2, rho * np.sin(ang2), 0.0)
        rad = 0.5 + 0.5 * s
        th = 2 * np.pi * u
        x = np.where(c == C0, -1.0 + rad * np.cos(th), x)
        y = np.where(c == C0, rad * np.sin(th), y)
        x = np.where(c == C1, 1.0 - rad * np.cos(th), x)
        y = np.where(c == C1, -rad * np.sin(th), y)
        return np.stack([x, y], axis=-1)

    def seeds(self) -> dict:
        return {C0: (-1.0, 0.0), C1: (1.0, 0.0), C2: (0.0, 2.95)}

    def boundary_map(self, c, u):
        c = np.asarray(c)
        return np.where(c == C2, self.W.eval(u), u)

    # ---- unwrapping
    def graph_image(self, u2):
        """``unwrap`` of the graph point with ``C2`` parameter ``u2`` as ``(fiber, level)``."""
        _, f, lv = self._unwrap_c2(np.asarray(u2, dtype=float), np.ones(np.shape(u2)))
        return f, lv

    def _unwrap_c2(self, u, s):
        e, a = self.eps, self.a
        u = u % 1.0
        k = np.floor((u + e / 2) * 2.0)
        r = u - k / 2.0
        fiber = np.empty_like(u)
        level = np.empty_like(u)
        jm = r >= e / 2
        if jm.any():
            rj = r[jm]
            L = self.s_start + (self.s_end - self.s_start) * (rj - e / 2) / (0.5 - e)
            fiber[jm] = self.lift.eval(u[jm])
            level[jm] = s[jm] * L
        gm = ~jm
        if gm.any():
            rg, sg, kg = r[gm], s[gm], k[gm]
            v = 2 * a * np.abs(rg) / e
            lam = self.s_end + (self.s_start - self.s_end) * (rg + e / 2) / e
            one_minus = np.where(rg < 0, 1 - self.s_end, 1 - self.s_start)
            LT = 1.0 - one_minus * v / a
            d = np.hypot(v - a, LT - lam)
            sig = lam / (lam + d)
            up = sg <= sig
            w = np.where(up, 0.0, (sg - sig) / np.where(sig < 1, 1 - sig, 1.0))
            fg = np.where(up, a, a + w * (v - a))
            lg = np.where(up, sg / sig * lam, lam + w * (LT - lam))
            fiber[gm] = fg + kg / 2.0
            level[gm] = lg
        return np.full(u.shape, C2, dtype=np.int64), fiber % 1.0, level

    def unwrap(self, c, u, s):
        """The unwrapping: ``C0``, ``C1`` boundaries fixed; graph into the ``C2`` collar.

        ``C2`` radial arcs over the climbing set ``J`` go into the radial arc
        of the image point; arcs over the gaps around ``x0`` run up the fiber
        of the plateau value and then across to the folded graph image.
        ``C0``/``C1`` arcs are doubled in speed up to the graph and then
        follow a straight chart segment from the graph point to its image.
        """
        c = np.asarray(c, dtype=np.int64)
        u = np.asarray(u, dtype=float) % 1.0
        s = np.asarray(s, dtype=float)
        oc = np.empty_like(c)
        ou = np.empty_like(u)
        os_ = np.empty_like(s)
        m2 = c == C2
        if m2.any():
            oc[m2], ou[m2], os_[m2] = self._unwrap_c2(u[m2], s[m2])
        mi = ~m2
        if mi.any():
            ci, ui, si = c[mi], u[mi], s[mi]
            low = si <= 0.5
            rc = ci.copy()
            ru = ui.copy()
            rs = np.minimum(2 * si, 1.0)
            hi = ~low
            if hi.any():
                t = (-ui[hi]) % 1.0
                u2 = t / 2.0 + ci[hi] / 2.0
                tf, tl = self.graph_image(u2)
                tau = 2 * si[hi] - 1.0
                rc[hi] = C2
                ru[hi] = (u2 + tau * _wrap(tf - u2)) % 1.0
                rs[hi] = 1.0 + tau * (tl - 1.0)
            oc[mi], ou[mi], os_[mi] = rc, ru, rs
        return oc, ou, os_

    def canonical_graph(self, c, u):
        """``C2`` parameter of the graph point anchored at ``(c, u, 1)``."""
        c = np.asarray(c)
        u = np.asarray(u, dtype=float)
        return np.where(c == C2, u % 1.0, ((-u) % 1.0) / 2.0 + c / 2.0)


# ---------------------------------------------------------------- annulus

class AnnulusMap(DiskMap):
    """Annulus chart for a degree-one lift ``f``.

    A point has signed height ``h``: ``h = 1 - s`` on the ``C1`` (outer) side
    and ``h = s - 1`` on the ``C0`` side; the spine is ``h = 0``.  The
    spine point ``y`` goes to ``(f(y), h(y))`` with ``|h(y)| <= delta``:
    ``+delta`` where ``f`` agrees with the outer base map, ``-delta`` where
    it agrees with the inner one.  An outer radial arc over ``y`` runs down
    the fiber of ``M_out(y)`` to height ``2 delta`` and then straight to the
    image point, so over the climbing set it stays radial.
    """

    kind = "annulus"
    components = (C0, C1)
    extent = (-3.1, 3.1)

    def __init__(self, lift: LiftBase, eps: float = 0.2, inner: LiftBase | None = None,
                 outer: LiftBase | None = None, name: str = ""):
        self.lift = lift
        self.eps = float(eps)
        self.delta = self.eps / 4.0
        self.outer = outer if outer is not None else envelope(lift, "upper")
        self.inner = inner if inner is not None else envelope(lift, "lower")
        self.name = name or getattr(lift, "name", "")

    def anchor(self, c: int, u: float) -> float:
        return u % 1.0

    def to_xy(self, c, u, s):
        c = np.asarray(c)
        s = np.asarray(s, dtype=float)
        rad = np.where(c == C1, 3.0 - s, 1.0 + s)
        th = 2 * np.pi * np.asarray(u, dtype=float)
        return np.stack([rad * np.cos(th), rad * np.sin(th)], axis=-1)

    def seeds(self) -> dict:
        return {C0: (0.0, 0.0), C1: (0.0, 2.98)}

    def boundary_map(self, c, u):
        c = np.asarray(c)
        u = np.asarray(u, dtype=float)
        return np.where(c == C1, self.outer.eval(u), self.inner.eval(u))

    def height(self, y):
        f = self.lift.eval(y)
        mo = self.outer.eval(y)
        mi = self.inner.eval(y)
        den = mo - mi
        safe = np.where(np.abs(den) > 1e-14, den, 1.0)
        a = np.where(np.abs(den) > 1e-14, (mo - f) / safe, 0.5)
        return self.delta * (1.0 - 2.0 * np.clip(a, 0.0, 1.0))

    def unwrap(self, c, u, s):
        c = np.asarray(c, dtype=np.int64)
        y = np.asarray(u, dtype=float) % 1.0
        s = np.asarray(s, dtype=float)
        f = self.lift.eval(y)
        h_img = self.height(y)
        out = c == C1
        m = np.where(out, self.outer.eval(y), self.inner.eval(y))
        sign = np.where(out, 1.0, -1.0)
        knee = sign * 2 * self.delta
        first = 1.0 - 2 * self.delta
        seg = np.hypot(f - m, h_img - knee)
        sig = first / (first + seg)
        up = s <= sig
        w = np.where(up, 0.0, (s - sig) / np.where(sig < 1, 1 - sig, 1.0))
        x = np.where(up, m, m + w * (f - m))
        h = np.where(up, sign * (1.0 - s / sig * first), knee + w * (h_img - knee))
        oc = np.where(h > 0, C1, np.where(h < 0, C0, c))
        return oc.astype(np.int64), x % 1.0, 1.0 - np.abs(h)


FIVE_PIECE_INNER_A = Lift(np.array([0.0, 4.0 / 9.0, 0.5, 1.0]), np.array([0.0, 0.0, 0.5, 1.0]),
                          name="inner_A")


def five_piece_annulus(variant: str = "A", eps: float = 0.2) -> AnnulusMap:
    """The two embeddings of the five-piece map.

    ``A``: inner base map is flat on ``[0, 4/9]``, follows ``f`` up to 1/2
    and is the identity on the fixed arc, so inner radial arcs land on fixed
    points (interior rotation 0).  ``B``: inner base map is the lower
    envelope, whose climbing set misses the fixed arc.
    """
    f = make_five_piece()
    variant = variant.upper()
    if variant == "A":
        return AnnulusMap(f, eps, inner=FIVE_PIECE_INNER_A, name="five_piece_A")
    if variant == "B":
        return AnnulusMap(f, eps, name="five_piece_B")
    raise ValueError("variant must be 'A' or 'B'")
