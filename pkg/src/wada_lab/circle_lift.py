"""Lifts of degree-one circle endomorphisms.

Two concrete representations share one interface (``eval``, ``iterate``,
``preimages``, ``turns``):

* :class:`Lift` -- piecewise affine on one period, exact breakpoints.  This
  is what every family except the Arnold map uses, and what makes rational
  certification and exact preimages possible.
* :class:`ArnoldLift` -- ``x + t/(2 pi) sin(2 pi x)`` by formula.

:class:`PlateauLift` wraps any lift and replaces it by a constant on one
interval per period; it is how monotone envelopes of smooth two-turn lifts
are represented.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels

DEGREE_TOL = 1e-12
SNAP_TOL = 1e-12


class LiftError(ValueError):
    pass


def _split_values(xs: np.ndarray, vs: np.ndarray):
    """Values as fractional part in ``[x_0, x_0 + 1)`` plus integer part.

    Fractional parts within ``SNAP_TOL`` of a breakpoint are snapped onto it,
    so orbits through exact coincidences (a turning value landing on a
    breakpoint) are not pushed off them by rounding.
    """
    x0 = xs[0]
    vi = np.floor(vs - x0)
    vf = vs - vi
    for j, v in enumerate(vf):
        d = np.abs(xs - v)
        i = int(np.argmin(d))
        if d[i] <= SNAP_TOL:
            if i == len(xs) - 1:
                vf[j], vi[j] = xs[0], vi[j] + 1
            else:
                vf[j] = xs[i]
    vf[-1], vi[-1] = vf[0], vi[0] + 1
    return vf, vi


class LiftBase:
    """Shared behaviour.  Subclasses provide ``base``, ``eval`` and ``preimages``."""

    base: float = 0.0
    turns: dict | None = None

    def __call__(self, x):
        return self.eval(x)

    def reduce(self, x):
        """Split ``x`` into ``(r, k)`` with ``x = r + k`` and ``r`` in the base period."""
        k = math.floor(x - self.base)
        return x - k, k

    def iterate_split(self, x: float, n: int) -> tuple[float, int]:
        if n < 0:
            raise LiftError("n must be >= 0")
        r, k = self.reduce(x)
        for _ in range(n):
            y = self.eval(r)
            j = math.floor(y - self.base)
            k += j
            r = y - j
        return r, k

    def iterate(self, x: float, n: int) -> float:
        r, k = self.iterate_split(x, n)
        return r + k

    def displacement(self, x: float, n: int) -> float:
        """``f^n(x) - x`` with the integer parts subtracted separately."""
        r0, k0 = self.reduce(x)
        r, k = self.iterate_split(x, n)
        return (r - r0) + (k - k0)

    def is_two_turn(self) -> bool:
        return bool(self.turns)


@dataclass(frozen=True, eq=False)
class Lift(LiftBase):
    """Piecewise-affine lift given on one period ``[x_0, x_0 + 1]``.

    ``breakpoints`` must be strictly increasing with last = first + 1 and
    ``values[-1] == values[0] + 1`` (degree one).  ``turns`` optionally holds
    ``{"z0": ..., "y0": ...}``: start of the decreasing and of the increasing
    branch of a two-turn map.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    turns: dict | None = None
    name: str = ""
    _xs: list = field(init=False, repr=False)
    _vs: list = field(init=False, repr=False)
    _vf: np.ndarray = field(init=False, repr=False)
    _vi: np.ndarray = field(init=False, repr=False)
    _vfl: list = field(init=False, repr=False)
    _vil: list = field(init=False, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.breakpoints, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
            raise LiftError("breakpoints and values must be matching 1-d sequences")
        if np.any(np.diff(xs) <= 0):
            raise LiftError("breakpoints must be strictly increasing")
        if abs(xs[-1] - xs[0] - 1.0) > DEGREE_TOL:
            raise LiftError("breakpoints must span exactly one period")
        if abs(vs[-1] - vs[0] - 1.0) > DEGREE_TOL:
            raise LiftError("not a degree-one lift: v_m - v_0 != 1")
        xs[-1] = xs[0] + 1.0
        vf, vi = _split_values(xs, vs)
        vs = vf + vi
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", vs)
        object.__setattr__(self, "_vf", vf)
        object.__setattr__(self, "_vi", vi.astype(np.int64))
        object.__setattr__(self, "_xs", xs.tolist())
        object.__setattr__(self, "_vs", vs.tolist())
        object.__setattr__(self, "_vfl", vf.tolist())
        object.__setattr__(self, "_vil", [int(v) for v in vi])
        if self.turns is not None:
            self._check_turns()

    def _check_turns(self):
        z0, y0 = float(self.turns["z0"]), float(self.turns["y0"])
        if not z0 < y0 < z0 + 1:
            raise LiftError("turn markers must satisfy z0 < y0 < z0 + 1")
        xs = np.linspace(z0, y0, 257)
        if np.any(np.diff(self.eval(xs)) > 1e-12):
            raise LiftError("lift is not nonincreasing on [z0, y0]")
        xs = np.linspace(y0, z0 + 1, 257)
        if np.any(np.diff(self.eval(xs)) < -1e-12):
            raise LiftError("lift is not nondecreasing on [y0, z0 + 1]")

    @property
    def base(self) -> float:
        return self._xs[0]

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.breakpoints)

    def pieces(self):
        """``(x_a, x_b, v_a, v_b)`` for each affine piece of the base period."""
        xs, vs = self._xs, self._vs
        return [(xs[i], xs[i + 1], vs[i], vs[i + 1]) for i in range(len(xs) - 1)]

    def eval(self, x):
        if np.isscalar(x):
            r, k = self.reduce(float(x))
            t, m = kernels.py.pa_eval_frac(self._xs, self._vfl, self._vil, r)
            return t + (m + k)
        x = np.asarray(x, dtype=float)
        k = np.floor(x - self.base)
        r = x - k
        i = np.clip(np.searchsorted(self.breakpoints, r, side="right") - 1,
                    0, len(self._xs) - 2)
        x0 = self.breakpoints[i]
        x1 = self.breakpoints[i + 1]
        dv = (self._vf[i + 1] - self._vf[i]) + (self._vi[i + 1] - self._vi[i])
        return self._vf[i] + dv * (r - x0) / (x1 - x0) + (self._vi[i] + k)

    def iterate_split(self, x: float, n: int) -> tuple[float, int]:
        if n < 0:
            raise LiftError("n must be >= 0")
        return kernels.pa_iterate(self.breakpoints, self._vf, self._vi, float(x), int(n))

    def iterate_many(self, x, n: int) -> np.ndarray:
        r, k = kernels.pa_iterate_many(self.breakpoints, self._vf, self._vi, x, int(n))
        return r + k

    def preimages(self, y: float) -> list[float]:
        """All ``x`` with ``f(x) = y``, one per class mod 1.

        Each solution is returned in the translate ``[x_0 + m, x_0 + 1 + m)``
        where it actually solves ``f(x) = y`` (not merely ``y`` mod 1).
        Flat pieces at height ``y`` contribute their two endpoints.
        """
        out = []
        for xa, xb, va, vb in self.pieces():
            lo, hi = min(va, vb), max(va, vb)
            for m in range(math.ceil(y - hi - 1e-15), math.floor(y - lo + 1e-15) + 1):
                target = y - m
                if va == vb:
                    out.extend([xa + m, xb + m])
                    continue
                x = xa + (target - va) * (xb - xa) / (vb - va)
                out.append(min(max(x, xa), xb) + m)
        out.sort()
        uniq = []
        for x in out:
            if not uniq or abs(x - uniq[-1]) > 1e-13:
                uniq.append(x)
        return [x for x in uniq if abs(self.eval(x) - y) < 1e-9]

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) >= 0))

    def max_min(self) -> tuple[float, float]:
        return float(np.max(self.values)), float(np.min(self.values))

    # serialization
    def to_dict(self) -> dict:
        d = {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}
        if self.turns:
            d["turns"] = {"z0": float(self.turns["z0"]), "y0": float(self.turns["y0"])}
        if self.name:
            d["name"] = self.name
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Lift":
        return cls(np.asarray(d["breakpoints"]), np.asarray(d["values"]),
                   turns=d.get("turns"), name=d.get("name", ""))

    @classmethod
    def from_json(cls, s: str) -> "Lift":
        return cls.from_dict(json.loads(s))

    @classmethod
    def rotation(cls, alpha: float) -> "Lift":
        return cls(np.array([0.0, 1.0]), np.array([alpha, alpha + 1.0]), name=f"rot({alpha})")

    @classmethod
    def identity(cls) -> "Lift":
        return cls.rotation(0.0)


class MonotoneLift(Lift):
    """A :class:`Lift` whose pieces are all nondecreasing."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(np.diff(self.values) < -1e-13):
            raise LiftError("MonotoneLift must be nondecreasing")

    @classmethod
    def of(cls, lift: Lift) -> "MonotoneLift":
        return cls(lift.breakpoints, np.maximum.accumulate(lift.values), name=lift.name)


class ArnoldLift(LiftBase):
    """Reduced Arnold family ``x + t/(2 pi) sin(2 pi x)``.

    Odd, fixes 0, monotone for ``t <= 1``.  For ``t > 1`` the two turning
    points come from ``1 + t cos(2 pi x) = 0``.
    """

    def __init__(self, t: float):
        if t < 0:
            raise LiftError("t must be >= 0")
        self.t = float(t)
        self.name = f"arnold({t})"
        if self.t > 1:
            xa = math.acos(-1.0 / self.t) / (2 * math.pi)
            self.turns = {"z0": xa, "y0": 1.0 - xa}
        else:
            self.turns = None

    @property
    def base(self) -> float:
        return 0.0

    def eval(self, x):
        if np.isscalar(x):
            return x + self.t / (2 * math.pi) * math.sin(2 * math.pi * x)
        x = np.asarray(x, dtype=float)
        return x + self.t / (2 * math.pi) * np.sin(2 * math.pi * x)

    def derivative(self, x):
        return 1 + self.t * np.cos(2 * np.pi * np.asarray(x, dtype=float))

    def monotone_pieces(self) -> list[tuple[float, float]]:
        if not self.turns:
            return [(0.0, 1.0)]
        z0, y0 = self.turns["z0"], self.turns["y0"]
        return [(0.0, z0), (z0, y0), (y0, 1.0)]

    def iterate_many(self, x, n: int) -> np.ndarray:
        x = np.array(x, dtype=float)
        c = self.t / (2 * math.pi)
        k = np.floor(x)
        r = x - k
        for _ in range(n):
            y = r + c * np.sin(2 * np.pi * r)
            j = np.floor(y)
            k += j
            r = y - j
        return r + k

    def preimages(self, y: float) -> list[float]:
        out = []
        for a, b in self.monotone_pieces():
            fa, fb = self.eval(a), self.eval(b)
            lo, hi = min(fa, fb), max(fa, fb)
            for m in range(math.ceil(y - hi - 1e-15), math.floor(y - lo + 1e-15) + 1):
                target = y - m
                g = lambda x: self.eval(x) - target  # noqa: E731
                ga, gb = g(a), g(b)
                if ga == 0:
                    x = a
                elif gb == 0:
                    x = b
                elif ga * gb > 0:  # target within rounding of an extremum
                    x = a if abs(ga) < abs(gb) else b
                    if abs(g(x)) > 1e-13:
                        continue
                else:
                    x = brentq(g, a, b, xtol=1e-15, rtol=1e-15)
                out.append(x + m)
        out.sort()
        uniq = []
        for x in out:
            if not uniq or abs(x - uniq[-1]) > 1e-12:
                uniq.append(x)
        return uniq

    def to_dict(self) -> dict:
        return {"family": "arnold", "t": self.t}


class PlateauLift(LiftBase):
    """``inner`` with the interval ``[a, b]`` (and translates) flattened to ``level``.

    ``a < b <= a + 1``; ``level`` is the value taken on ``[a, b]`` itself.
    """

    def __init__(self, inner: LiftBase, a: float, b: float, level: float, name: str = ""):
        if not a <= b <= a + 1:
            raise LiftError("plateau must satisfy a <= b <= a + 1")
        self.inner = inner
        self.a, self.b, self.level = float(a), float(b), float(level)
        self.turns = None
        self.name = name or f"plateau({getattr(inner, 'name', '')})"

    @property
    def base(self) -> float:
        return self.a

    def eval(self, x):
        if np.isscalar(x):
            k = math.floor(x - self.a)
            r = x - k
            if r <= self.b:
                return self.level + k
            return self.inner.eval(x)
        x = np.asarray(x, dtype=float)
        k = np.floor(x - self.a)
        r = x - k
        return np.where(r <= self.b, self.level + k, self.inner.eval(x))

    def iterate_many(self, x, n: int) -> np.ndarray:
        x = np.array(x, dtype=float)
        k = np.floor(x - self.a)
        r = x - k
        for _ in range(n):
            y = self.eval(r)
            j = np.floor(y - self.a)
            k += j
            r = y - j
        return r + k

    def preimages(self, y: float) -> list[float]:
        out = [x for x in self.inner.preimages(y)
               if (x - math.floor(x - self.a)) > self.b]
        m = y - self.level
        if abs(m - round(m)) < 1e-12:
            out += [self.a + round(m), self.b + round(m)]
        return sorted(out)
