"""Independent reference computations in exact arithmetic.

Nothing here imports the package's evaluation code: lifts are plain lists of
breakpoints and values, evaluated with ``Fraction``.
"""
from fractions import Fraction as Fr
import math


def pa_eval(xs, vs, x):
    """Exact value of the degree-one piecewise-affine lift ``(xs, vs)`` at ``x``."""
    x = Fr(x)
    k = math.floor(x - xs[0])
    r = x - k
    for a, b, va, vb in zip(xs, xs[1:], vs, vs[1:]):
        if a <= r <= b:
            return va + (vb - va) * (r - a) / (b - a) + k
    raise AssertionError("unreachable")


def pa_iterate(xs, vs, x, n):
    for _ in range(n):
        x = pa_eval(xs, vs, x)
    return x


def pa_preimages(xs, vs, y):
    """All ``x`` with ``f(x) = y`` over the periods whose image can reach ``y``."""
    y = Fr(y)
    lo, hi = min(vs), max(vs)
    out = set()
    for m in range(math.floor(y - hi) - 1, math.ceil(y - lo) + 2):
        for a, b, va, vb in zip(xs, xs[1:], vs, vs[1:]):
            ta, tb = va + m, vb + m
            if ta == tb:
                continue
            if min(ta, tb) <= y <= max(ta, tb):
                out.add(a + (b - a) * (y - ta) / (tb - ta) + m)
    return sorted(out)


def upper_envelope_rotation_bruteforce(xs, vs, q_max=12, grid=64):
    """Largest ``p/q`` with ``F+^q(x) >= x + p`` at some grid point, ``F+`` the running max.

    ``F+`` is evaluated by direct maximization over the breakpoints left of
    ``x`` within one period, then ``q``-fold composition in exact arithmetic.
    """
    def F(x):
        x = Fr(x)
        best = pa_eval(xs, vs, x)
        k = math.floor(x - xs[0])
        for m in (k - 1, k):
            for b in xs:
                if b + m <= x:
                    best = max(best, pa_eval(xs, vs, b + m))
        return best

    pts = [xs[0] + Fr(j, grid) for j in range(grid)]
    best = None
    for q in range(1, q_max + 1):
        for x in pts:
            y = x
            for _ in range(q):
                y = F(y)
            r = Fr(math.floor(y - x), q)
            if best is None or r > best:
                best = r
    return best


def constant_slope_laps(slope, n):
    """Lap count of the ``n``-th iterate of ``x -> slope x`` on the circle: ``slope^n``."""
    return slope ** n


def phi_quotient_max(eps):
    """Top of the quotient lift over ``[0, 1/2]``: ``1/2 + eps/(2(1 - 2 eps))``."""
    return 0.5 + eps / (2 * (1 - 2 * eps))
