"""Attractor approximations, basin labels and the Wada score on pixel grids."""
from __future__ import annotations

import json
import math
import zlib
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .chart import C0, C1, C2, DiskMap, PantsMap
from .kernels import draw_polyline

BAND = -1
UNKNOWN = -2
MAX_POINTS = 40_000_000
REFINE_ROUNDS = 60
RADIAL_TOL = 1e-6  # fiber agreement after depth pushes (errors grow with the expansion)


class SeedSwallowed(RuntimeError):
    """A basin seed fell inside the attractor band."""


class MeshTooCoarse(RuntimeError):
    """Adjacent image points stayed more than the allowed pixel distance apart."""


@dataclass
class Curve:
    """A boundary polyline pushed forward ``depth`` times.

    ``param`` holds the boundary parameters, ``c``, ``u``, ``s`` the chart
    coordinates of the images and ``xy`` their render coordinates.
    """

    comp: int
    param: np.ndarray
    c: np.ndarray
    u: np.ndarray
    s: np.ndarray
    xy: np.ndarray
    depth: int


def _push(dm: DiskMap, comp, param, n, s0=0.0):
    c = np.full(param.shape, comp, dtype=np.int64)
    s = np.full(param.shape, s0, dtype=float)
    return dm.H_iter(c, param.copy(), s, n)


def _gaps(xy, res, dm):
    px = dm.pixel(xy, res)
    return np.hypot(*np.diff(px, axis=0).T)


def refine_curve(dm: DiskMap, comp: int, param, n: int, res: int, spacing: float = 0.5,
                 s0: float = 0.0, max_points: int = MAX_POINTS) -> Curve:
    """Image under ``H^n`` of the radial level ``s0`` of ``comp``, refined until
    adjacent points are closer than ``spacing`` pixels."""
    param = np.asarray(param, dtype=float)
    c, u, s = _push(dm, comp, param, n, s0)
    xy = dm.to_xy(c, u, s)
    for _ in range(REFINE_ROUNDS):
        g = _gaps(xy, res, dm)
        bad = np.nonzero((g > spacing) & (np.diff(param) > 1e-15))[0]
        if bad.size == 0:
            break
        if param.size + bad.size > max_points:
            raise MeshTooCoarse(f"refinement needs more than {max_points} points")
        mid = 0.5 * (param[bad] + param[bad + 1])
        mc, mu, ms = _push(dm, comp, mid, n, s0)
        mxy = dm.to_xy(mc, mu, ms)
        idx = bad + 1
        param = np.insert(param, idx, mid)
        c = np.insert(c, idx, mc)
        u = np.insert(u, idx, mu)
        s = np.insert(s, idx, ms)
        xy = np.insert(xy, idx, mxy, axis=0)
    return Curve(comp, param, c, u, s, xy, n)


@dataclass
class AttractorApprox:
    dm: DiskMap
    depth: int
    res: int
    curves: list
    band: np.ndarray
    dh_history: list = field(default_factory=list)

    @property
    def points(self) -> int:
        return sum(cv.param.size for cv in self.curves)


def boundary_curves(dm: DiskMap, n: int, res: int, base: int = 2048) -> list:
    out = []
    for comp in dm.components:
        param = np.linspace(0.0, 1.0, base + 1)
        out.append(refine_curve(dm, comp, param, n, res))
    return out


def rasterize(dm: DiskMap, curves, res: int, dilate: int = 1) -> np.ndarray:
    img = np.zeros((res, res), dtype=np.uint8)
    for cv in curves:
        px = dm.pixel(cv.xy, res)
        draw_polyline(img, np.ascontiguousarray(px[:, 0]), np.ascontiguousarray(px[:, 1]), 1)
    if dilate:
        img = ndimage.binary_dilation(img, structure=np.ones((3, 3), bool), iterations=dilate)
    return img.astype(bool)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance in pixels between two boolean pixel sets."""
    if not a.any() or not b.any():
        return math.inf
    da = ndimage.distance_transform_edt(~a)
    db = ndimage.distance_transform_edt(~b)
    return float(max(db[a].max(), da[b].max()))


def attractor_approx(dm: DiskMap, N: int, res: int = 1024) -> AttractorApprox:
    """Band of ``H^N(boundary)`` at resolution ``res``; ``N = 0`` is the boundary itself."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    curves = boundary_curves(dm, N, res)
    return AttractorApprox(dm, N, res, curves, rasterize(dm, curves, res))


def choose_depth(dm: DiskMap, res: int = 1024, threshold: float = 2.0, n_min: int = 1,
                 n_max: int = 30) -> AttractorApprox:
    """Smallest depth ``N`` with ``d_H(A_N, A_{N+1}) < threshold`` pixels."""
    prev = attractor_approx(dm, n_min, res)
    hist = []
    for n in range(n_min + 1, n_max + 1):
        cur = attractor_approx(dm, n, res)
        d = hausdorff(_thin(prev), _thin(cur))
        hist.append(d)
        if d < threshold:
            prev.dh_history = hist
            return prev
        prev = cur
    prev.dh_history = hist
    return prev


def _thin(ap: AttractorApprox) -> np.ndarray:
    return rasterize(ap.dm, ap.curves, ap.res, dilate=0)


# ----------------------------------------------------------------- basins

@dataclass
class BasinGrid:
    """Pixel labels: region id (the boundary component of its seed), ``BAND`` or ``UNKNOWN``.

    ``traces`` maps a region to the pixels crossed by its own depth-``N``
    boundary curve.  Those curves lie in the basin, so the traced pixels
    belong to the region's closure even where the band hides the region's
    sub-pixel fingers.
    """

    res: int
    labels: np.ndarray
    seeds: dict
    depth: int
    traces: dict = field(default_factory=dict)

    @property
    def regions(self) -> list:
        return sorted(self.seeds)

    def member(self, c: int) -> np.ndarray:
        m = self.labels == c
        if c in self.traces:
            m = m | self.traces[c]
        return m


def label_band(dm: DiskMap, band: np.ndarray, depth: int = 0, traces: dict | None = None) -> BasinGrid:
    """Flood fill the complement of ``band`` from one seed per boundary component."""
    res = band.shape[0]
    comp, _ = ndimage.label(~band)
    labels = np.full(band.shape, UNKNOWN, dtype=np.int64)
    labels[band] = BAND
    seen = {}
    for c, xy in dm.seeds().items():
        col, row = dm.pixel(np.asarray(xy, dtype=float), res)
        r, k = int(row), int(col)
        if band[r, k]:
            raise SeedSwallowed(f"seed of component {c} lies in the band")
        lab = comp[r, k]
        if lab in seen.values():
            raise SeedSwallowed("two seeds share a region")
        seen[c] = lab
        labels[comp == lab] = c
    return BasinGrid(res, labels, {c: c for c in seen}, depth, dict(traces or {}))


def basin_label(dm: DiskMap, N: int, res: int = 1024, ap: AttractorApprox | None = None) -> BasinGrid:
    if ap is None:
        ap = attractor_approx(dm, N, res)
    traces = {cv.comp: rasterize(dm, [cv], res, dilate=0) for cv in ap.curves}
    return label_band(dm, ap.band, ap.depth, traces)


def wada_score(bg: BasinGrid, k: int = 3) -> dict:
    """Per region: fraction of its boundary pixels within ``k`` pixels of every other region.

    A boundary pixel of a region is a pixel of its closure (flood fill plus
    trace) that is not interior to the flood fill.
    """
    regions = bg.regions
    if len(regions) < 2:
        raise ValueError("need at least two regions")
    cross = ndimage.generate_binary_structure(2, 1)
    members = {c: bg.member(c) for c in regions}
    near = {c: ndimage.distance_transform_edt(~members[c]) <= k for c in regions}
    out = {}
    for c in regions:
        inner = ndimage.binary_erosion(bg.labels == c, structure=cross, border_value=1)
        b = members[c] & ~inner
        if not b.any():
            out[c] = 0.0
            continue
        ok = np.ones(int(b.sum()), dtype=bool)
        for o in regions:
            if o != c:
                ok &= near[o][b]
        out[c] = float(ok.mean())
    return out


def control_pattern(res: int = 512) -> BasinGrid:
    """Two thin strips sharing one long side: each touches the other along about half its boundary."""
    labels = np.full((res, res), UNKNOWN, dtype=np.int64)
    w, h = res * 3 // 4, max(res // 64, 4)
    x0, y0 = (res - w) // 2, res // 2
    labels[y0 - h:y0, x0:x0 + w] = 0
    labels[y0, x0:x0 + w] = BAND
    labels[y0 + 1:y0 + 1 + h, x0:x0 + w] = 1
    return BasinGrid(res, labels, {0: 0, 1: 1}, 0)


def concentric_pattern(res: int = 256) -> BasinGrid:
    """Two regions sharing one circle."""
    ax = np.arange(res) - res / 2 + 0.5
    x, y = np.meshgrid(ax, ax)
    r = np.hypot(x, y)
    labels = np.where(r < res / 4, 0, 1).astype(np.int64)
    labels[np.abs(r - res / 4) < 0.5] = BAND
    return BasinGrid(res, labels, {0: 0, 1: 1}, 0)


# ------------------------------------------------------ accessible arcs

@dataclass
class AccessibleArc:
    """Finite-depth approximation of an arc accessing a point of the attractor.

    ``terminal`` is ``H^depth`` of the radial arc over the depth-th preimage;
    ``polyline`` prepends the radial segment from the boundary to it.
    """

    comp: int
    point: float
    depth: int
    terminal: tuple
    polyline: tuple
    radial: bool
    rho: object
    forward: object
    backward: float
    orbit_in_set: bool
    climbing: list

    @property
    def endpoint(self) -> tuple:
        c, u, s = self.terminal
        i = int(np.argmax(s))
        return int(c[i]), float(u[i]), float(s[i])


def _base_data(dm: DiskMap, comp: int):
    """(lift, monotone boundary map, climbing set) seen from boundary component ``comp``."""
    from .rotation import agreement_set
    if isinstance(dm, PantsMap):
        if comp != C2:
            raise ValueError("pants accessible arcs start on the outer boundary")
        return dm.lift, dm.W, dm.climbing()
    env = dm.outer if comp == C1 else dm.inner
    return dm.lift, env, agreement_set(dm.lift, env)


def accessible_arc(dm: DiskMap, comp: int, depth: int = 20, samples: int = 256,
                   tol: float = 1e-4) -> AccessibleArc:
    from .rotation import backward_orbit_in_climbing, in_set
    lift, env, J = _base_data(dm, comp)
    bo = backward_orbit_in_climbing(lift, depth, tol, env=env, J=J)
    x0 = lift.base
    inside = all(in_set(x, J, x0) for x in bo.orbit)
    y = bo.orbit[depth]
    c, u, s = dm.radial_arc(comp, y % 1.0, samples)
    c, u, s = dm.H_iter(c, u, s, depth)
    star = bo.point % 1.0
    radial = bool(np.all(np.abs(_wrap_diff(u, star)) < RADIAL_TOL) and np.all(c == comp))
    lo = float(s.min())
    n0 = max(int(samples * lo), 2)
    head = (np.full(n0, comp), np.full(n0, star), np.linspace(0.0, lo, n0))
    poly = tuple(np.concatenate([h, t]) for h, t in zip(head, (c, u, s)))
    return AccessibleArc(comp, bo.point, depth, (c, u, s), poly, radial, bo.rho_upper,
                         bo.forward, bo.backward, inside, J)


def _wrap_diff(a, b):
    d = np.asarray(a) - b
    return d - np.round(d)


def fixed_arc_access(dm, arc=(0.5, 1.0), comp: int = C0, samples: int = 1000) -> dict:
    """Does any radial arc from ``comp`` over a fixed point land on a fixed point?

    For each sampled fixed point ``y`` the radial arc over ``y`` is pushed
    forward once; it terminates on the fixed set when the image stays on the
    radial fiber of ``y`` and its top end projects back to ``y``.
    """
    y = np.linspace(arc[0], arc[1], samples)
    lift = dm.lift
    fixed = np.abs(lift.eval(y) - y) < 1e-12
    hits = 0
    for yy in y[fixed]:
        c, u, s = dm.radial_arc(comp, yy, 64)
        c2, u2, s2 = dm.H(c, u, s)
        if np.all(np.abs(_wrap_diff(u2, yy)) < 1e-9) and np.all(c2 == comp):
            hits += 1
    return {"samples": int(samples), "fixed_samples": int(fixed.sum()), "landing": hits}


# ---------------------------------------------------- translation line

@dataclass
class TranslationLine:
    pieces: list          # chart arrays (c, u, s) for lambda, H(lambda), ...
    chain: list           # z, H(z), ...
    band_distance: list   # min pixel distance of each piece to the band
    chain_ok: bool
    disjoint: bool


def translation_line(dm: PantsMap, segments: int = 6, N: int | None = None, res: int = 1024,
                     u_star: float | None = None, s0: float = 0.05,
                     ap: AttractorApprox | None = None) -> TranslationLine:
    """An arc ``lambda`` from ``z`` to ``H(z)`` in the outer basin, pushed forward.

    ``band_distance[n]`` is the pixel distance from ``H^n(lambda)`` to the
    curves of the attractor approximation (depth ``segments + 1`` unless
    given); ``disjoint`` asks for at least one pixel everywhere.
    """
    if not isinstance(dm, PantsMap):
        raise ValueError("translation lines live in the pants chart")
    if u_star is None:
        a, b = dm.climbing()[0]
        u_star = a + 0.75 * (b - a)  # its image lands inside the other climbing copy
    if ap is None:
        ap = attractor_approx(dm, N if N is not None else segments + 1, res)
    dist = ndimage.distance_transform_edt(~_thin(ap))
    z = (np.array([C2]), np.array([u_star]), np.array([s0]))
    hz = dm.H(*z)
    # lambda runs along the level s0 to the fiber of H(z), then up that fiber
    t = np.linspace(0.0, 1.0, 512)
    du = _wrap_diff(hz[1][0], u_star)
    lam = (np.full(2 * t.size, C2),
           np.concatenate([(u_star + t * du) % 1.0, np.full(t.size, hz[1][0])]),
           np.concatenate([np.full(t.size, s0), s0 + t * (hz[2][0] - s0)]))
    pieces, chain, bd = [lam], [z, hz], []
    cur = lam
    for _ in range(segments - 1):
        cur = dm.H(*cur)
        pieces.append(cur)
        chain.append(dm.H(*chain[-1]))
    ok = True
    for j, pc in enumerate(pieces):
        start = tuple(a[:1] for a in pc)
        end = tuple(a[-1:] for a in pc)
        for p, q in ((start, chain[j]), (end, chain[j + 1])):
            if abs(_wrap_diff(p[1][0], q[1][0])) > 1e-9 or abs(p[2][0] - q[2][0]) > 1e-9:
                ok = False
        px = dm.pixel(dm.to_xy(*pc), res)
        col = np.clip(px[:, 0].astype(int), 0, res - 1)
        row = np.clip(px[:, 1].astype(int), 0, res - 1)
        bd.append(float(dist[row, col].min()))
    return TranslationLine(pieces, chain, bd, ok, min(bd) >= 1.0)


# ----------------------------------------------------------------- g3

def outer_loop_order(g) -> dict:
    """Cyclic-order shadow of the rotation of the accessible 4-cycle of ``g``.

    The marked points ``q1..q4`` lie on the outer loop of the chain of three
    circles; sorting them by angle about the middle centre gives their
    counterclockwise order.  The result records by how many positions ``g``
    advances each point.
    """
    names = ["q1", "q2", "q3", "q4"]
    pts = {n: g.marked[n] for n in names}
    xy = {n: g.position(np.array([p.i]), np.array([p.t]))[0] for n, p in pts.items()}
    order = sorted(names, key=lambda n: math.atan2(xy[n][1], xy[n][0]) % (2 * math.pi))
    pos = {n: order.index(n) for n in names}
    steps = []
    for n in names:
        img = g(pts[n])
        m = next(k for k in names if g.same(img, pts[k]))
        steps.append((pos[m] - pos[n]) % 4)
    return {"order": order, "steps": steps, "advance": steps[0] if len(set(steps)) == 1 else None}


def min_displacement(g, n: int = 100_000) -> float:
    """Smallest Euclidean distance between ``x`` and ``g(x)`` over a uniform grid.

    Euclidean distance in the plane is a lower bound for the intrinsic
    distance along the circles.
    """
    per = int(math.ceil(n / g.k))
    t = (np.arange(per) + 0.5) / per
    best = math.inf
    for i in range(g.k):
        idx = np.full(per, i)
        j, s = g.eval_many(idx, t)
        d = np.linalg.norm(g.position(idx, t) - g.position(j, s), axis=1)
        best = min(best, float(d.min()))
    return best


# ---------------------------------------------------------------- output

GRAY = {BAND: 0, C2: 255, C0: 80, C1: 160, UNKNOWN: 224}


def basin_image(bg: BasinGrid, outer: int = C2) -> np.ndarray:
    """8-bit gray image: band black, outer basin white, inner basins mid grays."""
    img = np.full(bg.labels.shape, GRAY[UNKNOWN], dtype=np.uint8)
    img[bg.labels == BAND] = GRAY[BAND]
    for c in bg.regions:
        img[bg.labels == c] = 255 if c == outer else GRAY[c if c != C2 else C1]
    return img


def write_pgm(path, img: np.ndarray) -> None:
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def write_png(path, img: np.ndarray) -> None:
    """Grayscale PNG via zlib."""
    h, w = img.shape
    raw = b"".join(b"\x00" + row.tobytes() for row in np.ascontiguousarray(img, dtype=np.uint8))

    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)))
        fh.write(chunk(b"IDAT", zlib.compress(raw, 6)))
        fh.write(chunk(b"IEND", b""))


def write_report(path, report: dict) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
