"""Compiled versus pure-Python kernels on the hot loops.

Run ``python benchmarks/bench_kernels.py``; prints one timing row per kernel.
"""
import argparse
import time

import numpy as np

from wada_lab import kernels
from wada_lab import _pykernels as py
from wada_lab.families import EPS0, phi_star

try:
    from wada_lab import _ckernels as cy
except ImportError:
    cy = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n_orbit, n_points, n_poly, res):
    lift = phi_star(EPS0)
    xs, vf, vi = lift.breakpoints, lift._vf, lift._vi
    starts = np.linspace(0.0, 1.0, n_points, endpoint=False)
    rng = np.random.default_rng(0)
    px = rng.uniform(0, res - 1, n_poly)
    py_ = rng.uniform(0, res - 1, n_poly)
    return {
        f"pa_iterate n={n_orbit}": lambda m: m.pa_iterate(xs, vf, vi, 0.1, n_orbit),
        f"pa_iterate_many {n_points}x100": lambda m: m.pa_iterate_many(xs, vf, vi, starts, 100),
        f"draw_polyline {n_poly} pts": lambda m: m.draw_polyline(
            np.zeros((res, res), np.uint8), px, py_, 1),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--orbit", type=int, default=100_000)
    ap.add_argument("--points", type=int, default=2_000)
    ap.add_argument("--poly", type=int, default=20_000)
    ap.add_argument("--res", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"selected backend: {kernels.BACKEND}")
    if cy is None:
        print("compiled extension not built; timing the pure-Python kernels only")
    print(f"{'kernel':32s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, fn in cases(args.orbit, args.points, args.poly, args.res).items():
        tp = best_of(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:32s} {tp:12.4f}")
            continue
        tc = best_of(lambda: fn(cy), args.repeat)
        print(f"{name:32s} {tp:12.4f} {tc:12.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
