import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wada_lab import _pykernels as py
from wada_lab.families import EPS0, make_five_piece, phi_star

cy = pytest.importorskip("wada_lab._ckernels")

LIFTS = [phi_star(EPS0), phi_star(0.13), make_five_piece()]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, len(LIFTS) - 1), st.floats(-3, 3, allow_nan=False), st.integers(0, 500))
def test_iterate_backends_agree(i, x, n):
    f = LIFTS[i]
    args = (f.breakpoints, f._vf, f._vi, x, n)
    assert py.pa_iterate(*args) == cy.pa_iterate(*args)


def test_iterate_many_backends_agree():
    f = LIFTS[0]
    x = np.linspace(-1, 1, 501)
    rp, kp = py.pa_iterate_many(f.breakpoints, f._vf, f._vi, x, 300)
    rc, kc = cy.pa_iterate_many(f.breakpoints, f._vf, f._vi, x, 300)
    assert np.array_equal(rp, rc) and np.array_equal(kp, kc)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_draw_polyline_backends_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 60))
    px = rng.uniform(-10, 140, n)
    py_ = rng.uniform(-10, 140, n)
    a = np.zeros((128, 128), np.uint8)
    b = np.zeros((128, 128), np.uint8)
    py.draw_polyline(a, px, py_, 1)
    cy.draw_polyline(b, px, py_, 1)
    assert np.array_equal(a, b)


def test_pure_fallback_selected_by_environment():
    code = "from wada_lab import BACKEND; print(BACKEND)"
    env = dict(os.environ, WADA_LAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    env.pop("WADA_LAB_PURE")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "cython"


def test_pure_backend_gives_same_rotation_number():
    code = ("from wada_lab.rotation import rot_monotone, envelope;"
            "from wada_lab.families import phi_star, EPS0;"
            "print(repr(rot_monotone(envelope(phi_star(0.2), 'upper')).estimate))")
    outs = []
    for pure in ("1", "0"):
        env = dict(os.environ, WADA_LAB_PURE=pure)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True).stdout.strip())
    assert outs[0] == outs[1] and outs[0]
