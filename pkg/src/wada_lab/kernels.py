"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``WADA_LAB_PURE=1`` to force the fallback (used by the benchmark and by
the equivalence tests).
"""
import os

from . import _pykernels as py

BACKEND = "python"
if os.environ.get("WADA_LAB_PURE", "") != "1":
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = py
else:
    _impl = py

pa_iterate = _impl.pa_iterate
pa_iterate_many = _impl.pa_iterate_many
draw_polyline = _impl.draw_polyline

__all__ = ["BACKEND", "pa_iterate", "pa_iterate_many", "draw_polyline", "py"]
