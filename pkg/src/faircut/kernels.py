"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly, unless ``FAIRCUT_PURE=1``
is set. Exact (rational) max-flow always goes through the Python kernel.
"""

import math
import os
from fractions import Fraction

import numpy as np

from . import _kernels_py

BACKEND = "python"
_dinic_float = _kernels_py.dinic
sweep_profile = _kernels_py.sweep_profile

if os.environ.get("FAIRCUT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core
    except ImportError:  # pragma: no cover - depends on the build
        _core = None
    if _core is not None:
        BACKEND = "cython"
        _dinic_float = _core.dinic
        sweep_profile = _core.sweep_profile


def dinic_int(n, eu, ev, cap_f, cap_b, s, t):
    """Max-flow over Python integers, exact by construction."""
    return _kernels_py.dinic(n, list(eu), list(ev), list(cap_f), list(cap_b), s, t, 0)


def _exact_dinic(n, eu, ev, cap_f, cap_b, s, t):
    # Rescale rationals by their common denominator so the kernel runs on ints.
    fs = [Fraction(x) for x in cap_f]
    bs = [Fraction(x) for x in cap_b]
    den = 1
    for x in fs + bs:
        den = math.lcm(den, x.denominator)
    fi = [x.numerator * (den // x.denominator) for x in fs]
    bi = [x.numerator * (den // x.denominator) for x in bs]
    value, flow, reach = _kernels_py.dinic(n, list(eu), list(ev), fi, bi, s, t, 0)
    return Fraction(value, den), [Fraction(x, den) for x in flow], reach


def dinic(n, eu, ev, cap_f, cap_b, s, t, tol=0.0, exact=False):
    if exact:
        return _exact_dinic(n, eu, ev, cap_f, cap_b, s, t)
    value, flow, reach = _dinic_float(n, eu, ev, cap_f, cap_b, s, t, tol)
    return float(value), np.asarray(flow, dtype=float), np.asarray(reach, dtype=bool)
