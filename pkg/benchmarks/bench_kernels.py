"""Compare the compiled and pure-Python max-flow kernels on the same inputs.

Run with ``python3 benchmarks/bench_kernels.py``. Each size is timed on both
backends; the pure kernel is imported directly so one process covers both.
"""

import argparse
import time

import numpy as np

from faircut import _kernels_py, kernels


def instance(n, m, seed):
    rng = np.random.default_rng(seed)
    eu = np.concatenate([np.arange(1, n), rng.integers(0, n, m - n + 1)])
    ev = np.concatenate([rng.integers(0, np.arange(1, n)), rng.integers(0, n, m - n + 1)])
    cap = rng.integers(1, 9, len(eu)).astype(float)
    return eu.astype(np.int64), ev.astype(np.int64), cap


def best_of(fn, repeat):
    out = None
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", default="1000,10000,100000")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if kernels.BACKEND != "cython":
        raise SystemExit("compiled extension not available (or FAIRCUT_PURE is set); nothing to compare")
    from faircut import _core

    print(f"{'m':>8} {'cython ms':>10} {'python ms':>10} {'speedup':>8}")
    for m in (int(x) for x in args.sizes.split(",")):
        n = max(4, m // 5)
        eu, ev, cap = instance(n, m, m)
        s, t = 0, n - 1
        tc, rc = best_of(lambda: _core.dinic(n, eu, ev, cap, cap, s, t, 1e-12), args.repeat)
        lu, lv, lc = eu.tolist(), ev.tolist(), cap.tolist()
        tp, rp = best_of(lambda: _kernels_py.dinic(n, lu, lv, lc, lc, s, t, 1e-12), args.repeat)
        assert abs(rc[0] - rp[0]) <= 1e-9 * max(1.0, rp[0]), "backends disagree"
        print(f"{m:>8} {tc * 1e3:>10.2f} {tp * 1e3:>10.2f} {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
