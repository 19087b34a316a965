import numpy as np
import pytest

from faircut import _kernels_py, kernels


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled backend not built")
def test_backends_agree(rng):
    from faircut import _core
    for _ in range(60):
        n = int(rng.integers(2, 40))
        m = int(rng.integers(1, 4 * n))
        eu = rng.integers(0, n, m)
        ev = rng.integers(0, n, m)
        cap = rng.uniform(0.5, 10, m)
        s, t = 0, n - 1
        a = _core.dinic(n, eu, ev, cap, cap, s, t, 1e-12)
        b = _kernels_py.dinic(n, eu.tolist(), ev.tolist(), cap.tolist(), cap.tolist(), s, t, 1e-12)
        assert a[0] == pytest.approx(b[0], rel=1e-9)
        assert list(np.asarray(a[2], bool)) == list(np.asarray(b[2], bool))


def test_integer_kernel_is_exact():
    big = 10 ** 30
    val, flow, reach = kernels.dinic_int(3, [0, 1], [1, 2], [big + 1, big], [big + 1, big], 0, 2)
    assert val == big
    assert reach[0] and reach[1] and not reach[2]


def _naive_profile(phi, eu, ev, cap, dem):
    vals = np.unique(phi)
    out = []
    for v in vals:
        above = phi > v
        crossing = above[eu] != above[ev]
        out.append(dem[above].sum() - cap[crossing].sum())
    return np.array(out)


@pytest.mark.parametrize("impl", ["python", "cython"])
def test_sweep_profile_matches_naive(rng, impl):
    if impl == "cython":
        if kernels.BACKEND != "cython":
            pytest.skip("compiled backend not built")
        from faircut._core import sweep_profile
    else:
        sweep_profile = _kernels_py.sweep_profile
    for _ in range(30):
        n = int(rng.integers(2, 20))
        m = int(rng.integers(1, 3 * n))
        eu = rng.integers(0, n, m)
        ev = rng.integers(0, n, m)
        cap = rng.uniform(0.1, 5, m)
        phi = rng.integers(0, 5, n).astype(float)
        dem = rng.normal(size=n)
        vals, prof = sweep_profile(phi, eu, ev, cap, dem)
        assert np.array_equal(np.asarray(vals), np.unique(phi))
        assert np.allclose(prof, _naive_profile(phi, eu, ev, cap, dem))


def test_pure_fallback_selected_by_environment():
    import os
    import subprocess
    import sys
    env = dict(os.environ, FAIRCUT_PURE="1")
    code = ("import faircut; from faircut import Graph, fair_cut; "
            "g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)]); "
            "print(faircut.BACKEND, sorted(fair_cut(g, 1, 2, 0.5)[0].side))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "[0,", "1]"]
