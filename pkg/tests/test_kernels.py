"""Compiled core against the numpy fallback, and chunking/worker invariance."""
import subprocess
import sys

import numpy as np
import pytest

from fibdyn import kernels
from fibdyn.rng import SplitMix64

compiled = pytest.importorskip("fibdyn._kernels")
py = kernels.backend("python")


def _points(n, seed, complex_=True):
    gen = SplitMix64(seed, 0)
    p = gen.uniform_box([-3] * 4, [3] * 4, 0, n)
    if not complex_:
        p[:, 1] = p[:, 3] = 0
    return p.T.copy()


@pytest.mark.parametrize("c", [0.0, 0.2, -0.6, -3.0, 0.1 + 0.3j])
def test_escape_kernels_bit_identical(c):
    xr, xi, yr, yi = _points(5000, 1, complex_=complex(c).imag != 0 or c == -0.6)
    for name, R in (("forward_escape", 2.1), ("backward_escape", 2.52)):
        a = getattr(kernels, name)(xr, xi, yr, yi, c, R, 500, impl=compiled)
        b = getattr(kernels, name)(xr, xi, yr, yi, c, R, 500, impl=py)
        if isinstance(a, tuple):
            for u, v in zip(a, b):
                assert np.array_equal(u, v, equal_nan=True)
        else:
            assert np.array_equal(a, b)


@pytest.mark.parametrize("backward", [False, True])
def test_limit_kernels_bit_identical(backward):
    c = 0.22
    s = np.sqrt(1 - 4 * c)
    a1, a2 = (1 - s) / 2, (1 + s) / 2
    x, _, y, _ = _points(4000, 2, complex_=False)
    fn = kernels.limit_backward_real if backward else kernels.limit_forward_real
    a = fn(x, y, c, a1, a2, 2000, 1e-6, impl=compiled)
    b = fn(x, y, c, a1, a2, 2000, 1e-6, impl=py)
    for u, v in zip(a, b):
        assert np.array_equal(u, v)


@pytest.mark.parametrize("workers", [2, 3, 7])
def test_worker_count_invariance(workers):
    xr, xi, yr, yi = _points(3001, 3)
    one = kernels.forward_escape(xr, xi, yr, yi, 0.2, 2.1, 300, workers=1)
    many = kernels.forward_escape(xr, xi, yr, yi, 0.2, 2.1, 300, workers=workers)
    assert np.array_equal(one, many)
    one = kernels.backward_escape(xr, xi, yr, yi, 0.2, 2.52, 300, workers=1)
    many = kernels.backward_escape(xr, xi, yr, yi, 0.2, 2.52, 300, workers=workers)
    assert all(np.array_equal(u, v, equal_nan=True) for u, v in zip(one, many))


def test_empty_and_single_inputs():
    e = np.zeros(0)
    assert kernels.forward_escape(e, e, e, e, 0.2, 2.1, 10, workers=4).size == 0
    one = np.array([3.0])
    z = np.zeros(1)
    assert kernels.forward_escape(one, z, one, z, 0.0, 2.1, 10).tolist() == [0]


def test_pure_env_selects_fallback():
    out = subprocess.run([sys.executable, "-c", "import fibdyn.kernels as k; print(k.BACKEND)"],
                         env={"FIBDYN_PURE": "1", "PATH": ""}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_lookup():
    assert kernels.backend("python") is py
    assert kernels.backend("compiled") is compiled
    with pytest.raises(ValueError):
        kernels.backend("gpu")


def test_rng_partition_invariance():
    g = SplitMix64(42, 5)
    whole = g.uniform(0, 1000)
    parts = np.concatenate([g.uniform(0, 300), g.uniform(300, 450), g.uniform(750, 250)])
    assert np.array_equal(whole, parts)
    assert np.all((whole >= 0) & (whole < 1))
    assert not np.array_equal(whole, SplitMix64(42, 6).uniform(0, 1000))
    assert not np.array_equal(whole, SplitMix64(43, 5).uniform(0, 1000))


def test_rng_uniformity():
    u = SplitMix64(0, 0).uniform(0, 100_000)
    hist, _ = np.histogram(u, bins=10, range=(0, 1))
    assert abs(u.mean() - 0.5) < 0.005
    assert hist.min() > 9500 and hist.max() < 10500
