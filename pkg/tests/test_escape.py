import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibdyn import kernels
from fibdyn.core import ParamContext, Status
from fibdyn.escape import (
    classify_backward,
    classify_forward,
    compactness_probe,
    escape_radii,
    nested_backward_probe,
    nested_forward_probe,
    prefix_length,
    region_membership,
    tail_growth_ok,
)


def test_radii_examples():
    r = escape_radii(0)
    assert r.R0 == pytest.approx(2.1) and r.d_back == 2
    assert r.R1 == pytest.approx(2.1) and r.R2 == pytest.approx(4.2)
    assert escape_radii(8).R0 == pytest.approx(4 * 1.05)
    r = escape_radii(0.2)
    assert (r.R1, r.R2) == (pytest.approx(2.52), pytest.approx(5.544))


@given(st.complex_numbers(max_magnitude=100))
def test_radii_constraints_hold(c):
    r = escape_radii(c)
    d = r.d_back
    assert r.R0 >= max(2, math.sqrt(2 * abs(c)))
    assert abs(c) < r.R1 * (d - 1) / d**2 < r.R1 / 2
    assert r.R2 == pytest.approx((2 + abs(c)) * r.R1)


def test_region_membership():
    v = region_membership(2, (3, 3))
    assert v.in_VR and not v.in_DR
    v = region_membership(2, (5, 0.1))
    assert v.in_FR and v.in_GR
    v = region_membership(2, (5, 0))
    assert v.in_GR and not v.in_FR
    assert not region_membership(2, (2, 3)).in_VR  # strict
    with pytest.raises(ValueError):
        region_membership(0, (1, 1))


@given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_region_membership_invariants(x, y):
    v = region_membership(2.0, (x, y))
    assert v.in_GR == (v.in_FR or y == 0)
    assert not (v.in_VR and v.in_DR)


def test_classify_forward_examples():
    ctx = ParamContext(0)
    assert classify_forward(ctx, (3, 3), R=2.5) == classify_forward(ctx, (3, 3), R=2.5)
    assert classify_forward(ctx, (3, 3), R=2.5).index == 0
    assert classify_forward(ctx, (0, 0), budget=10_000).bounded
    assert classify_forward(ParamContext(0.2), (0.3, 0.3), budget=1000).bounded


def test_classify_backward_examples():
    ctx = ParamContext(0.2)
    a2 = ctx.fixed_coords()[1]
    # the rounded theta drifts off under the inverse branch (expansion ~1.78
    # per step), so only a budget below the drift horizon is meaningful
    assert classify_backward(ctx, (a2, a2), budget=40).bounded
    assert classify_backward(ParamContext(0), (1.0, 1.0), budget=10_000).bounded
    assert classify_backward(ctx, (-1.0, -1.0), budget=10_000).bounded
    out = classify_backward(ctx, (5, 0))
    assert out.status is Status.ESCAPED and out.index == 0
    out = classify_backward(ParamContext(0), (0.1, 100), R=2.1)
    assert out.status is Status.ESCAPED and out.index <= 5


def test_escape_is_final():
    # once in V_R the orbit never comes back: later radii only grow
    ctx = ParamContext(0.2)
    R = escape_radii(0.2).R0
    rng = np.random.default_rng(3)
    for x, y in rng.uniform(-4, 4, (200, 2)):
        out = classify_forward(ctx, (x, y), budget=200)
        if out.status is Status.ESCAPED:
            pts = [(x, y)]
            for _ in range(out.index + 4):
                x, y = x * y + 0.2, x
                pts.append((x, y))
            k = out.index
            assert all(min(abs(a), abs(b)) > R for a, b in pts[k:])
            assert tail_growth_ok(R, pts, k)


@pytest.mark.parametrize("c", [0, 0.2, -0.6, 0.1 + 0.3j])
def test_scalar_matches_batch(c):
    ctx = ParamContext(c)
    r = escape_radii(c)
    rng = np.random.default_rng(7)
    xr, xi, yr, yi = rng.uniform(-3, 3, (4, 400))
    if complex(c).imag == 0:
        xi[:200] = yi[:200] = 0
    fwd = kernels.forward_escape(xr, xi, yr, yi, c, r.R0, 300)
    bwd, _ = kernels.backward_escape(xr, xi, yr, yi, c, r.R1, 300)
    for i in range(xr.size):
        z = (complex(xr[i], xi[i]), complex(yr[i], yi[i]))
        f = classify_forward(ctx, z, budget=300)
        b = classify_backward(ctx, z, r, budget=300)
        assert (f.index if f.index is not None else -1) == fwd[i]
        assert (b.index if b.index is not None else -1) == bwd[i]


def test_prefix_length():
    m = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1]], dtype=bool)
    assert prefix_length(m).tolist() == [1, 0, -1]


@pytest.mark.parametrize("probe", [nested_forward_probe, nested_backward_probe])
def test_nested_probe_empty(probe):
    rep = probe(ParamContext(0.2), sample_count=0)
    assert rep.ok and rep.survivors == []


def test_nested_probe_survivors_decrease():
    ctx = ParamContext(0.2)
    rep = nested_forward_probe(ctx, n_max=4, sample_count=500, seed=1)
    assert rep.ok and rep.survivors[0] == 500
    assert all(a >= b for a, b in zip(rep.survivors, rep.survivors[1:]))


def test_compactness_small():
    ctx = ParamContext(0.2)
    rep = compactness_probe(ctx, sample_count=500)
    assert rep.hits >= 4  # alpha and the 3-cycle; rounded theta drifts backward
    assert rep.ok
