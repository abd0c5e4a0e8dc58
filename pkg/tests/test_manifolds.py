import csv
import io

import numpy as np
import pytest

from fibdyn.core import BETA, ParamContext
from fibdyn.errors import NotASaddle
from fibdyn.manifolds import (
    curves_to_csv,
    polyline_distance,
    saddle_frame,
    shadows_saddle,
    trace_both,
    trace_stable,
    trace_unstable,
    verify_kminus_decomposition,
    verify_kplus_decomposition,
)
from fibdyn.partition import LimitKind, classify_backward_limit_real, classify_limit_real


@pytest.fixture(scope="module")
def theta_c0():
    return saddle_frame(ParamContext(0.0), "theta")


def test_frame_theta():
    fr = saddle_frame(ParamContext(0.21), "theta")
    assert fr.period == 1
    assert fr.stable_mult == pytest.approx(-0.55692, abs=1e-5)
    assert fr.unstable_mult == pytest.approx(1.25692, abs=1e-5)
    assert max(fr.residuals()) < 1e-12


def test_frame_cycle():
    fr = saddle_frame(ParamContext(0.0), "p1")
    assert fr.period == 3
    assert sorted([fr.stable_mult, fr.unstable_mult]) == pytest.approx([2 - 5 ** 0.5, 2 + 5 ** 0.5])
    for name in ("p2", "p3"):
        other = saddle_frame(ParamContext(0.0), name)
        assert other.unstable_mult == pytest.approx(fr.unstable_mult)


def test_alpha_is_not_a_saddle():
    with pytest.raises(NotASaddle):
        saddle_frame(ParamContext(0.2), "alpha")


def test_c0_unstable_curve_follows_power_law(theta_c0):
    cv = trace_unstable(theta_c0, max_arclen=3.0)
    x, y = np.abs(cv.vertices).T
    assert len(cv.vertices) > 50
    assert np.max(np.abs(y - x ** (1 / BETA))) < 1e-9


def test_c0_stable_curve_follows_power_law(theta_c0):
    cv = trace_stable(theta_c0, max_arclen=3.0)
    x, y = np.abs(cv.vertices).T
    assert np.max(np.abs(y - x ** -BETA) / np.maximum(1, y)) < 1e-9


def test_invariance_and_classification():
    ctx = ParamContext(0.2)
    fr = saddle_frame(ctx, "theta")
    un = trace_unstable(fr, max_arclen=2.0)
    st = trace_stable(fr, max_arclen=2.0)
    assert un.invariance_residual() < 1e-4
    assert st.invariance_residual() < 1e-4
    # vertices near the base tend to theta in the matching direction
    for p in un.vertices[1:40:5]:
        assert classify_backward_limit_real(ctx, p, tol=1e-4).kind is LimitKind.THETA
    for p in st.vertices[1:40:5]:
        assert classify_limit_real(ctx, p, tol=1e-4).kind is LimitKind.THETA


def test_trace_both_and_csv():
    fr = saddle_frame(ParamContext(0.2), "p1")
    curves = trace_both(fr, "unstable", max_arclen=1.0)
    assert {cv.branch for cv in curves} == {1, -1}
    text = curves_to_csv(curves)
    lines = text.splitlines()
    assert lines[0].startswith("# c=0.2") and lines[1] == "branch,side,index,x,y"
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert len(rows) == sum(len(cv.vertices) for cv in curves)
    assert float(rows[0]["x"]) == -1.0 and rows[0]["side"] == "unstable"
    assert curves_to_csv(curves) == text


def test_polyline_distance():
    poly = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    d = polyline_distance(poly, np.array([[0.5, 0.5], [2.0, 0.5], [0.0, 0.0]]))
    assert d.tolist() == pytest.approx([0.5, 1.0, 0.0])


def test_shadows_saddle():
    ctx = ParamContext(0.2)
    _, a2 = ctx.fixed_coords()
    assert shadows_saddle(ctx, (a2, a2)) == "theta"
    assert shadows_saddle(ctx, (-1.0, -1.0)) == "cycle"
    assert shadows_saddle(ctx, (0.3, 0.3)) is None


def test_kplus_small():
    rep = verify_kplus_decomposition(ParamContext(0.2), grid_n=24, segments=20, interior_max=200)
    assert rep.ok, rep
    assert rep.boundary_theta + rep.boundary_cycle == rep.segments


def test_kminus_small():
    ctx = ParamContext(0.2)
    curves = trace_both(saddle_frame(ctx, "theta"), "unstable", max_arclen=2.0)
    rep = verify_kminus_decomposition(ctx, grid_n=32, curves=curves, anchor_stride=10)
    assert rep.anchors > 0 and rep.ok, rep
