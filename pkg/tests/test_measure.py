import csv
import io
import math

import numpy as np
import pytest

from fibdyn.core import ParamContext
from fibdyn.errors import InvalidSpec, ParameterOutOfRange
from fibdyn.measure import (
    CSV_HEADER,
    SampleBox,
    conjecture_explorer,
    estimates_to_csv,
    interior_polydisk,
    kminus_positivity_check,
    mc_measure,
    parse_box,
    polydisk_invariance_check,
)
from fibdyn.rng import SplitMix64


def test_parse_box():
    assert parse_box("real:0,1,2,3") == SampleBox("real", (0, 1, 2, 3))
    assert parse_box("polydisk:0.5").bounds == (0.5, 0, 0, 0, 0)
    assert parse_box("polydisk:0.5@1,0,1,0").bounds == (0.5, 1, 0, 1, 0)
    assert parse_box("complex:" + ",".join(["-1", "1"] * 4)).volume == 16
    for bad in ("real:1,0,0,1", "real:0,1", "cube:1", "polydisk:-1", "real:a,b,c,d"):
        with pytest.raises(InvalidSpec):
            parse_box(bad)


def test_polydisk_samples_inside():
    box = SampleBox("polydisk", (0.5, 1.0, 0.0, -1.0, 0.0))
    xr, xi, yr, yi = box.sample(SplitMix64(1, 0), 2000)
    assert np.all(np.hypot(xr - 1, xi) <= 0.5 + 1e-12)
    assert np.all(np.hypot(yr + 1, yi) <= 0.5 + 1e-12)
    assert box.volume == pytest.approx((math.pi / 4) ** 2)


def test_far_box_has_zero_measure():
    est = mc_measure(ParamContext(0), "Kplus", "real:10,11,10,11", 2000)
    assert est.value == 0 and est.stderr == 0


def test_interior_box_is_full():
    est = mc_measure(ParamContext(0.2), "Kplus", "polydisk:0.5", 2000)
    assert est.fraction == 1.0
    assert est.value == pytest.approx((math.pi * 0.25) ** 2)
    # K- is a union of curves here, so random samples miss K
    assert mc_measure(ParamContext(0.2), "K", "polydisk:0.5", 2000).hits == 0


def test_worker_and_seed_behaviour():
    ctx = ParamContext(0.2)
    kw = dict(box="complex:-1,1,-0.5,0.5,-1,1,-0.5,0.5", samples=40_000)
    one = mc_measure(ctx, "Kplus", seed=3, workers=1, **kw)
    three = mc_measure(ctx, "Kplus", seed=3, workers=3, **kw)
    assert one.hits == three.hits
    other = mc_measure(ctx, "Kplus", seed=4, workers=1, **kw)
    assert abs(other.fraction - one.fraction) < 6 * max(one.stderr / one.box.volume, 1e-3)


def test_bad_selector():
    with pytest.raises(InvalidSpec):
        mc_measure(ParamContext(0.2), "Kzero", "real:0,1,0,1", 10)
    with pytest.raises(InvalidSpec):
        mc_measure(ParamContext(0.2), "K", "real:0,1,0,1", 0)


def test_csv_output():
    rows = conjecture_explorer([0.1, -0.5], "real:-1,1,-1,1", 500)
    text = estimates_to_csv(rows, exploratory=True)
    lines = text.splitlines()
    assert lines[0].startswith("# EXPLORATORY")
    parsed = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    assert parsed[0] == CSV_HEADER
    assert len(parsed) == 5 and all(len(r) == len(CSV_HEADER) for r in parsed)
    assert parsed[1][2].startswith("real:")


def test_interior_polydisk():
    pd = interior_polydisk(0.2)
    assert pd.a == 0.5 and pd.bound_holds
    assert interior_polydisk(0.25) is None
    assert interior_polydisk(0.2j).bound_holds
    assert polydisk_invariance_check(0.2, samples=2000) == 1.0
    with pytest.raises(ParameterOutOfRange):
        polydisk_invariance_check(0.3)


def test_kminus_positivity():
    rep = kminus_positivity_check(-3.0, samples=200)
    assert rep.attracting and rep.fraction == 1.0
    assert abs(rep.product) == pytest.approx(abs(rep.product_formula), abs=1e-12)
    assert rep.steps[0] == 0  # the centre is the fixed point itself
    rep = kminus_positivity_check(-20.0, samples=100)
    assert rep.fraction == 1.0
    with pytest.raises(ParameterOutOfRange):
        kminus_positivity_check(-1.0)
