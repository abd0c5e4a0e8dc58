import hashlib
import json

import numpy as np
import pytest

from fibdyn.errors import InvalidSpec, UnsupportedFormat
from fibdyn.render import (
    LIMIT_BASE,
    NESTED_BASE,
    OUTSIDE,
    RasterSpec,
    decode_ppm,
    default_palette,
    encode_output,
    escape_bucket,
    histogram,
    parse_mode,
    pixel_centers,
    rasterize,
)
from fibdyn import kernels


def test_escape_buckets():
    assert escape_bucket(np.array([-1, 0, 1, 2, 3, 6, 7])).tolist() == [0, 1, 2, 2, 3, 3, 4]


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        RasterSpec("kplus-real", 0.2, (1, 1, 0, 1), 4, 4)
    with pytest.raises(InvalidSpec):
        RasterSpec("kplus-real", 0.2, (0, 1, 0, 1), 0, 4)
    with pytest.raises(InvalidSpec):
        RasterSpec("mandelbrot", 0.2, (0, 1, 0, 1), 4, 4)
    with pytest.raises(InvalidSpec):
        rasterize(RasterSpec("limit-classes", 0.2j, (0, 1, 0, 1), 2, 2))


def test_parse_mode():
    assert parse_mode("nested(2)") == ("nested", {"n": 2})
    assert parse_mode("nested:1") == ("nested", {"n": 1})
    assert parse_mode("kplus-complex-slice(0.33)") == ("kplus-complex-slice", {"y0": 0.33 + 0j})
    assert parse_mode("limit-classes") == ("limit-classes", {})
    for bad in ("nested(x)", "kplus-real(3)", "julia"):
        with pytest.raises(InvalidSpec):
            parse_mode(bad)


def test_pixel_centres_top_down():
    X, Y = pixel_centers(RasterSpec("kplus-real", 0, (0, 2, 0, 1), 2, 2))
    assert X[0].tolist() == [0.5, 1.5]
    assert Y[:, 0].tolist() == [0.75, 0.25]


def test_single_pixel_at_alpha():
    c = 0.2
    a1 = (1 - np.sqrt(1 - 4 * c)) / 2
    h = 1e-3
    spec = RasterSpec("limit-classes", c, (a1 - h, a1 + h, a1 - h, a1 + h), 1, 1, 1000)
    grid = rasterize(spec)
    assert grid.tolist() == [[LIMIT_BASE + kernels.ALPHA]]
    data = encode_output(grid, "ppm", {"Alpha": (0, 0, 255)})
    assert data == b"P6 1 1 255\n\x00\x00\xff"


def test_slice_has_bounded_points():
    spec = RasterSpec("kplus-complex-slice", 0.2, (-2, 2, -2, 2), 48, 48, 500, y0=0.33)
    grid = rasterize(spec)
    assert (grid == 0).sum() > 0 and (grid > 0).sum() > 0


def test_nested_codes():
    spec = RasterSpec("nested", 0.3, (-8, 8, -8, 8), 64, 64, n=2)
    grid = rasterize(spec)
    codes = set(np.unique(grid))
    assert OUTSIDE in codes  # window is larger than D
    assert codes <= {OUTSIDE, NESTED_BASE, NESTED_BASE + 1, NESTED_BASE + 2}
    assert NESTED_BASE + 2 in codes


def test_kminus_mode_matches_kernel():
    spec = RasterSpec("kminus-real", 0.2, (-2, 2, -2, 2), 16, 16, 200)
    grid = rasterize(spec)
    X, Y = pixel_centers(spec)
    z = np.zeros(X.size)
    n, _ = kernels.backward_escape(X.ravel(), z, Y.ravel(), z, 0.2, 2.52, 200)
    assert np.array_equal(grid.ravel(), escape_bucket(n))


@pytest.mark.parametrize("mode,extra", [("kplus-real", {}), ("kminus-real", {}), ("nested", {"n": 3}),
                                        ("limit-classes", {}), ("kplus-complex-slice", {})])
def test_worker_invariance(mode, extra):
    spec = RasterSpec(mode, 0.22, (-2, 2, -2, 2), 40, 30, 800, **extra)
    ref = encode_output(rasterize(spec, workers=1))
    for w in (2, 5):
        assert encode_output(rasterize(spec, workers=w)) == ref


def test_ppm_csv_agree():
    spec = RasterSpec("kplus-real", 0.2, (-2, 2, -2, 2), 13, 7, 300)
    grid = rasterize(spec)
    rgb = decode_ppm(encode_output(grid, "ppm"))
    assert rgb.shape == (7, 13, 3)
    pal = default_palette()
    rows = encode_output(grid, "csv").decode().splitlines()
    assert len(rows) == 13 * 7
    for line in rows:
        r, c, code = map(int, line.split(","))
        assert tuple(rgb[r, c]) == pal[code]


def test_csv_two_lines():
    assert encode_output(np.array([[0, 3]]), "csv") == b"0,0,0\n0,1,3\n"


def test_json_meta():
    spec = RasterSpec("kplus-real", 0.2, (-2, 2, -2, 2), 10, 10, 100)
    grid = rasterize(spec)
    meta = json.loads(encode_output(grid, "json-meta", spec=spec))
    assert sum(meta["histogram"].values()) == 100
    assert meta["spec"]["mode"] == "kplus-real" and meta["spec"]["c"] == [0.2, 0.0]
    assert histogram(grid) == {int(k): v for k, v in meta["histogram"].items()}


def test_bad_format_and_grid():
    with pytest.raises(UnsupportedFormat):
        encode_output(np.zeros((2, 2), dtype=int), "png")
    with pytest.raises(InvalidSpec):
        encode_output(np.zeros((0, 2), dtype=int), "ppm")


def test_ppm_golden_digest():
    # small regression image; update only with a deliberate change of the encoder or classifier
    spec = RasterSpec("kplus-real", 0.2, (-2, 2, -2, 2), 32, 32, 200)
    data = encode_output(rasterize(spec))
    assert len(data) == len(b"P6 32 32 255\n") + 32 * 32 * 3
    assert hashlib.sha256(data).hexdigest() == GOLDEN


GOLDEN = "0ed035142f6a45460795b38190734e56e837eefc691bea8518792ffe9b7c46fd"
