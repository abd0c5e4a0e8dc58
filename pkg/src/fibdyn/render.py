"""Pixel-grid classification and PPM / CSV / JSON encoders."""
from __future__ import annotations

import io
import json
import math
import re
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .core import ParamContext
from .errors import InvalidSpec, UnsupportedFormat
from .escape import escape_radii, nested_levels, prefix_length
from .partition.limits import classify_limit_grid

MODES = ("kplus-real", "kminus-real", "kplus-complex-slice", "nested", "limit-classes")

BOUNDED = 0
LIMIT_BASE = 50  # + ALPHA/THETA/CYCLE3/ESCAPE/UNDECIDED
OUTSIDE = 59
NESTED_BASE = 60  # + deepest m with z in D, f(z) in D, ..., f^m(z) in D


def escape_bucket(n: np.ndarray) -> np.ndarray:
    """1 + floor(log2(n + 1)) for escape index n >= 0."""
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape, dtype=np.int64)
    m = n >= 0
    out[m] = 1 + np.floor(np.log2(n[m] + 1.0)).astype(np.int64)
    return out


@dataclass(frozen=True)
class RasterSpec:
    mode: str
    c: complex
    window: tuple[float, float, float, float]  # x0, x1, y0, y1
    width: int
    height: int
    budget: int = 1000
    y0: complex = 0.33  # slice height for kplus-complex-slice
    n: int = 0  # depth for nested
    seed: int = 0
    tol: float = 1e-6  # limit-classes target tolerance

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidSpec(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.width < 1 or self.height < 1:
            raise InvalidSpec(f"size must be at least 1x1, got {self.width}x{self.height}")
        x0, x1, y0, y1 = self.window
        if not (x0 < x1 and y0 < y1) or not all(math.isfinite(v) for v in self.window):
            raise InvalidSpec(f"empty window {self.window}")
        if self.budget < 0 or self.n < 0:
            raise InvalidSpec("budget and n must be non-negative")
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "y0", complex(self.y0))

    def to_json(self) -> dict:
        d = asdict(self)
        d["c"] = [self.c.real, self.c.imag]
        d["y0"] = [self.y0.real, self.y0.imag]
        d["window"] = list(self.window)
        return d


def parse_mode(text: str) -> tuple[str, dict]:
    """'nested(2)', 'nested:2', 'kplus-complex-slice(0.33)' and plain names."""
    m = re.fullmatch(r"([a-z\-]+)(?:[(:]([^)]*)\)?)?", text.strip())
    if not m or m.group(1) not in MODES:
        raise InvalidSpec(f"unknown mode {text!r}")
    name, arg = m.group(1), m.group(2)
    extra = {}
    if arg:
        try:
            if name == "nested":
                extra["n"] = int(arg)
            elif name == "kplus-complex-slice":
                extra["y0"] = parse_complex(arg)
            else:
                raise InvalidSpec(f"mode {name} takes no argument")
        except ValueError as exc:
            raise InvalidSpec(f"bad mode argument in {text!r}: {exc}") from None
    return name, extra


def parse_complex(text: str) -> complex:
    parts = [p for p in str(text).split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"expected re[,im], got {text!r}")


def pixel_centers(spec: RasterSpec) -> tuple[np.ndarray, np.ndarray]:
    """Row-major pixel centres; row 0 is the top (largest y)."""
    x0, x1, y0, y1 = spec.window
    xs = x0 + (np.arange(spec.width) + 0.5) * ((x1 - x0) / spec.width)
    ys = y1 - (np.arange(spec.height) + 0.5) * ((y1 - y0) / spec.height)
    X, Y = np.meshgrid(xs, ys)
    return X, Y


def _nested_codes(spec: RasterSpec, X, Y) -> np.ndarray:
    xr, yr = X.ravel(), Y.ravel()
    zeros = np.zeros_like(xr)
    member = nested_levels(ParamContext(spec.c), escape_radii(spec.c).R2, spec.n, xr, zeros, yr, zeros)
    plen = prefix_length(member)
    return np.where(plen < 0, OUTSIDE, NESTED_BASE + plen)


def rasterize(spec: RasterSpec, workers: int = 1) -> np.ndarray:
    """Grid (height x width) of class codes; identical for any ``workers``."""
    X, Y = pixel_centers(spec)
    shape = X.shape
    xr, yr = X.ravel(), Y.ravel()
    zeros = np.zeros_like(xr)
    c = spec.c
    if spec.mode == "kplus-real":
        n = kernels.forward_escape(xr, zeros, yr, zeros, c, escape_radii(c).R0, spec.budget, workers=workers)
        codes = escape_bucket(n)
    elif spec.mode == "kminus-real":
        n, _ = kernels.backward_escape(xr, zeros, yr, zeros, c, escape_radii(c).R1, spec.budget, workers=workers)
        codes = escape_bucket(n)
    elif spec.mode == "kplus-complex-slice":
        # the viewing plane is the complex x-plane at y = y0
        ones = np.ones_like(xr)
        n = kernels.forward_escape(xr, yr, spec.y0.real * ones, spec.y0.imag * ones, c,
                                   escape_radii(c).R0, spec.budget, workers=workers)
        codes = escape_bucket(n)
    elif spec.mode == "nested":
        codes = _nested_codes(spec, X, Y)
    else:
        if c.imag != 0:
            raise InvalidSpec("limit-classes needs a real parameter")
        code, _, _ = classify_limit_grid(ParamContext(c), xr, yr, spec.budget, spec.tol, workers=workers)
        codes = LIMIT_BASE + code.astype(np.int64)
    return np.asarray(codes, dtype=np.int64).reshape(shape)


def default_palette() -> dict[int, tuple[int, int, int]]:
    pal = {BOUNDED: (0, 0, 0)}
    for b in range(1, 40):
        t = min(1.0, (b - 1) / 12.0)
        pal[b] = (int(255 * (1 - t)), int(230 * (1 - t) + 40 * t), int(120 + 135 * t))
    pal.update({
        LIMIT_BASE + kernels.ALPHA: (0, 0, 255),
        LIMIT_BASE + kernels.THETA: (255, 0, 0),
        LIMIT_BASE + kernels.CYCLE3: (0, 200, 0),
        LIMIT_BASE + kernels.ESCAPE: (255, 255, 255),
        LIMIT_BASE + kernels.UNDECIDED: (255, 0, 255),
        OUTSIDE: (255, 255, 255),
    })
    for k in range(0, 40):
        g = max(0, 200 - 40 * k)
        pal[NESTED_BASE + k] = (g, g, 255 if k == 0 else max(80, 255 - 35 * k))
    return pal


CODE_NAMES = {
    "Bounded": BOUNDED,
    "Alpha": LIMIT_BASE + kernels.ALPHA,
    "Theta": LIMIT_BASE + kernels.THETA,
    "Cycle3": LIMIT_BASE + kernels.CYCLE3,
    "Escape": LIMIT_BASE + kernels.ESCAPE,
    "Undecided": LIMIT_BASE + kernels.UNDECIDED,
    "Outside": OUTSIDE,
}


def _palette_lut(palette) -> np.ndarray:
    # keys may be codes or the names above; unknown codes render grey
    pal = {CODE_NAMES[k] if isinstance(k, str) else int(k): v for k, v in palette.items()}
    lut = np.full((max(pal) + 1, 3), 128, dtype=np.uint8)
    for k, rgb in pal.items():
        lut[k] = rgb
    return lut


def histogram(grid: np.ndarray) -> dict[int, int]:
    vals, counts = np.unique(np.asarray(grid), return_counts=True)
    return {int(v): int(n) for v, n in zip(vals, counts)}


def encode_output(grid, fmt: str = "ppm", palette=None, spec: RasterSpec | None = None) -> bytes:
    """Encode a code grid as binary P6, ``row,col,code`` lines, or JSON metadata."""
    grid = np.asarray(grid)
    if grid.ndim != 2 or grid.size == 0:
        raise InvalidSpec("grid must be a nonempty 2-D array")
    if fmt == "ppm":
        lut = _palette_lut(palette or default_palette())
        if grid.min() < 0 or grid.max() >= lut.shape[0]:
            raise InvalidSpec("grid has codes outside the palette")
        h, w = grid.shape
        return f"P6 {w} {h} 255\n".encode("ascii") + lut[grid].tobytes()
    if fmt == "csv":
        buf = io.StringIO()
        for (r, col), v in np.ndenumerate(grid):
            buf.write(f"{r},{col},{int(v)}\n")
        return buf.getvalue().encode("ascii")
    if fmt == "json-meta":
        meta = {
            "spec": spec.to_json() if spec is not None else None,
            "histogram": {str(k): v for k, v in histogram(grid).items()},
            "codes": {
                "0": "bounded within budget",
                "1..": "escaped at index n, code 1 + floor(log2(n + 1))",
                "50..54": "limit class alpha, theta, cycle3, escape, undecided",
                "59": "outside D",
                "60+m": "z, f(z), ..., f^m(z) all in D",
            },
        }
        return (json.dumps(meta, indent=2, sort_keys=True) + "\n").encode("ascii")
    raise UnsupportedFormat(f"unsupported format {fmt!r}; use ppm, csv or json-meta")


def decode_ppm(data: bytes) -> np.ndarray:
    """(height, width, 3) uint8 array from a P6 stream written by encode_output."""
    head, _, body = data.partition(b"\n")
    magic, w, h, mx = head.split()
    if magic != b"P6" or mx != b"255":
        raise UnsupportedFormat("not an 8-bit P6 stream")
    return np.frombuffer(body, dtype=np.uint8).reshape(int(h), int(w), 3)
