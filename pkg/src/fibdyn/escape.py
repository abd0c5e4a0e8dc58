"""Escape radii, escape/trapping regions, bounded-orbit classification, nesting probes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import ParamContext, Point2, Status
from .errors import ConstraintViolated
from .rng import SplitMix64

MARGIN = 0.05
DEFAULT_BUDGET = 1000


@dataclass(frozen=True)
class EscapeRadii:
    c: complex
    R0: float
    d_back: float
    R1: float
    d_trap: float
    R2: float

    def check(self) -> None:
        ac = abs(self.c)
        d = self.d_back
        ok = (
            self.R0 >= max(2.0, math.sqrt(2 * ac))
            and ac < self.R1 * (d - 1) / d**2 < self.R1 / 2
            and self.R1 > d
            and self.R2 == self.d_trap * self.R1
        )
        if not ok:
            raise ConstraintViolated(f"escape radii fail their defining inequalities: {self}")


def escape_radii(c, margin: float = MARGIN) -> EscapeRadii:
    c = complex(c)
    ac = abs(c)
    d = 2.0 * (ac + 1.0)
    R0 = max(2.0, math.sqrt(2.0 * ac)) * (1.0 + margin)
    R1 = (1.0 + margin) * max(d, ac * d * d / (d - 1.0))
    d_trap = 2.0 + ac
    radii = EscapeRadii(c, R0, d, R1, d_trap, d_trap * R1)
    radii.check()
    return radii


@dataclass(frozen=True)
class RegionVerdict:
    R: float
    in_VR: bool
    in_FR: bool
    in_GR: bool
    in_DR: bool


def region_membership(R: float, z) -> RegionVerdict:
    if R <= 0:
        raise ValueError("R must be positive")
    ax, ay = abs(z[0]), abs(z[1])
    mn, mx = min(ax, ay), max(ax, ay)
    in_FR = 0 < mn < 1.0 / R and mx > R
    return RegionVerdict(R, mn > R, in_FR, in_FR or z[1] == 0, mx <= R)


@dataclass(frozen=True)
class Outcome:
    status: Status
    index: int | None = None

    @property
    def bounded(self) -> bool:
        return self.status is Status.BOUNDED


def _sq(v) -> float:
    v = complex(v)
    return v.real * v.real + v.imag * v.imag


def _finite(v) -> bool:
    v = complex(v)
    return math.isfinite(v.real) and math.isfinite(v.imag)


def classify_forward(ctx: ParamContext, z, R: float | None = None, budget: int = DEFAULT_BUDGET) -> Outcome:
    """Escaped(n) for the first n <= budget with f^n(z) in V_R; Bounded otherwise.

    ``R`` defaults to the margin-scaled R0 of :func:`escape_radii`.
    """
    if R is None:
        R = escape_radii(ctx.c).R0
    R2 = R * R
    c = complex(ctx.c)
    x, y = complex(z[0]), complex(z[1])
    for n in range(budget + 1):
        if not (_finite(x) and _finite(y)) or (_sq(x) > R2 and _sq(y) > R2):
            return Outcome(Status.ESCAPED, n)
        if n == budget:
            break
        x, y = _cmul(x, y, c), x
    return Outcome(Status.BOUNDED)


def _cmul(x: complex, y: complex, c: complex) -> complex:
    # written out so scalar and batch paths round identically
    return complex(x.real * y.real - x.imag * y.imag + c.real, x.real * y.imag + x.imag * y.real + c.imag)


def _cinv(x: complex, y: complex, c: complex) -> complex:
    nr, ni = x.real - c.real, x.imag - c.imag
    d = y.real * y.real + y.imag * y.imag
    return complex((nr * y.real + ni * y.imag) / d, (ni * y.real - nr * y.imag) / d)


def classify_backward(ctx: ParamContext, z, radii: EscapeRadii | None = None, budget: int = DEFAULT_BUDGET,
                      R: float | None = None) -> Outcome:
    """Escaped(n) for the first n <= budget with f^-n(z) in G_R (R defaults to radii.R1)."""
    if R is None:
        R = (radii or escape_radii(ctx.c)).R1
    R2 = R * R
    iR2 = (1.0 / R) * (1.0 / R)
    c = complex(ctx.c)
    x, y = complex(z[0]), complex(z[1])
    with np.errstate(all="ignore"):
        for n in range(budget + 1):
            mx, my = _sq(x), _sq(y)
            mn, mxn = min(mx, my), max(mx, my)
            if not (_finite(x) and _finite(y)) or y == 0 or (0.0 < mn < iR2 and mxn > R2):
                return Outcome(Status.ESCAPED, n)
            if n == budget:
                break
            try:
                x, y = y, _cinv(x, y, c)
            except (ZeroDivisionError, OverflowError):  # pragma: no cover - y == 0 caught above
                return Outcome(Status.INVERSE_UNDEFINED, n)
    return Outcome(Status.BOUNDED)


def tail_growth_ok(R: float, trace_points, exit_index: int, steps: int = 3) -> bool:
    """Check ||f^(k+n)(z)|| >= (R/2)^F_n for n = 1..steps after entering V_R at k."""
    from .core import fib

    pts = trace_points[exit_index:]
    for n in range(1, min(steps, len(pts) - 1) + 1):
        bound = (R / 2.0) ** fib(n)
        if Point2(*pts[n]).norm() < bound:
            return False
    return True


# --- sampling helpers --------------------------------------------------------

def sample_polydisk(ctx: ParamContext, R: float, count: int, seed: int, stream: int = 0,
                    complex_plane: bool | None = None) -> tuple[np.ndarray, ...]:
    """Uniform points in D_R: the real square when ctx is real (default), the complex polydisk otherwise.

    Complex discs are filled by rejection from their bounding squares; the
    acceptance ratio is pi/4 per coordinate, so draws are taken in rounds of
    a fixed size until ``count`` points are accepted.
    """
    if complex_plane is None:
        complex_plane = not ctx.is_real
    gen = SplitMix64(seed, stream)
    if not complex_plane:
        pts = gen.uniform_box([-R, -R], [R, R], 0, count)
        zeros = np.zeros(count)
        return pts[:, 0], zeros, pts[:, 1], zeros.copy()
    out = np.empty((0, 4))
    start = 0
    while out.shape[0] < count:
        batch = max(64, 2 * (count - out.shape[0]))
        p = gen.uniform_box([-R] * 4, [R] * 4, start, batch)
        start += batch
        ok = (p[:, 0] ** 2 + p[:, 1] ** 2 <= R * R) & (p[:, 2] ** 2 + p[:, 3] ** 2 <= R * R)
        out = np.vstack([out, p[ok]])
    out = out[:count]
    return out[:, 0], out[:, 1], out[:, 2], out[:, 3]


@dataclass
class NestingReport:
    direction: str
    c: complex
    R: float
    n_max: int
    samples: int
    violations: list = field(default_factory=list)
    survivors: list = field(default_factory=list)  # count of points with prefix length >= n, n = 0..n_max

    @property
    def ok(self) -> bool:
        return not self.violations


def nested_levels(ctx: ParamContext, R: float, n_max: int, xr, xi, yr, yi, backward: bool = False):
    """Membership table m[k, i] = [f^(+-k)(z_i) in D_R] for k = 0..n_max.

    Backward uses the inverse branch; a dead branch counts as leaving D_R.
    """
    c = complex(ctx.c)
    xr, xi, yr, yi = (np.array(a, dtype=np.float64) for a in (xr, xi, yr, yi))
    member = np.zeros((n_max + 1, xr.size), dtype=bool)
    R2 = R * R
    with np.errstate(all="ignore"):
        for k in range(n_max + 1):
            mx = xr * xr + xi * xi
            my = yr * yr + yi * yi
            member[k] = (mx <= R2) & (my <= R2)
            if k == n_max:
                break
            if backward:
                nr, ni = xr - c.real, xi - c.imag
                d = yr * yr + yi * yi
                vr = np.where(d > 0, (nr * yr + ni * yi) / d, np.nan)
                vi = np.where(d > 0, (ni * yr - nr * yi) / d, np.nan)
                xr, xi, yr, yi = yr, yi, vr, vi
            else:
                ur = xr * yr - xi * yi + c.real
                ui = xr * yi + xi * yr + c.imag
                xr, xi, yr, yi = ur, ui, xr, xi
    return member


def prefix_length(member: np.ndarray) -> np.ndarray:
    """Largest n with member[k] true for all k <= n (-1 when member[0] is false)."""
    out = np.cumprod(member, axis=0).sum(axis=0) - 1
    return out


def _nested_probe(ctx, R, n_max, sample_count, seed, backward, complex_plane=True) -> NestingReport:
    radii = escape_radii(ctx.c)
    if R is None:
        R = radii.R2 * (1.0 + MARGIN)
    report = NestingReport("backward" if backward else "forward", ctx.c, R, n_max, sample_count)
    if sample_count == 0:
        return report
    xr, xi, yr, yi = sample_polydisk(ctx, R, sample_count, seed, stream=2 if backward else 1,
                                     complex_plane=complex_plane)
    member = nested_levels(ctx, R, n_max, xr, xi, yr, yi, backward=backward)
    # nesting: f^(n+1)(z) in D must imply f^n(z) in D
    bad = member[1:] & ~member[:-1]
    for k, i in zip(*np.nonzero(bad)):
        z = Point2(complex(xr[i], xi[i]), complex(yr[i], yi[i]))
        report.violations.append((z, int(k)))
    plen = prefix_length(member)
    report.survivors = [int((plen >= n).sum()) for n in range(n_max + 1)]
    return report


def nested_forward_probe(ctx: ParamContext, R: float | None = None, n_max: int = 8,
                         sample_count: int = 10_000, seed: int = 0, complex_plane: bool = True) -> NestingReport:
    """Sample D_R and look for points in D & f^-(n+1)(D) but not in D & f^-n(D)."""
    return _nested_probe(ctx, R, n_max, sample_count, seed, False, complex_plane)


def nested_backward_probe(ctx: ParamContext, R: float | None = None, n_max: int = 8,
                          sample_count: int = 10_000, seed: int = 0, complex_plane: bool = True) -> NestingReport:
    """Mirror of :func:`nested_forward_probe` along the inverse branch."""
    return _nested_probe(ctx, R, n_max, sample_count, seed, True, complex_plane)


@dataclass
class CompactnessReport:
    c: complex
    R: float
    samples: int
    hits: int
    lo: tuple  # per real coordinate (xr, xi, yr, yi)
    hi: tuple
    max_norm: float

    @property
    def ok(self) -> bool:
        return self.max_norm <= self.R**3


def periodic_anchors(ctx: ParamContext) -> list[Point2]:
    """Fixed points and the 3-cycle; these belong to K for every c."""
    a1, a2 = ctx.fixed_coords()
    c = ctx.c.real if ctx.is_real else ctx.c
    return [Point2(a1, a1), Point2(a2, a2), Point2(-1.0, -1.0), Point2(1 + c, -1.0), Point2(-1.0, 1 + c)]


def compactness_probe(ctx: ParamContext, budget: int = DEFAULT_BUDGET, sample_count: int = 10_000,
                      seed: int = 0, radius: float | None = None, workers: int = 1) -> CompactnessReport:
    """Bounding box of sampled points that stay bounded both ways.

    Samples are drawn from D_radius (default 2 R^3, so the region beyond
    D_{R^3} is actually probed) and the periodic anchors are always included.
    """
    radii = escape_radii(ctx.c)
    R = radii.R2 * (1.0 + MARGIN)
    if radius is None:
        radius = 2.0 * R**3
    xr, xi, yr, yi = sample_polydisk(ctx, radius, sample_count, seed, stream=3)
    anchors = periodic_anchors(ctx)
    xr = np.concatenate([xr, [complex(p.x).real for p in anchors]])
    xi = np.concatenate([xi, [complex(p.x).imag for p in anchors]])
    yr = np.concatenate([yr, [complex(p.y).real for p in anchors]])
    yi = np.concatenate([yi, [complex(p.y).imag for p in anchors]])
    fwd = kernels.forward_escape(xr, xi, yr, yi, ctx.c, radii.R0, budget, workers=workers)
    bidx, _ = kernels.backward_escape(xr, xi, yr, yi, ctx.c, radii.R1, budget, workers=workers)
    k = (fwd < 0) & (bidx < 0)
    cols = np.stack([xr[k], xi[k], yr[k], yi[k]], axis=1)
    if cols.shape[0] == 0:
        return CompactnessReport(ctx.c, R, sample_count, 0, (), (), 0.0)
    mods = np.maximum(np.hypot(cols[:, 0], cols[:, 1]), np.hypot(cols[:, 2], cols[:, 3]))
    return CompactnessReport(ctx.c, R, sample_count, int(k.sum()), tuple(cols.min(axis=0)),
                             tuple(cols.max(axis=0)), float(mods.max()))
