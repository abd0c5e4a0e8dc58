"""Monte Carlo measure of K+, K- and K restricted to a box, plus the two
measure statements that can be checked directly: an invariant polydisk
inside K+ for |c| < 1/4, and an attracting fixed point of the inverse
branch for c < -2."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import ParamContext
from .errors import InvalidSpec, ParameterOutOfRange
from .escape import escape_radii
from .rng import SplitMix64
from .spectral import inverse_fixed_classification

DEFAULT_BUDGET = 1000
BATCH = 1 << 14
SETS = ("Kplus", "Kminus", "K")


@dataclass(frozen=True)
class SampleBox:
    """A sampling domain: a real rectangle, a box in C^2 = R^4, or a polydisk."""

    kind: str  # "real" | "complex" | "polydisk"
    bounds: tuple[float, ...]  # real: x0,x1,y0,y1; complex: 8 numbers; polydisk: r, xr, xi, yr, yi

    def __post_init__(self):
        n = {"real": 4, "complex": 8, "polydisk": 5}.get(self.kind)
        if n is None:
            raise InvalidSpec(f"unknown box kind {self.kind!r}")
        if len(self.bounds) != n:
            raise InvalidSpec(f"{self.kind} box needs {n} numbers, got {len(self.bounds)}")
        if self.kind == "polydisk":
            if not self.bounds[0] > 0:
                raise InvalidSpec("polydisk radius must be positive")
        elif any(lo > hi for lo, hi in zip(self.bounds[::2], self.bounds[1::2])):
            raise InvalidSpec(f"empty box {self.bounds}")

    @property
    def volume(self) -> float:
        b = self.bounds
        if self.kind == "polydisk":
            return (math.pi * b[0] ** 2) ** 2
        return math.prod(hi - lo for lo, hi in zip(b[::2], b[1::2]))

    def __str__(self):
        return f"{self.kind}:" + ",".join(repr(float(v)) for v in self.bounds)

    def sample(self, gen: SplitMix64, count: int):
        """(xr, xi, yr, yi) arrays of ``count`` uniform points."""
        b = self.bounds
        if self.kind == "real":
            p = gen.uniform_box([b[0], b[2]], [b[1], b[3]], 0, count)
            z = np.zeros(count)
            return p[:, 0], z, p[:, 1], z.copy()
        if self.kind == "complex":
            p = gen.uniform_box(b[0::2], b[1::2], 0, count)
            return p[:, 0], p[:, 1], p[:, 2], p[:, 3]
        r, cx = b[0], np.array(b[1:])
        out = np.empty((0, 4))
        start = 0
        # rejection from the bounding box; acceptance (pi/4)^2 ~ 0.62
        while out.shape[0] < count:
            m = max(64, 2 * (count - out.shape[0]))
            p = gen.uniform_box([-r] * 4, [r] * 4, start, m)
            start += m
            ok = (p[:, 0] ** 2 + p[:, 1] ** 2 <= r * r) & (p[:, 2] ** 2 + p[:, 3] ** 2 <= r * r)
            out = np.vstack([out, p[ok]])
        out = out[:count] + cx[None, :]
        return out[:, 0], out[:, 1], out[:, 2], out[:, 3]


def parse_box(text: str) -> SampleBox:
    """``real:x0,x1,y0,y1``, ``complex:<8 numbers>``, ``polydisk:r`` or
    ``polydisk:r@xr,xi,yr,yi``."""
    try:
        kind, _, rest = text.partition(":")
        if kind == "polydisk":
            r, _, centre = rest.partition("@")
            vals = [float(r)] + ([float(v) for v in centre.split(",")] if centre else [0.0] * 4)
        else:
            vals = [float(v) for v in rest.split(",")]
    except ValueError as exc:
        raise InvalidSpec(f"cannot parse box {text!r}: {exc}") from None
    return SampleBox(kind, tuple(vals))


@dataclass(frozen=True)
class MeasureEstimate:
    c: complex
    set: str
    box: SampleBox
    samples: int
    hits: int
    seed: int
    budget: int

    @property
    def fraction(self) -> float:
        return self.hits / self.samples

    @property
    def value(self) -> float:
        return self.box.volume * self.fraction

    @property
    def stderr(self) -> float:
        p = self.fraction
        return self.box.volume * math.sqrt(p * (1 - p) / self.samples)

    def csv_fields(self) -> list:
        c = self.c.real if self.c.imag == 0 else self.c
        return [repr(c), self.set, str(self.box), self.samples, self.budget, repr(self.value),
                repr(self.stderr), self.seed]


CSV_HEADER = ["c", "set", "box", "samples", "budget", "value", "stderr", "seed"]


def _hits(ctx, set_selector, box, seed, b, n, budget, radii):
    gen = SplitMix64(seed, 1000 + b)
    xr, xi, yr, yi = box.sample(gen, n)
    ok = np.ones(n, dtype=bool)
    if set_selector in ("Kplus", "K"):
        ok &= kernels.forward_escape(xr, xi, yr, yi, ctx.c, radii.R0, budget) < 0
    if set_selector in ("Kminus", "K"):
        idx, _ = kernels.backward_escape(xr, xi, yr, yi, ctx.c, radii.R1, budget)
        ok &= idx < 0
    return int(ok.sum())


def mc_measure(ctx: ParamContext, set_selector: str, box: SampleBox | str, samples: int, seed: int = 0,
               budget: int = DEFAULT_BUDGET, workers: int = 1) -> MeasureEstimate:
    """Box-restricted Lebesgue measure of K+, K- or K = K+ n K-.

    Samples are drawn in fixed batches, batch b from stream (seed, 1000 + b),
    and hit counts are summed, so the estimate does not depend on ``workers``.
    """
    if set_selector not in SETS:
        raise InvalidSpec(f"set must be one of {SETS}, got {set_selector!r}")
    if samples < 1:
        raise InvalidSpec("samples must be >= 1")
    if isinstance(box, str):
        box = parse_box(box)
    radii = escape_radii(ctx.c)
    sizes = [min(BATCH, samples - s) for s in range(0, samples, BATCH)]
    jobs = [(b, n) for b, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda j: _hits(ctx, set_selector, box, seed, j[0], j[1], budget, radii), jobs))
    else:
        hits = sum(_hits(ctx, set_selector, box, seed, b, n, budget, radii) for b, n in jobs)
    return MeasureEstimate(ctx.c, set_selector, box, samples, hits, seed, budget)


def estimates_to_csv(rows, exploratory: bool = False) -> str:
    buf = io.StringIO()
    if exploratory:
        buf.write("# EXPLORATORY: box-restricted estimates, no claim is asserted\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


# -- the invariant polydisk ------------------------------------------------------

@dataclass(frozen=True)
class InteriorPolydisk:
    c: complex
    a: float
    margin: float  # a - a^2 - |c|

    @property
    def bound_holds(self) -> bool:
        return abs(self.c) + self.a**2 < self.a


def interior_polydisk(c) -> InteriorPolydisk | None:
    """D_a with a = 1/2 maps into itself when |c| < 1/4, since
    max(|xy + c|, |x|) <= a^2 + |c| < a on D_a.  None for |c| >= 1/4."""
    m = abs(complex(c))
    if m >= 0.25:
        return None
    out = InteriorPolydisk(complex(c), 0.5, 0.25 - m)
    if not out.bound_holds:  # pragma: no cover - algebraically impossible
        raise AssertionError("invariance bound failed")
    return out


def polydisk_invariance_check(c, samples: int = 10_000, steps: int = 100, seed: int = 0) -> float:
    """Fraction of sampled points of D_a whose first ``steps`` iterates stay in D_a."""
    pd = interior_polydisk(c)
    if pd is None:
        raise ParameterOutOfRange(f"|c| = {abs(complex(c))} >= 1/4")
    box = SampleBox("polydisk", (pd.a, 0.0, 0.0, 0.0, 0.0))
    xr, xi, yr, yi = box.sample(SplitMix64(seed, 7), samples)
    x = xr + 1j * xi
    y = yr + 1j * yi
    cc = complex(c)
    inside = np.ones(samples, dtype=bool)
    for _ in range(steps):
        x, y = x * y + cc, x
        inside &= (np.abs(x) <= pd.a) & (np.abs(y) <= pd.a)
    return float(inside.mean())


# -- positivity of K- for c < -2 ---------------------------------------------------

@dataclass
class KMinusPositivity:
    c: float
    a1: float
    eigenvalues: tuple[complex, complex]
    product: complex
    product_formula: float  # -1/a1
    samples: int
    converged: int
    steps: np.ndarray

    @property
    def attracting(self) -> bool:
        return max(abs(v) for v in self.eigenvalues) < 1

    @property
    def fraction(self) -> float:
        return self.converged / self.samples


def kminus_positivity_check(c: float, samples: int = 1000, seed: int = 0, budget: int = DEFAULT_BUDGET,
                            radius: float = 0.01, tol: float = 1e-6, include_center: bool = True) -> KMinusPositivity:
    """Backward orbits from a small polydisk around (a1, a1) must converge to it.

    Convergence means max(|x - a1|, |y - a1|) < ``tol`` within ``budget``
    inverse steps.  The centre itself is sample 0 when ``include_center``.
    """
    if isinstance(c, complex):
        if c.imag != 0:
            raise ParameterOutOfRange("needs real c")
        c = c.real
    if not c < -2:
        raise ParameterOutOfRange(f"needs c < -2, got {c}")
    info = inverse_fixed_classification(c)
    a1 = info.a1
    n_rand = samples - 1 if include_center else samples
    box = SampleBox("polydisk", (radius, a1, 0.0, a1, 0.0))
    xr, xi, yr, yi = box.sample(SplitMix64(seed, 11), max(n_rand, 0))
    x = xr + 1j * xi
    y = yr + 1j * yi
    if include_center:
        x = np.concatenate([[complex(a1)], x])
        y = np.concatenate([[complex(a1)], y])
    steps = np.full(x.size, -1, dtype=np.int64)
    with np.errstate(all="ignore"):
        for n in range(budget + 1):
            d = np.maximum(np.abs(x - a1), np.abs(y - a1))
            hit = (steps < 0) & (d < tol)
            steps[hit] = n
            if np.all(steps >= 0) or n == budget:
                break
            x, y = y, (x - c) / y
    return KMinusPositivity(c, a1, info.eigenvalues, info.product, -1.0 / a1, int(x.size),
                            int(np.sum(steps >= 0)), steps)


def conjecture_explorer(c_list, box: SampleBox | str, samples: int, seed: int = 0,
                        budget: int = DEFAULT_BUDGET, workers: int = 1) -> list[MeasureEstimate]:
    """EXPLORATORY: Kplus and Kminus estimates for each c; nothing is asserted."""
    rows = []
    for c in c_list:
        ctx = ParamContext(c)
        for s in ("Kplus", "Kminus"):
            rows.append(mc_measure(ctx, s, box, samples, seed, budget, workers))
    return rows
