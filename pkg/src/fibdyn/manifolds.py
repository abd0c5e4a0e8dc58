"""Eigen-frames at saddles, tracing of stable/unstable branches, and
sampling checks of the K+ / K- decompositions for 0 < c < 1/4.

Branches grow by fundamental-domain continuation: a seed segment from
base + eps0 * d to base + eps0 * mu * d is pushed forward by the period map
(or by the inverse branch for stable curves), and the parameter is bisected
wherever consecutive vertices are more than ``arc_tol`` apart.  A negative
multiplier would swap the two branches, so the doubled period map is used
in that case.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import ParamContext, Point2
from .errors import BranchDied, NotASaddle, ParameterOutOfRange
from .escape import classify_backward, escape_radii
from .partition.limits import (
    LimitKind,
    classify_backward_limit_real,
    classify_limit_grid,
    classify_limit_real,
)
from .rng import SplitMix64
from .spectral import TAU, cycle_points, period_jacobian

Y_CUTOFF = 1e-9
MAX_REFINE = 40
MAX_VERTICES = 200_000


@dataclass(frozen=True)
class SaddleFrame:
    c: float
    base: Point2
    period: int
    stable_dir: np.ndarray
    unstable_dir: np.ndarray
    stable_mult: float
    unstable_mult: float
    jacobian: np.ndarray = field(repr=False)

    def residuals(self) -> tuple[float, float]:
        """Relative eigen-residuals |J v - mu v| / |mu| for both pairs."""
        J = self.jacobian
        rs = np.linalg.norm(J @ self.stable_dir - self.stable_mult * self.stable_dir) / max(abs(self.stable_mult), 1e-300)
        ru = np.linalg.norm(J @ self.unstable_dir - self.unstable_mult * self.unstable_dir) / abs(self.unstable_mult)
        return float(rs), float(ru)


def _orbit(z, c, n):
    pts = [z]
    for _ in range(n - 1):
        x, y = pts[-1]
        pts.append((x * y + c, x))
    return pts


def _named_base(ctx: ParamContext, name: str) -> Point2:
    c = ctx.c.real
    a1, a2 = (float(v.real) for v in ctx.fixed_coords())
    p, fp, f2p = cycle_points(c)
    table = {"theta": Point2(a2, a2), "alpha": Point2(a1, a1), "p1": p, "p2": fp, "p3": f2p}
    if name not in table:
        raise ValueError(f"unknown base {name!r}; use one of {sorted(table)}")
    return table[name]


def _unit(v: np.ndarray) -> np.ndarray:
    v = np.real_if_close(v).astype(float)
    v = v / np.linalg.norm(v)
    k = next(i for i in range(v.size) if abs(v[i]) > 1e-15)
    return v if v[k] > 0 else -v


def saddle_frame(ctx: ParamContext, base) -> SaddleFrame:
    """Eigen-frame of the period map at a fixed point or 3-cycle point.

    ``base`` is a point or one of 'theta', 'alpha', 'p1', 'p2', 'p3'.
    Directions are unit vectors whose first nonzero component is positive.
    """
    if ctx.c.imag != 0:
        raise ParameterOutOfRange("saddle frames are computed for real c")
    c = ctx.c.real
    if isinstance(base, str):
        base = _named_base(ctx, base)
    base = Point2(float(base[0]), float(base[1]))
    scale = 1.0 + base.norm()
    if max(abs(base.x * base.y + c - base.x), abs(base.x - base.y)) <= 1e-12 * scale:
        period = 1
    else:
        z3 = _orbit(base, c, 4)[3]
        if max(abs(z3[0] - base.x), abs(z3[1] - base.y)) > 1e-9 * scale:
            raise NotASaddle(f"{base} is neither fixed nor of period 3 for c={c}")
        period = 3
    J = period_jacobian(_orbit(base, c, period)).real
    ev, vec = np.linalg.eig(J)
    if np.any(np.abs(np.imag(ev)) > 1e-12):
        raise NotASaddle(f"complex multipliers {ev} at {base}")
    ev = np.real(ev)
    order = np.argsort(np.abs(ev))
    ms, mu = ev[order[0]], ev[order[1]]
    if not (abs(ms) < 1 - TAU and abs(mu) > 1 + TAU):
        raise NotASaddle(f"multipliers {ms:.6g}, {mu:.6g} at {base} do not straddle 1")
    return SaddleFrame(c, base, period, _unit(vec[:, order[0]]), _unit(vec[:, order[1]]),
                       float(ms), float(mu), J)


@dataclass
class ManifoldCurve:
    frame: SaddleFrame
    side: str  # "stable" | "unstable"
    branch: int  # +1 | -1
    vertices: np.ndarray  # (n, 2)
    params: np.ndarray  # fundamental-domain parameter of each vertex
    arc_tol: float
    power: int  # iterates of f (or of the inverse branch) per parameter unit
    eps0: float
    stop_reason: str = ""

    @property
    def arclength(self) -> float:
        if len(self.vertices) < 2:
            return 0.0
        return float(np.sum(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)))

    def distance(self, pts) -> np.ndarray:
        """Max-free Euclidean distance from each point to the polyline."""
        return polyline_distance(self.vertices, pts)

    def invariance_residual(self) -> float:
        """Largest distance from the image of a vertex to the polyline.

        The image is taken under the growth map (the period map, doubled
        when the multiplier is negative; the inverse branch for stable
        curves), over the vertices whose image parameter stays inside the
        traced range.
        """
        if len(self.params) < 2:
            return 0.0
        keep = self.params <= self.params[-1] - 1.0
        if not keep.any():
            return 0.0
        pts = self.vertices[keep]
        imgs = np.array([_push(p, self.frame.c, self.power, self.side == "stable") for p in pts], dtype=float)
        ok = np.all(np.isfinite(imgs), axis=1)
        if not ok.any():
            return 0.0
        return float(np.max(self.distance(imgs[ok])))

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        if header:
            buf.write(_csv_header(self.frame, self.side))
            buf.write("branch,side,index,x,y\n")
        b = "+" if self.branch > 0 else "-"
        for i, (x, y) in enumerate(self.vertices):
            buf.write(f"{b},{self.side},{i},{float(x)!r},{float(y)!r}\n")
        return buf.getvalue()


def _csv_header(frame: SaddleFrame, side: str) -> str:
    return (f"# c={frame.c!r} base=({float(frame.base.x)!r},{float(frame.base.y)!r}) period={frame.period} "
            f"stable_mult={float(frame.stable_mult)!r} unstable_mult={float(frame.unstable_mult)!r} side={side}\n")


def curves_to_csv(curves: list[ManifoldCurve]) -> str:
    if not curves:
        return "branch,side,index,x,y\n"
    out = [_csv_header(curves[0].frame, curves[0].side), "branch,side,index,x,y\n"]
    out += [cv.to_csv(header=False) for cv in curves]
    return "".join(out)


def polyline_distance(vertices: np.ndarray, pts) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if len(vertices) == 1:
        return np.linalg.norm(pts - vertices[0], axis=1)
    a = vertices[:-1][None, :, :]
    b = vertices[1:][None, :, :]
    p = pts[:, None, :]
    ab = b - a
    den = np.sum(ab * ab, axis=2)
    den = np.where(den == 0, 1.0, den)
    t = np.clip(np.sum((p - a) * ab, axis=2) / den, 0.0, 1.0)
    proj = a + t[..., None] * ab
    return np.min(np.linalg.norm(p - proj, axis=2), axis=1)


def _push(z, c, power, inverse):
    x, y = float(z[0]), float(z[1])
    for _ in range(power):
        if inverse:
            if abs(y) < Y_CUTOFF:
                return (math.nan, math.nan)
            x, y = y, (x - c) / y
        else:
            x, y = x * y + c, x
        if not (math.isfinite(x) and math.isfinite(y)):
            return (math.nan, math.nan)
    return (x, y)


def _trace(frame: SaddleFrame, side: str, branch: int, steps: int, eps0: float | None,
           arc_tol: float, max_arclen: float, R: float | None) -> ManifoldCurve:
    if side not in ("stable", "unstable"):
        raise ValueError("side must be 'stable' or 'unstable'")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    c = frame.c
    inverse = side == "stable"
    mu = (1.0 / frame.stable_mult) if inverse else frame.unstable_mult
    d = frame.stable_dir if inverse else frame.unstable_dir
    m = 2 if mu < 0 else 1
    mu_eff = mu ** m
    power = frame.period * m
    base = np.array(frame.base, dtype=float)
    if eps0 is None:
        eps0 = 1e-6 * (1.0 + frame.base.norm())
    if R is None:
        R = escape_radii(c).R2
    log_mu = math.log(mu_eff)

    cache: dict[float, tuple[float, float]] = {}

    def point(tau: float):
        if tau in cache:
            return cache[tau]
        k = int(math.floor(tau))
        s = tau - k
        if tau > 0 and s == 0.0:  # integer parameters close the previous domain
            k, s = k - 1, 1.0
        seed = base + branch * eps0 * math.exp(s * log_mu) * d
        z = (float(seed[0]), float(seed[1]))
        for _ in range(k):
            z = _push(z, c, power, inverse)
            if math.isnan(z[0]):
                break
        cache[tau] = z
        return z

    def dist(p, q):
        return math.hypot(p[0] - q[0], p[1] - q[1])

    taus = [0.0]
    verts = [tuple(base + branch * eps0 * d)]
    arclen = 0.0
    reason = "steps"
    for k in range(steps):
        seg_len = 0.0
        for t in (k + j / 8 for j in range(1, 9)):
            stack = [(t, point(t))]
            while stack and reason == "steps":
                tb, zb = stack[-1]
                ta, za = taus[-1], verts[-1]
                if math.isnan(zb[0]):
                    if tb - ta > 2.0 ** -MAX_REFINE:
                        tm = 0.5 * (ta + tb)
                        stack.append((tm, point(tm)))
                        continue
                    reason = "undefined line"
                    break
                step = dist(za, zb)
                if step > arc_tol and tb - ta > 2.0 ** -MAX_REFINE:
                    tm = 0.5 * (ta + tb)
                    stack.append((tm, point(tm)))
                    continue
                stack.pop()
                if max(abs(zb[0]), abs(zb[1])) > R:
                    reason = "left box"
                    break
                taus.append(tb)
                verts.append(zb)
                seg_len += step
                if arclen + seg_len > max_arclen:
                    reason = "max arclength"
                elif len(verts) >= MAX_VERTICES:
                    reason = "max vertices"
            if reason != "steps":
                break
        arclen += seg_len
        if k == 0 and reason == "undefined line" and len(verts) == 1:
            raise BranchDied(f"{side} branch {branch:+d} at {frame.base} meets y=0 immediately")
        if reason != "steps":
            break
        if k > 0 and seg_len < 1e-14:
            reason = "converged"
            break
    vertices = np.array([tuple(base)] + verts, dtype=float)
    params = np.array([-math.inf] + taus, dtype=float)
    return ManifoldCurve(frame, side, branch, vertices, params, arc_tol, power, eps0, reason)


def trace_unstable(frame: SaddleFrame, steps: int = 400, eps0: float | None = None, arc_tol: float = 1e-3,
                   max_arclen: float = 100.0, branch: int = 1, R: float | None = None) -> ManifoldCurve:
    """One branch of the unstable manifold; vertex 0 is the base point."""
    return _trace(frame, "unstable", branch, steps, eps0, arc_tol, max_arclen, R)


def trace_stable(frame: SaddleFrame, steps: int = 400, eps0: float | None = None, arc_tol: float = 1e-3,
                 max_arclen: float = 100.0, branch: int = 1, R: float | None = None) -> ManifoldCurve:
    """One branch of the stable manifold grown with the inverse branch.

    The branch is cut where a vertex would need the inverse at |y| < 1e-9.
    """
    return _trace(frame, "stable", branch, steps, eps0, arc_tol, max_arclen, R)


def trace_both(frame: SaddleFrame, side: str, **kw) -> list[ManifoldCurve]:
    out = []
    for b in (1, -1):
        try:
            out.append(_trace(frame, side, b, kw.get("steps", 400), kw.get("eps0"), kw.get("arc_tol", 1e-3),
                              kw.get("max_arclen", 100.0), kw.get("R")))
        except BranchDied:
            continue
    return out


# -- K+ decomposition ----------------------------------------------------------

def _check_c(ctx: ParamContext) -> float:
    c = ctx.c.real
    if ctx.c.imag != 0 or not (0 < c < 0.25):
        raise ParameterOutOfRange(f"needs real 0 < c < 1/4, got {ctx.c}")
    return c


@dataclass
class KPlusReport:
    c: float
    grid_counts: dict
    interior_tested: int
    interior_failed: int
    segments: int
    boundary_theta: int
    boundary_cycle: int
    boundary_undecided: int
    boundary_failed: int
    resampled: int
    escape_recheck_failed: int
    boundary_points: list = field(default_factory=list, repr=False)

    @property
    def boundary_success(self) -> float:
        return (self.boundary_theta + self.boundary_cycle) / max(self.segments, 1)

    @property
    def interior_success(self) -> float:
        return 1.0 - self.interior_failed / max(self.interior_tested, 1)

    @property
    def ok(self) -> bool:
        return self.boundary_success >= 0.95 and self.interior_success >= 0.99 and self.escape_recheck_failed == 0


def shadows_saddle(ctx: ParamContext, z, budget: int = 2000, tol: float = 1e-4) -> str | None:
    """'theta' or 'cycle' if the forward orbit stays within tol of theta for
    3 consecutive steps, or of the 3-cycle for 9 consecutive steps."""
    c = ctx.c.real
    _, a2 = (float(v.real) for v in ctx.fixed_coords())
    cyc = cycle_points(c)
    x, y = float(z[0]), float(z[1])
    run_t = run_c = 0
    for _ in range(budget + 1):
        if not (math.isfinite(x) and math.isfinite(y)):
            return None
        run_t = run_t + 1 if max(abs(x - a2), abs(y - a2)) < tol else 0
        near_c = any(max(abs(x - p.x), abs(y - p.y)) < tol for p in cyc)
        run_c = run_c + 1 if near_c else 0
        if run_t >= 3:
            return "theta"
        if run_c >= 9:
            return "cycle"
        x, y = x * y + c, x
    return None


def _side(kind: LimitKind):
    if kind is LimitKind.ALPHA:
        return 0
    if kind is LimitKind.ESCAPE:
        return 1
    return None


def verify_kplus_decomposition(ctx: ParamContext, grid_n: int = 64, window=(-2.0, 2.0, -2.0, 2.0),
                               budget: int = 10_000, tol: float = 1e-4, segments: int = 200,
                               seed: int = 0, interior_max: int = 2000, workers: int = 1,
                               class_tol: float = 1e-6) -> KPlusReport:
    """Sampling check that int K+ is the Alpha basin and that the boundary
    between it and the escaping set is made of orbits shadowing theta or the
    3-cycle."""
    c = _check_c(ctx)
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, grid_n)
    ys = np.linspace(y0, y1, grid_n)
    X, Y = np.meshgrid(xs, ys)
    X, Y = X.ravel(), Y.ravel()
    code, _, _ = classify_limit_grid(ctx, X, Y, budget, class_tol, workers=workers)
    counts = {LimitKind(k).name: int(np.sum(code == k)) for k in range(5)}
    R0 = escape_radii(c).R0

    # interior: 4 probes at distance 1e-4 around Alpha points
    alpha_idx = np.flatnonzero(code == kernels.ALPHA)
    rng = SplitMix64(seed, 1)
    if alpha_idx.size > interior_max:
        pick = np.argsort(rng.uniform(0, alpha_idx.size), kind="stable")[:interior_max]
        alpha_idx = np.sort(alpha_idx[pick])
    h = 1e-4
    offs = np.array([[h, 0], [-h, 0], [0, h], [0, -h]])
    px = (X[alpha_idx][:, None] + offs[None, :, 0]).ravel()
    py = (Y[alpha_idx][:, None] + offs[None, :, 1]).ravel()
    z = np.zeros_like(px)
    esc = kernels.forward_escape(px, z, py, z, c, R0, budget, workers=workers)
    interior_failed = int(np.sum(np.any(esc.reshape(-1, 4) >= 0, axis=1)))

    # boundary: bisection between Alpha and Escape points
    a_pts = np.flatnonzero(code == kernels.ALPHA)
    e_pts = np.flatnonzero(code == kernels.ESCAPE)
    rep = KPlusReport(c, counts, int(alpha_idx.size), interior_failed, 0, 0, 0, 0, 0, 0, 0)
    if a_pts.size == 0 or e_pts.size == 0:
        return rep
    counter = 0
    attempts = 0
    while rep.segments < segments and attempts < 20 * segments:
        attempts += 1
        u = rng.uniform(counter, 2)
        counter += 2
        ia = a_pts[min(int(u[0] * a_pts.size), a_pts.size - 1)]
        ie = e_pts[min(int(u[1] * e_pts.size), e_pts.size - 1)]
        a = np.array([X[ia], Y[ia]])
        b = np.array([X[ie], Y[ie]])
        ts = np.linspace(0.0, 1.0, 16)
        pts = a[None, :] + ts[:, None] * (b - a)[None, :]
        sc, _, _ = classify_limit_grid(ctx, pts[:, 0], pts[:, 1], budget, class_tol)
        sides = [_side(LimitKind(int(k))) for k in sc]
        if None in sides or sides[0] != 0 or sides[-1] != 1 or any(s1 > s2 for s1, s2 in zip(sides[:-1], sides[1:])):
            rep.resampled += 1
            continue
        j = sides.index(1)
        lo, hi = pts[j - 1].copy(), pts[j].copy()
        mid = None
        # bisect to the floating-point limit; 1e-9 is far too coarse to see
        # a 3-cycle saddle shadowed for three periods at tol = 1e-4
        while True:
            m = 0.5 * (lo + hi)
            if np.array_equal(m, lo) or np.array_equal(m, hi):
                break
            k = classify_limit_real(ctx, m, budget, class_tol).kind
            s = _side(k)
            if s == 0:
                lo = m
            elif s == 1:
                hi = m
            else:
                mid = m
                break
        if mid is None:
            mid = 0.5 * (lo + hi)
        rep.segments += 1
        rep.boundary_points.append((float(mid[0]), float(mid[1])))
        if classify_limit_real(ctx, b, 2 * budget, class_tol).kind is not LimitKind.ESCAPE:
            rep.escape_recheck_failed += 1
        got = shadows_saddle(ctx, mid, budget=min(budget, 5000), tol=tol)
        if got == "theta":
            rep.boundary_theta += 1
        elif got == "cycle":
            rep.boundary_cycle += 1
        elif classify_limit_real(ctx, mid, budget, class_tol).kind is LimitKind.UNDECIDED:
            rep.boundary_undecided += 1
        else:
            rep.boundary_failed += 1
    return rep


# -- K- decomposition ------------------------------------------------------------

@dataclass
class KMinusReport:
    c: float
    grid_points: int
    grid_bounded: int
    grid_passed: int
    anchors: int
    anchors_bounded: int
    anchors_passed: int
    worst_distance: float
    bounded_budget: int

    @property
    def bounded(self) -> int:
        return self.grid_bounded + self.anchors_bounded

    @property
    def passed(self) -> int:
        return self.grid_passed + self.anchors_passed

    @property
    def fraction(self) -> float:
        return self.passed / self.bounded if self.bounded else float("nan")

    @property
    def ok(self) -> bool:
        return self.bounded > 0 and self.fraction >= 0.95


def unstable_curves(ctx: ParamContext, arc_tol: float = 1e-3) -> list[ManifoldCurve]:
    out = []
    for name in ("theta", "p1", "p2", "p3"):
        frame = saddle_frame(ctx, name)
        out += trace_both(frame, "unstable", arc_tol=arc_tol)
    return out


def verify_kminus_decomposition(ctx: ParamContext, grid_n: int = 128, budget: int = 1000, tol: float = 1e-6,
                                curves: list[ManifoldCurve] | None = None, anchor_stride: int = 5,
                                bounded_budget: int = 40, curve_tol: float = 1e-3,
                                workers: int = 1) -> KMinusReport:
    """Backward-bounded points must tend backward to theta or the 3-cycle,
    or lie within ``curve_tol`` of a traced unstable branch.

    Grid points over D_{R2} are taken first (``budget`` decides boundedness).
    K- is a union of curves, so a grid almost never meets it; anchors on K-
    (the saddle points and every ``anchor_stride``-th vertex of the traced
    unstable branches) are therefore checked too, with boundedness decided
    over ``bounded_budget`` steps: rounding drifts any float point off an
    unstable manifold after a few dozen inverse steps.
    """
    c = _check_c(ctx)
    radii = escape_radii(c)
    g = np.linspace(-radii.R2, radii.R2, grid_n)
    X, Y = np.meshgrid(g, g)
    X, Y = X.ravel(), Y.ravel()
    z = np.zeros_like(X)
    idx, _ = kernels.backward_escape(X, z, Y, z, c, radii.R1, budget, workers=workers)
    if curves is None:
        curves = unstable_curves(ctx)
    verts = np.concatenate([cv.vertices for cv in curves]) if curves else np.zeros((0, 2))

    def judge(pts):
        passed, worst = 0, 0.0
        for p in pts:
            k = classify_backward_limit_real(ctx, p, budget=max(budget, 10_000), tol=tol).kind
            if k in (LimitKind.THETA, LimitKind.CYCLE3):
                passed += 1
                continue
            d = float(np.min(np.concatenate([cv.distance([p]) for cv in curves]))) if curves else math.inf
            worst = max(worst, d)
            if d <= curve_tol:
                passed += 1
        return passed, worst

    grid_pts = np.stack([X[idx < 0], Y[idx < 0]], axis=1)
    gp, gw = judge(grid_pts)
    a1, a2 = (float(v.real) for v in ctx.fixed_coords())
    anchors = [(a2, a2)] + [tuple(p) for p in cycle_points(c)]
    anchors += [tuple(v) for v in verts[::anchor_stride]]
    bounded = [p for p in anchors if classify_backward(ctx, p, radii, bounded_budget).bounded]
    ap, aw = judge(bounded)
    return KMinusReport(c, int(X.size), int(grid_pts.shape[0]), gp, len(anchors), len(bounded), ap,
                        max(gw, aw), bounded_budget)
