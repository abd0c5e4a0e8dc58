"""Machine certification of rectangle inclusions under f and its inverse branch.

Images are bounded with exact corner evaluation: (x, y) -> xy is bilinear and
(x, y) -> (x - c)/y is monotone in each variable on a half-plane y > 0 or
y < 0, so the extremes over a rectangle sit at corners (or their limits when a
side is unbounded).  All comparisons happen in Q(sqrt(1 - 4c)).
"""
from __future__ import annotations

import enum
import functools
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DepthExceeded, FibDynError
from .exact import INF, NINF, Surd, is_inf, xadd, xle, xmax, xmin, xmul, xsign
from .regions import Box, LabeledRect, XInterval, build_regions, exact_parameter

DEFAULT_B = 1000
DEFAULT_DEPTH = 30
MIN_DIAMETER = 1e-9


class CertStatus(enum.Enum):
    CERTIFIED = "Certified"
    COUNTEREXAMPLE = "Counterexample"
    TAIL_UNVERIFIED = "TailUnverified"


@dataclass(frozen=True)
class Leaf:
    piece: Box
    image: Box | None  # None when the piece lies on y = 0 (inverse undefined)
    targets: tuple[str, ...]


@dataclass
class InclusionCertificate:
    c: float
    direction: str
    source: str
    targets: tuple[str, ...]
    status: CertStatus
    leaves: list[Leaf] = field(default_factory=list)
    point: tuple[float, float] | None = None  # failing image point
    preimage: tuple[float, float] | None = None
    witnessed: bool = False  # the image point is exactly outside every target
    depth: int = 0
    elapsed: float = 0.0

    @property
    def certified(self) -> bool:
        return self.status is CertStatus.CERTIFIED

    def serialize(self) -> str:
        arrow = "f" if self.direction == "forward" else "f^-1"
        lines = [
            f"# c={self.c!r} exact={Fraction(self.c)}",
            f"# {arrow}({self.source}) in {' | '.join(self.targets)}",
            f"# depth={self.depth} leaves={len(self.leaves)} status={self.status.value}",
        ]
        if self.point is not None:
            lines.append(f"# point={self.point!r} preimage={self.preimage!r} witnessed={self.witnessed}")
        for leaf in sorted(self.leaves, key=_leaf_key):
            img = "undefined" if leaf.image is None else str(leaf.image)
            lines.append(f"{leaf.piece} -> {img} -> {'|'.join(leaf.targets) or '-'}")
        return "\n".join(lines) + "\n"


def _leaf_key(leaf: Leaf):
    p = leaf.piece.to_float()
    return (p.x.lo, p.x.hi, p.y.lo, p.y.hi)


# -- exact images -------------------------------------------------------------

def _as_exact(v, D):
    if isinstance(v, Surd) or is_inf(v):
        return v
    return Surd(Fraction(v), 0, D)


def _exact_box(box: Box, D) -> Box:
    return Box(
        XInterval(_as_exact(box.x.lo, D), _as_exact(box.x.hi, D)),
        XInterval(_as_exact(box.y.lo, D), _as_exact(box.y.hi, D)),
    )


def _corners(box: Box):
    for x in (box.x.lo, box.x.hi):
        for y in (box.y.lo, box.y.hi):
            yield x, y


def _forward_bbox(box: Box, c) -> Box:
    prods = [xmul(x, y) for x, y in _corners(box)]
    first = XInterval(xadd(xmin(prods), c), xadd(xmax(prods), c))
    return Box(first, box.x)


def _quotient_corner(x, y, c, side: int):
    """Limit of (x - c)/y at a corner, or None when it is inf/inf."""
    num = xadd(x, -c)
    if is_inf(y):
        return None if is_inf(num) else Surd(0, 0, c.D)
    if xsign(y) == 0:
        s = xsign(num)
        if s == 0:
            return Surd(0, 0, c.D)
        return INF if s * side > 0 else NINF
    if is_inf(num):
        return INF if xsign(num) * xsign(y) > 0 else NINF
    return num / y


def _inverse_bbox(box: Box, c) -> Box | None:
    ylo, yhi = box.y.lo, box.y.hi
    slo, shi = xsign(ylo), xsign(yhi)
    if slo == 0 and shi == 0:
        return None
    if slo < 0 < shi:
        raise ValueError("y-interval straddles 0; split it first")
    side = 1 if shi > 0 else -1
    vals = [v for v in (_quotient_corner(x, y, c, side) for x, y in _corners(box)) if v is not None]
    return Box(box.y, XInterval(xmin(vals), xmax(vals)))


def rect_image_bbox(c, r: Box, B: float = DEFAULT_B, direction: str = "forward") -> Box | None:
    """Exact bounding box of f(r), or of the inverse branch over r minus the line y = 0.

    Infinite sides are treated symbolically (the sign of each corner product
    decides the infinite end), so ``B`` only matters to the bisection in
    ``certify_inclusion``; it is accepted here for interface symmetry.
    A corner of the form 0 * inf takes its limit along the side where the
    zero coordinate stays fixed, which is 0.
    """
    cq = Fraction(c)
    D = max(1 - 4 * cq, Fraction(0))
    cs = Surd(cq, 0, D)
    box = _exact_box(r, D)
    if direction == "forward":
        return _forward_bbox(box, cs)
    if direction == "backward":
        return _inverse_bbox(box, cs)
    raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")


# -- coverage ------------------------------------------------------------------

def _cmp(a, b) -> int:
    if xle(a, b):
        return 0 if xle(b, a) else -1
    return 1


def _breaks(iv: XInterval, cuts) -> list:
    pts = [iv.lo, iv.hi]
    for v in cuts:
        if xle(iv.lo, v) and xle(v, iv.hi) and not xle(v, iv.lo) and not xle(iv.hi, v):
            pts.append(v)
    pts.sort(key=functools.cmp_to_key(_cmp))
    out = [pts[0]]
    for v in pts[1:]:
        if _cmp(v, out[-1]) != 0:
            out.append(v)
    if len(out) == 1:
        return [(out[0], out[0])]
    return list(zip(out[:-1], out[1:]))


def covered_by(box: Box, targets: list[LabeledRect]) -> tuple[bool, tuple[str, ...]]:
    """Is ``box`` inside the union of ``targets``?  Returns the labels used.

    The box is cut along every target edge crossing it; each resulting cell is
    either inside a target or has an interior point outside all of them, so
    the answer is exact.
    """
    for t in targets:
        if t.covers(box):
            return True, (t.label,)
    xs = _breaks(box.x, [v for t in targets for v in (t.x.lo, t.x.hi)])
    ys = _breaks(box.y, [v for t in targets for v in (t.y.lo, t.y.hi)])
    used = []
    for x0, x1 in xs:
        cx = XInterval(x0, x1)
        for y0, y1 in ys:
            cell = Box(cx, XInterval(y0, y1))
            hit = next((t for t in targets if t.covers(cell)), None)
            if hit is None:
                return False, ()
            if hit.label not in used:
                used.append(hit.label)
    return True, tuple(sorted(used))


# -- bisection ------------------------------------------------------------------

def _eff_len(iv: XInterval, B: float) -> float:
    lo_inf, hi_inf = is_inf(iv.lo), is_inf(iv.hi)
    if lo_inf and hi_inf:
        return 2.0 * B
    if hi_inf:
        return max(B - float(iv.lo), 0.0)
    if lo_inf:
        return max(float(iv.hi) + B, 0.0)
    return float(iv.hi) - float(iv.lo)


def _split_point(iv: XInterval, B: float, D):
    lo_inf, hi_inf = is_inf(iv.lo), is_inf(iv.hi)
    if lo_inf and hi_inf:
        return Surd(0, 0, D)
    if hi_inf:
        return Surd(Fraction(B), 0, D)
    if lo_inf:
        return Surd(Fraction(-B), 0, D)
    return (iv.lo + iv.hi) / 2


def _split(piece: Box, B: float, D) -> tuple[Box, Box]:
    if _eff_len(piece.x, B) >= _eff_len(piece.y, B):
        m = _split_point(piece.x, B, D)
        return (Box(XInterval(piece.x.lo, m), piece.y), Box(XInterval(m, piece.x.hi), piece.y))
    m = _split_point(piece.y, B, D)
    return (Box(piece.x, XInterval(piece.y.lo, m)), Box(piece.x, XInterval(m, piece.y.hi)))


def _center(iv: XInterval, D):
    lo_inf, hi_inf = is_inf(iv.lo), is_inf(iv.hi)
    if lo_inf and hi_inf:
        return Surd(0, 0, D)
    if hi_inf:
        return iv.lo + 1
    if lo_inf:
        return iv.hi - 1
    return (iv.lo + iv.hi) / 2


def _point_image(x, y, c, direction):
    if direction == "forward":
        return x * y + c, x
    if xsign(y) == 0:
        return None
    return y, (x - c) / y


def _auxiliary(c, a1) -> dict[str, LabeledRect]:
    zero = Surd(0, 0, a1.D)
    return {
        "A''": LabeledRect(XInterval(zero, a1), XInterval(a1, INF), "A''"),
        "H''": LabeledRect(XInterval(a1, INF), XInterval(zero, a1), "H''"),
    }


def exact_regions(c, relax: bool = False) -> dict[str, LabeledRect]:
    """The eighteen rectangles in exact form plus the two thin rectangles
    A'' = [0, a1] x [a1, inf) and H'' = [a1, inf) x [0, a1]."""
    regions = build_regions(c, relax=relax, exact=True)
    _, a1, _ = exact_parameter(c)
    regions.update(_auxiliary(c, a1))
    return regions


def certify_inclusion(c, source: str, targets, max_depth: int = DEFAULT_DEPTH, B: float = DEFAULT_B,
                      direction: str = "forward", regions: dict | None = None) -> InclusionCertificate:
    """Certify f(source) (or its inverse-branch image) inside the union of targets.

    Pieces whose exact image box is covered are leaves.  A failing piece is
    first tested at its center: an image point outside all targets is a
    witnessed counterexample.  Otherwise the piece is halved along its longer
    side (unbounded sides count as reaching +-B and are cut there first).
    """
    t0 = time.perf_counter()
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")
    regions = regions if regions is not None else exact_regions(c)
    targets = tuple(targets)
    for lab in (source, *targets):
        if lab not in regions:
            raise KeyError(f"unknown region {lab!r}")
    cq, _, _ = exact_parameter(c)
    D = 1 - 4 * cq
    cs = Surd(cq, 0, D)
    tgt = [regions[t] for t in targets]
    src = regions[source]
    cert = InclusionCertificate(float(c), direction, source, targets, CertStatus.CERTIFIED)

    def fail(status, piece, depth, img_pt, pre_pt, witnessed):
        cert.status = status
        cert.point = None if img_pt is None else (float(img_pt[0]), float(img_pt[1]))
        cert.preimage = (float(pre_pt[0]), float(pre_pt[1]))
        cert.witnessed = witnessed
        cert.depth = max(cert.depth, depth)
        cert.elapsed = time.perf_counter() - t0
        return cert

    start = [Box(src.x, src.y)]
    if direction == "backward" and xsign(src.y.lo) < 0 < xsign(src.y.hi):
        zero = Surd(0, 0, D)
        start = [Box(src.x, XInterval(src.y.lo, zero)), Box(src.x, XInterval(zero, src.y.hi))]
    stack = [(p, 0) for p in reversed(start)]
    while stack:
        piece, depth = stack.pop()
        cert.depth = max(cert.depth, depth)
        img = _forward_bbox(piece, cs) if direction == "forward" else _inverse_bbox(piece, cs)
        if img is None:
            cert.leaves.append(Leaf(piece, None, ()))
            continue
        ok, used = covered_by(img, tgt)
        if ok:
            cert.leaves.append(Leaf(piece, img, used))
            continue
        cx, cy = _center(piece.x, D), _center(piece.y, D)
        ipt = _point_image(cx, cy, cs, direction)
        if ipt is not None and not any(t.contains(ipt) for t in tgt):
            return fail(CertStatus.COUNTEREXAMPLE, piece, depth, ipt, (cx, cy), True)
        diam = max(_eff_len(piece.x, B), _eff_len(piece.y, B))
        if diam < MIN_DIAMETER:
            unbounded = not (piece.x.bounded and piece.y.bounded)
            status = CertStatus.TAIL_UNVERIFIED if unbounded else CertStatus.COUNTEREXAMPLE
            return fail(status, piece, depth, ipt, (cx, cy), False)
        if depth >= max_depth:
            raise DepthExceeded(
                f"{direction} image of {source} not inside {targets} after {max_depth} splits", piece
            )
        a, b = _split(piece, B, D)
        stack.append((b, depth + 1))
        stack.append((a, depth + 1))
    cert.elapsed = time.perf_counter() - t0
    return cert


# -- the full table ----------------------------------------------------------------

@dataclass(frozen=True)
class Transition:
    group: str
    direction: str
    source: str
    targets: tuple[str, ...]

    @property
    def name(self) -> str:
        f = "f" if self.direction == "forward" else "f^-1"
        return f"{f}({self.source}) in {' u '.join(self.targets)}"


def _t(group, direction, source, *targets):
    return Transition(group, direction, source, targets)


TRANSITIONS: tuple[Transition, ...] = (
    # the escaping corner regions
    _t("escape-forward", "forward", "L", "L"),
    _t("escape-forward", "forward", "M", "N"),
    _t("escape-forward", "forward", "N", "P"),
    _t("escape-forward", "forward", "P", "M"),
    # the central squares and their neighbours under f
    _t("central-forward", "forward", "Q0", "Q0", "A", "L"),
    _t("central-forward", "forward", "Q1", "Q2", "Q3"),
    _t("central-forward", "forward", "Q2", "Q3"),
    _t("central-forward", "forward", "Q3", "Q0", "Q1", "A"),
    _t("central-forward", "forward", "A", "Q0", "H"),
    _t("central-forward", "forward", "H", "A", "L"),
    # the outer ring under f
    _t("ring-forward", "forward", "B", "D", "Q2", "Q3"),
    _t("ring-forward", "forward", "C", "N", "E", "F"),
    _t("ring-forward", "forward", "D", "P", "F"),
    _t("ring-forward", "forward", "E", "Q3", "G"),
    _t("ring-forward", "forward", "F", "Q0", "Q1", "C"),
    _t("ring-forward", "forward", "G", "A", "B", "M"),
    # the outer ring under the inverse branch
    _t("ring-backward", "backward", "A", "H", "G", "Q0", "Q3"),
    _t("ring-backward", "backward", "H", "A"),
    _t("ring-backward", "backward", "G", "E"),
    _t("ring-backward", "backward", "E", "C"),
    _t("ring-backward", "backward", "C", "F"),
    _t("ring-backward", "backward", "F", "C", "D"),
    _t("ring-backward", "backward", "D", "B"),
    _t("ring-backward", "backward", "B", "G"),
    # the central squares under the inverse branch
    _t("central-backward", "backward", "Q0", "Q0", "Q3", "A", "F"),
    _t("central-backward", "backward", "Q1", "Q3", "F"),
    _t("central-backward", "backward", "Q2", "Q1", "B"),
    _t("central-backward", "backward", "Q3", "Q1", "Q2", "B", "E"),
    # the escaping corner regions under the inverse branch
    _t("escape-backward", "backward", "L", "Q0", "H", "L"),
    _t("escape-backward", "backward", "M", "G", "P"),
    _t("escape-backward", "backward", "N", "C", "M"),
    _t("escape-backward", "backward", "P", "D", "N"),
    # thin rectangles next to the attracting fixed point
    _t("thin-backward", "backward", "A''", "H''", "G", "Q0", "Q3"),
    _t("thin-backward", "backward", "H''", "A''"),
)


def a2_bound(c) -> tuple[float, bool]:
    """(1 + c) a2 and whether it is <= 1, decided exactly; needs 0 <= c <= 1/4."""
    cq = Fraction(c)
    if not (0 <= cq <= Fraction(1, 4)):
        raise ValueError("needs 0 <= c <= 1/4")
    _, _, a2 = exact_parameter(c)
    v = a2 * (1 + cq)
    return float(v), v <= 1


@dataclass
class TransitionRow:
    name: str
    group: str
    status: str
    certificate: InclusionCertificate | None = None
    error: str = ""

    @property
    def passed(self) -> bool:
        return self.status == CertStatus.CERTIFIED.value


@dataclass
class TransitionReport:
    c: float
    rows: list[TransitionRow]
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def table(self) -> str:
        w = max(len(r.name) for r in self.rows)
        out = [f"{r.name:<{w}}  {r.status}{('  ' + r.error) if r.error else ''}" for r in self.rows]
        out.append(f"{'all' :<{w}}  {'PASS' if self.passed else 'FAIL'}  ({self.elapsed:.2f}s)")
        return "\n".join(out)


def verify_transition_tables(c, max_depth: int = DEFAULT_DEPTH, B: float = DEFAULT_B,
                             transitions=TRANSITIONS) -> TransitionReport:
    """Certify every entry of ``transitions`` plus the scalar bound (1 + c) a2 <= 1."""
    t0 = time.perf_counter()
    regions = exact_regions(c)
    rows = []
    for tr in transitions:
        try:
            cert = certify_inclusion(c, tr.source, tr.targets, max_depth, B, tr.direction, regions)
            rows.append(TransitionRow(tr.name, tr.group, cert.status.value, cert))
        except FibDynError as exc:
            rows.append(TransitionRow(tr.name, tr.group, type(exc).__name__, None, str(exc)))
    value, ok = a2_bound(c)
    rows.append(TransitionRow("(1+c) a2 <= 1", "scalar", CertStatus.CERTIFIED.value if ok else "Violated",
                              None, f"value={value!r}"))
    return TransitionReport(float(c), rows, time.perf_counter() - t0)
