"""The eighteen closed rectangles of the real partition and point location."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParameterOutOfRange
from .exact import INF, NINF, Surd, is_inf, xle

LABELS = ("L", "M", "N", "P", "Q0", "Q1", "Q2", "Q3",
          "A", "B", "C", "D", "E", "F", "G", "H", "R1rect", "R2rect")

S_PRIME = ("L", "M", "N", "P")
Z_PRIME = ("A", "B", "C", "D", "E", "F", "G", "H")
CENTRAL = ("R1rect", "R2rect")


@dataclass(frozen=True)
class XInterval:
    """Closed interval of the extended line; infinite ends are open."""

    lo: object
    hi: object

    def __post_init__(self):
        if not xle(self.lo, self.hi):
            raise ValueError(f"empty interval [{self.lo!r}, {self.hi!r}]")

    @property
    def bounded(self) -> bool:
        return not (is_inf(self.lo) or is_inf(self.hi))

    def contains(self, v) -> bool:
        return xle(self.lo, v) and xle(v, self.hi)

    def covers(self, other: "XInterval") -> bool:
        return xle(self.lo, other.lo) and xle(other.hi, self.hi)

    def to_float(self) -> "XInterval":
        return XInterval(float(self.lo), float(self.hi))

    def __str__(self):
        return f"[{_fmt(self.lo)},{_fmt(self.hi)}]"


def _fmt(v) -> str:
    f = float(v)
    if math.isinf(f):
        return "inf" if f > 0 else "-inf"
    return repr(f)


@dataclass(frozen=True)
class Box:
    x: XInterval
    y: XInterval

    def covers(self, other: "Box") -> bool:
        return self.x.covers(other.x) and self.y.covers(other.y)

    def contains(self, z) -> bool:
        return self.x.contains(z[0]) and self.y.contains(z[1])

    def to_float(self) -> "Box":
        return Box(self.x.to_float(), self.y.to_float())

    def __str__(self):
        return f"{self.x}x{self.y}"


@dataclass(frozen=True)
class LabeledRect(Box):
    label: str = ""

    def to_float(self) -> "LabeledRect":
        return LabeledRect(self.x.to_float(), self.y.to_float(), self.label)


def exact_parameter(c) -> tuple[Fraction, Surd, Surd]:
    """(c, a1, a2) with c read exactly from its binary value."""
    cq = Fraction(c)
    D = 1 - 4 * cq
    if D < 0:
        raise ParameterOutOfRange(f"c = {c} > 1/4: no real fixed points")
    a2 = Surd(Fraction(1, 2), Fraction(1, 2), D)
    a1 = Surd(Fraction(1, 2), Fraction(-1, 2), D)
    return cq, a1, a2


def _table(one_c, a2, zero, one) -> dict[str, tuple[tuple, tuple]]:
    m1 = -one
    return {
        "L": ((a2, INF), (a2, INF)),
        "M": ((NINF, m1), (one_c, INF)),
        "N": ((NINF, m1), (NINF, m1)),
        "P": ((one_c, INF), (NINF, m1)),
        "Q0": ((zero, one_c), (zero, a2)),
        "Q1": ((m1, zero), (zero, one_c)),
        "Q2": ((m1, zero), (m1, zero)),
        "Q3": ((zero, one_c), (m1, zero)),
        "A": ((zero, a2), (a2, INF)),
        "B": ((m1, zero), (one_c, INF)),
        "C": ((NINF, m1), (zero, one_c)),
        "D": ((NINF, m1), (m1, zero)),
        "E": ((m1, zero), (NINF, m1)),
        "F": ((zero, one_c), (NINF, m1)),
        "G": ((one_c, INF), (m1, zero)),
        "H": ((one_c, INF), (zero, a2)),
        "R1rect": ((m1, zero), (m1, one_c)),
        "R2rect": ((zero, one_c), (m1, a2)),
    }


def _check_c(c: float, relax: bool) -> None:
    if isinstance(c, complex):
        if c.imag != 0:
            raise ParameterOutOfRange("the partition needs real c")
        c = c.real
    if not math.isfinite(c):
        raise ParameterOutOfRange(f"c = {c}")
    if 0 < c < 0.25:
        return
    if relax and -1 < c <= 0:
        return
    raise ParameterOutOfRange(f"c = {c} outside (0, 1/4)" + ("" if relax else " (relax allows (-1, 0])"))


def build_regions(c: float, relax: bool = False, exact: bool = False) -> dict[str, LabeledRect]:
    """All eighteen rectangles for parameter c, keyed by label.

    With ``exact=True`` the finite endpoints are ``Surd`` values in
    Q(sqrt(1 - 4c)); otherwise floats.
    """
    _check_c(c, relax)
    c = c.real if isinstance(c, complex) else c
    if exact:
        cq, _, a2 = exact_parameter(c)
        D = 1 - 4 * cq
        zero, one = Surd(0, 0, D), Surd(1, 0, D)
        one_c = Surd(1 + cq, 0, D)
    else:
        a2 = (1 + math.sqrt(1 - 4 * c)) / 2
        zero, one, one_c = 0.0, 1.0, 1.0 + c
    out = {}
    for label, ((x0, x1), (y0, y1)) in _table(one_c, a2, zero, one).items():
        out[label] = LabeledRect(XInterval(x0, x1), XInterval(y0, y1), label)
    return out


def locate(regions: dict[str, LabeledRect], z) -> frozenset[str]:
    """Every label whose closed rectangle contains the real point z."""
    x, y = float(z[0]), float(z[1])
    if math.isnan(x) or math.isnan(y):
        return frozenset()
    return frozenset(lab for lab, r in regions.items() if r.contains((x, y)))


def in_union(regions, labels, z) -> bool:
    return any(regions[lab].contains(z) for lab in labels)
