"""Exact arithmetic in Q(sqrt(D)) extended by +-infinity.

The partition boundaries are built from c and a2 = (1 + sqrt(1 - 4c))/2, so
every corner product and quotient met while certifying rectangle images
stays inside Q(sqrt(1 - 4c)).  Comparisons are decided exactly.
"""
from __future__ import annotations

import math
from fractions import Fraction

INF = math.inf
NINF = -math.inf


class Surd:
    """p + q*sqrt(D) with rational p, q and a fixed rational D >= 0."""

    __slots__ = ("p", "q", "D")

    def __init__(self, p, q=0, D=Fraction(0)):
        self.p = Fraction(p)
        self.q = Fraction(q)
        self.D = Fraction(D)
        if self.D == 0:
            self.q = Fraction(0)
        elif self.q and self.D < 0:
            raise ValueError("radicand must be non-negative")

    # -- helpers -----------------------------------------------------------
    def _lift(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.q and self.q and other.D != self.D:
                raise ValueError("mixing different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return Surd(other, 0, self.D)
        if isinstance(other, float) and math.isfinite(other):
            return Surd(Fraction(other), 0, self.D)
        return NotImplemented

    def _field(self, other: "Surd") -> Fraction:
        return self.D if self.q else other.D

    def sign(self) -> int:
        p, q = self.p, self.q
        sp = (p > 0) - (p < 0)
        sq = (q > 0) - (q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with q^2 D
        lhs, rhs = p * p, q * q * self.D
        if lhs == rhs:
            return 0
        return sp if lhs > rhs else sq

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, float) and not math.isfinite(other):
            return other
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Surd(self.p + o.p, self.q + o.q, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.p, -self.q, self.D)

    def __sub__(self, other):
        if isinstance(other, float) and not math.isfinite(other):
            return -other
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Surd(self.p - o.p, self.q - o.q, self._field(o))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, float) and not math.isfinite(other):
            s = self.sign()
            return 0 * self if s == 0 else (other if s > 0 else -other)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        D = self._field(o)
        return Surd(self.p * o.p + self.q * o.q * D, self.p * o.q + self.q * o.p, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, float) and not math.isfinite(other):
            return Surd(0, 0, self.D)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        D = self._field(o)
        den = o.p * o.p - o.q * o.q * D
        if den == 0:
            raise ZeroDivisionError("division by zero surd")
        num = self * Surd(o.p, -o.q, D)
        return Surd(num.p / den, num.q / den, D)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    # -- comparisons -------------------------------------------------------
    def _cmp(self, other) -> int:
        if isinstance(other, float) and not math.isfinite(other):
            if math.isnan(other):
                raise ValueError("NaN in exact comparison")
            return -1 if other > 0 else 1
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.p, self.q))

    def __float__(self):
        # guarded against cancellation by evaluating the conjugate form when needed
        r = math.sqrt(self.D) if self.q else 0.0
        v = float(self.p) + float(self.q) * r
        conj = float(self.p) - float(self.q) * r
        if self.q and abs(v) < 1e-6 * (abs(float(self.p)) + 1e-300) and conj != 0:
            v = float(self.p * self.p - self.q * self.q * self.D) / conj
        return v

    def __repr__(self):
        if not self.q:
            return f"Surd({self.p})"
        return f"Surd({self.p} + {self.q}*sqrt({self.D}))"


def xfloat(v) -> float:
    return float(v)


def xsign(v) -> int:
    if isinstance(v, Surd):
        return v.sign()
    return (v > 0) - (v < 0)


def xmul(a, b):
    """Product with the edge-limit convention 0 * (+-inf) = 0."""
    a_inf = isinstance(a, float) and not math.isfinite(a)
    b_inf = isinstance(b, float) and not math.isfinite(b)
    if a_inf or b_inf:
        sa, sb = xsign(a), xsign(b)
        if sa == 0 or sb == 0:
            return Surd(0)
        return INF if sa * sb > 0 else NINF
    return a * b


def xadd(a, b):
    a_inf = isinstance(a, float) and not math.isfinite(a)
    b_inf = isinstance(b, float) and not math.isfinite(b)
    if a_inf and b_inf and a != b:
        raise ArithmeticError("inf - inf")
    if a_inf:
        return a
    if b_inf:
        return b
    return a + b


def xmin(vals):
    out = None
    for v in vals:
        if out is None or v < out:
            out = v
    return out


def xmax(vals):
    out = None
    for v in vals:
        if out is None or v > out:
            out = v
    return out


def is_inf(v) -> bool:
    return isinstance(v, float) and not math.isfinite(v)


def xle(a, b) -> bool:
    """a <= b for extended values (floats inf or Surd)."""
    if is_inf(a) and is_inf(b):
        return a <= b
    if is_inf(a):
        return a < 0
    if is_inf(b):
        return b > 0
    return a <= b


def xlt(a, b) -> bool:
    return xle(a, b) and not (xle(b, a))
