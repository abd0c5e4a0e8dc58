"""The map family f_c(x, y) = (xy + c, x), its inverse branch and orbits.

Everything here is scalar and pure; batch versions of the hot loops live in
:mod:`fibdyn.kernels`.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .errors import InverseUndefined, OriginExcluded, OverflowToInfinite

BETA = (1.0 + math.sqrt(5.0)) / 2.0
INT64_MAX = 2**63 - 1


class Point2(NamedTuple):
    x: complex
    y: complex

    def norm(self) -> float:
        """Maximum norm max(|x|, |y|)."""
        return max(abs(self.x), abs(self.y))


def fibonacci_table(limit: int = INT64_MAX) -> tuple[int, ...]:
    """F_0 = F_1 = 1, F_{n+2} = F_{n+1} + F_n, up to the largest F_n <= limit."""
    fib = [1, 1]
    while fib[-1] + fib[-2] <= limit:
        fib.append(fib[-1] + fib[-2])
    return tuple(fib)


FIB = fibonacci_table()


@dataclass(frozen=True)
class ParamContext:
    c: complex
    is_real: bool = field(default=None)  # type: ignore[assignment]
    beta: float = BETA
    fib: tuple[int, ...] = FIB

    def __post_init__(self):
        c = complex(self.c)
        object.__setattr__(self, "c", c)
        if self.is_real is None:
            object.__setattr__(self, "is_real", c.imag == 0.0)

    @property
    def c_real(self) -> float:
        return self.c.real

    def coerce(self, v):
        return v.real if self.is_real and isinstance(v, complex) and v.imag == 0 else v

    def fixed_coords(self) -> tuple[complex, complex]:
        """(a1, a2), the two roots of a^2 - a + c = 0."""
        s = cmath.sqrt(1 - 4 * self.c)
        a1, a2 = (1 - s) / 2, (1 + s) / 2
        if self.is_real and self.c.real <= 0.25:
            return a1.real, a2.real
        return a1, a2


def fib(n: int) -> int:
    """Fibonacci number with F_{-1} = 0 and F_{-2} = 1 (extension backwards)."""
    if n == -1:
        return 0
    if n == -2:
        return 1
    if n >= len(FIB):
        raise OverflowToInfinite(f"F_{n} exceeds the int64 table")
    return FIB[n]


def _finite(v) -> bool:
    if isinstance(v, complex):
        return math.isfinite(v.real) and math.isfinite(v.imag)
    return math.isfinite(v)


def apply_forward(ctx: ParamContext, z) -> Point2:
    x, y = z
    try:
        u = x * y + ctx.c if not ctx.is_real else x * y + ctx.c.real
    except OverflowError as exc:  # pragma: no cover - float mult never raises
        raise OverflowToInfinite(str(exc)) from None
    if not (_finite(u) and _finite(x)):
        raise OverflowToInfinite(f"f({x!r}, {y!r}) is not finite")
    return Point2(u, x)


def apply_inverse(ctx: ParamContext, z) -> Point2:
    x, y = z
    if y == 0:
        raise InverseUndefined(f"inverse branch undefined at y = 0 (x = {x!r})")
    c = ctx.c.real if ctx.is_real else ctx.c
    v = (x - c) / y
    if not _finite(v):
        raise OverflowToInfinite(f"f^-1({x!r}, {y!r}) is not finite")
    return Point2(y, v)


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class Status(enum.Enum):
    BOUNDED = "bounded"
    ESCAPED = "escaped"
    INVERSE_UNDEFINED = "inverse-undefined"


@dataclass
class OrbitTrace:
    points: list
    direction: Direction
    status: Status
    index: int | None
    budget: int

    @property
    def escaped(self) -> bool:
        return self.status is Status.ESCAPED


def iterate_orbit(
    ctx: ParamContext,
    z,
    direction: Direction | str = Direction.FORWARD,
    budget: int = 1000,
    exit_test: Callable[[Point2], bool] | None = None,
) -> OrbitTrace:
    """Iterate until ``exit_test`` fires, the inverse dies, or ``budget`` points were seen.

    ``exit_test`` is checked on points 0 .. budget-1; a non-finite next point
    counts as escaping at its own index.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    direction = Direction(direction)
    step = apply_forward if direction is Direction.FORWARD else apply_inverse
    z = Point2(*z)
    points = [z]
    for n in range(budget):
        if exit_test is not None and exit_test(points[n]):
            return OrbitTrace(points, direction, Status.ESCAPED, n, budget)
        if n == budget - 1:
            break
        try:
            points.append(step(ctx, points[n]))
        except InverseUndefined:
            return OrbitTrace(points, direction, Status.INVERSE_UNDEFINED, n, budget)
        except OverflowToInfinite:
            return OrbitTrace(points, direction, Status.ESCAPED, n + 1, budget)
    return OrbitTrace(points, direction, Status.BOUNDED, None, budget)


# --- c = 0 closed forms -----------------------------------------------------

def _monomial(x, y, ex: int, ey: int):
    try:
        v = (x**ex if ex else 1) * (y**ey if ey else 1)
    except OverflowError:
        raise OverflowToInfinite(f"x^{ex} y^{ey} overflows") from None
    except ZeroDivisionError:
        raise InverseUndefined("zero coordinate raised to a negative power") from None
    if not _finite(v):
        raise OverflowToInfinite(f"x^{ex} y^{ey} is not finite")
    return v


def monomial_forward_c0(z, n: int) -> Point2:
    """f_0^n(x, y) = (x^F_n y^F_{n-1}, x^F_{n-1} y^F_{n-2})."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x, y = z
    return Point2(
        _monomial(x, y, fib(n), fib(n - 1)),
        _monomial(x, y, fib(n - 1), fib(n - 2)),
    )


def backward_exponents_c0(n: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Exponent pairs of f_0^{-n}: each coordinate is x^a y^b.

    Writing f^{-n} = (u_n, v_n), f^{-(n+1)} = (v_n, u_n / v_n) gives
    v_n = (-1)^(n+1) (F_{n-1}, -F_n) and u_n = v_{n-1}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def v(k):
        s = 1 if (k + 1) % 2 == 0 else -1
        return (s * fib(k - 1), -s * fib(k))

    return v(n - 1), v(n)


def monomial_backward_c0(z, n: int) -> Point2:
    x, y = z
    if x == 0 or y == 0:
        raise InverseUndefined("closed-form inverse needs x != 0 and y != 0")
    (a, b), (p, q) = backward_exponents_c0(n)
    return Point2(_monomial(x, y, a, b), _monomial(x, y, p, q))


class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


def c0_kplus_oracle(z, eps: float = 1e-6) -> Membership:
    """Closed-form K+ at c = 0: |y| <= |x|^(-beta)."""
    ax, ay = abs(z[0]), abs(z[1])
    if ax == 0:
        return Membership.INSIDE
    try:
        t = ax ** (-BETA)
    except OverflowError:
        return Membership.INSIDE
    if abs(ay - t) <= eps * t:
        return Membership.BOUNDARY
    return Membership.INSIDE if ay < t else Membership.OUTSIDE


def c0_kminus_oracle(z, eps: float = 1e-6) -> Membership:
    """Closed-form K- at c = 0: |y| = |x|^(1/beta), origin excluded."""
    ax, ay = abs(z[0]), abs(z[1])
    if ax == 0 and ay == 0:
        raise OriginExcluded("K- at c = 0 excludes the origin")
    t = ax ** (1.0 / BETA)
    return Membership.INSIDE if abs(ay - t) <= eps * max(1.0, t) else Membership.OUTSIDE


def semiconjugacy_residual(z) -> float:
    """max-norm of h2(f_0(z)) - fcheck(h2(z)) with h2 = moduli, fcheck(r, s) = (rs, r)."""
    x, y = z
    lhs = (abs(x * y), abs(x))
    r, s = abs(x), abs(y)
    rhs = (r * s, r)
    return max(abs(lhs[0] - rhs[0]), abs(lhs[1] - rhs[1]))
