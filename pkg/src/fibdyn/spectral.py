"""Fixed points, Jacobians, eigenvalue classification and the universal 3-cycle."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Point2

TAU = 1e-9


class Kind(enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    SADDLE = "saddle"
    INDIFFERENT = "indifferent"
    DEGENERATE = "degenerate"


def jacobian(z) -> np.ndarray:
    """Jacobian of f at (x, y): [[y, x], [1, 0]]."""
    x, y = z
    dt = complex if isinstance(x, complex) or isinstance(y, complex) else float
    return np.array([[y, x], [1, 0]], dtype=dt)


def inverse_jacobian(z, c) -> np.ndarray:
    """Jacobian of the inverse branch (y, (x - c)/y)."""
    x, y = z
    return np.array([[0, 1], [1 / y, -(x - c) / y**2]], dtype=complex)


def kind_from_moduli(m1: float, m2: float, tau: float = TAU) -> Kind:
    lo, hi = sorted((m1, m2))
    if hi < 1 - tau:
        return Kind.ATTRACTING
    if lo > 1 + tau:
        return Kind.REPELLING
    if lo < 1 - tau and hi > 1 + tau:
        return Kind.SADDLE
    return Kind.INDIFFERENT


def char_roots(a) -> tuple[complex, complex]:
    """Roots of x^2 - a x - a, ordered (a - s)/2, (a + s)/2."""
    s = cmath.sqrt(a * a + 4 * a)
    return (a - s) / 2, (a + s) / 2


@dataclass(frozen=True)
class FixedPointInfo:
    location: Point2
    which: str  # "A1" | "A2"
    eigenvalues: tuple[complex, complex]
    kind: Kind
    near_unit: bool = False  # an eigenvalue modulus lies within tau of 1

    @property
    def a(self):
        return self.location.x


def _fixed_info(a, which: str, degenerate: bool) -> FixedPointInfo:
    ev = char_roots(a)
    m = [abs(v) for v in ev]
    kind = Kind.DEGENERATE if degenerate else kind_from_moduli(*m)
    near = any(abs(v - 1) <= TAU for v in m)
    return FixedPointInfo(Point2(a, a), which, ev, kind, near)


@dataclass(frozen=True)
class FixedPoints:
    c: complex
    points: tuple[FixedPointInfo, ...]
    degenerate: bool = False
    nonreal: bool = False


def fixed_points(c, real_mode: bool | None = None) -> FixedPoints:
    """Both roots of a^2 - a + c = 0 with their Jacobian data.

    Real mode (default for real c) flags ``nonreal`` when c > 1/4; the complex
    roots are still returned.
    """
    c = complex(c)
    if real_mode is None:
        real_mode = c.imag == 0
    disc = 1 - 4 * c
    degenerate = disc == 0
    nonreal = real_mode and c.real > 0.25
    if real_mode and not nonreal:
        s = math.sqrt(disc.real)
        a1, a2 = (1 - s) / 2, (1 + s) / 2
    else:
        s = cmath.sqrt(disc)
        a1, a2 = (1 - s) / 2, (1 + s) / 2
    pts = (_fixed_info(a1, "A1", degenerate), _fixed_info(a2, "A2", degenerate))
    return FixedPoints(c, pts, degenerate, nonreal)


@dataclass(frozen=True)
class ParameterClass:
    c: float
    a1: FixedPointInfo
    a2: FixedPointInfo

    @property
    def kinds(self) -> tuple[Kind, Kind]:
        return self.a1.kind, self.a2.kind


def classify_parameter(c: float) -> ParameterClass:
    """Types of (a1, a1) and (a2, a2) for real c <= 1/4."""
    if isinstance(c, complex):
        if c.imag != 0:
            raise ValueError("classify_parameter is defined for real c only")
        c = c.real
    if c > 0.25:
        raise ValueError("fixed points are not real for c > 1/4")
    fp = fixed_points(c, real_mode=True)
    return ParameterClass(float(c), *fp.points)


def expected_kinds(c: float) -> tuple[Kind, Kind]:
    """The fixed-point table for real c (used as an independent reference)."""
    if c == 0.25:
        return Kind.DEGENERATE, Kind.DEGENERATE
    if c == -2:
        return Kind.INDIFFERENT, Kind.SADDLE
    if c < -2:
        return Kind.REPELLING, Kind.SADDLE
    return Kind.ATTRACTING, Kind.SADDLE


@dataclass(frozen=True)
class InverseFixedInfo:
    c: float
    a1: float
    eigenvalues: tuple[complex, complex]
    attracting: bool

    @property
    def product(self) -> complex:
        return self.eigenvalues[0] * self.eigenvalues[1]


def inverse_fixed_classification(c: float) -> InverseFixedInfo:
    """Eigenvalues (-1 -+ sqrt(1 + 4/a1))/2 of the inverse branch at (a1, a1)."""
    if c >= 0.25:
        raise ValueError("needs c < 1/4")
    a1 = (1 - math.sqrt(1 - 4 * c)) / 2
    if a1 == 0:
        raise ZeroDivisionError("a1 = 0 (c = 0): inverse Jacobian undefined")
    s = cmath.sqrt(1 + 4 / a1)
    ev = ((-1 - s) / 2, (-1 + s) / 2)
    return InverseFixedInfo(c, a1, ev, max(abs(ev[0]), abs(ev[1])) < 1)


@dataclass(frozen=True)
class CycleInfo:
    c: complex
    points: tuple[Point2, Point2, Point2]
    multiplier_matrix: np.ndarray
    multiplier_eigenvalues: tuple[complex, complex]

    @property
    def kind(self) -> Kind:
        return kind_from_moduli(*(abs(v) for v in self.multiplier_eigenvalues))


def cycle_points(c) -> tuple[Point2, Point2, Point2]:
    c = c.real if isinstance(c, complex) and c.imag == 0 else c
    return Point2(-1.0, -1.0), Point2(1 + c, -1.0), Point2(-1.0, 1 + c)


def period_jacobian(points) -> np.ndarray:
    """Chain-rule product J(z_{k-1}) ... J(z_1) J(z_0) along an orbit segment."""
    m = np.eye(2, dtype=complex)
    for z in points:
        m = jacobian(z).astype(complex) @ m
    return m


def three_cycle(c) -> CycleInfo:
    pts = cycle_points(c)
    m = period_jacobian(pts)
    if not np.iscomplexobj(m) or np.all(m.imag == 0):
        m = m.real
    ev = np.linalg.eigvals(m)
    ev = tuple(sorted((complex(v) for v in ev), key=lambda v: (abs(v), v.real, v.imag)))
    return CycleInfo(complex(c), pts, m, ev)


def f2_and_jacobian(x: float, y: float, c: float):
    u = x * y + c
    f2 = np.array([u * x + c, u])
    # d/dx (u x) = y x + u ; d/dy (u x) = x^2
    J = np.array([[y * x + u, x * x], [y, x]])
    return f2, J


@dataclass
class Period2Report:
    c: float
    roots: list
    non_fixed: list
    fixed_found: list


def period2_certificate(c: float, search_box=((-3.0, 3.0), (-3.0, 3.0)), grid_n: int = 32,
                        max_steps: int = 50, step_tol: float = 1e-12) -> Period2Report:
    """Newton on f^2(z) - z from a grid of seeds; report roots that are not fixed points."""
    if grid_n < 8:
        raise ValueError("grid_n must be >= 8")
    (x0, x1), (y0, y1) = search_box
    xs = np.linspace(x0, x1, grid_n)
    ys = np.linspace(y0, y1, grid_n)
    roots = []
    for sx in xs:
        for sy in ys:
            z = np.array([sx, sy], dtype=float)
            for _ in range(max_steps):
                f2, J = f2_and_jacobian(z[0], z[1], c)
                try:
                    dz = np.linalg.solve(J - np.eye(2), -(f2 - z))
                except np.linalg.LinAlgError:
                    break
                z = z + dz
                if not np.all(np.isfinite(z)):
                    break
                if np.max(np.abs(dz)) < step_tol:
                    roots.append((float(z[0]), float(z[1])))
                    break
    roots.sort()
    uniq = []
    for r in roots:
        if all(max(abs(r[0] - u[0]), abs(r[1] - u[1])) >= 1e-8 for u in uniq):
            uniq.append(r)
    fps = [p.location for p in fixed_points(c).points]
    fixed_pts = [(complex(p.x), complex(p.y)) for p in fps]

    def is_fixed(r):
        return any(max(abs(r[0] - p[0]), abs(r[1] - p[1])) < 1e-6 for p in fixed_pts)

    non_fixed = [r for r in uniq if not is_fixed(r)]
    fixed_found = [r for r in uniq if is_fixed(r)]
    return Period2Report(c, uniq, non_fixed, fixed_found)
