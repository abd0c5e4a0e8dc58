"""Itineraries and limit classification of real orbits for 0 < c < 1/4.

The scalar classifiers follow the batch kernels step for step, so a grid
computed with ``classify_limit_grid`` agrees point-for-point with calling
``classify_limit_real`` in a loop.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..core import Direction, ParamContext, Point2
from ..errors import ParameterOutOfRange
from .regions import build_regions, locate

SETTLE_STEPS = 10


class LimitKind(enum.IntEnum):
    ALPHA = kernels.ALPHA
    THETA = kernels.THETA
    CYCLE3 = kernels.CYCLE3
    ESCAPE = kernels.ESCAPE
    UNDECIDED = kernels.UNDECIDED
    BACKWARD_ESCAPE = kernels.BACKWARD_ESCAPE
    INVERSE_UNDEFINED = kernels.INVERSE_UNDEFINED


@dataclass(frozen=True)
class LimitClass:
    kind: LimitKind
    step: int | None = None  # step at which the verdict was reached
    phase: int | None = None  # for CYCLE3: index of the cycle point the start shadows

    def __str__(self):
        if self.kind is LimitKind.CYCLE3:
            return f"Cycle3({self.phase})"
        if self.kind in (LimitKind.ESCAPE, LimitKind.BACKWARD_ESCAPE, LimitKind.INVERSE_UNDEFINED):
            return f"{self.kind.name.title().replace('_', '')}({self.step})"
        return self.kind.name.title()


def _real_params(ctx: ParamContext) -> tuple[float, float, float]:
    c = ctx.c.real
    if ctx.c.imag != 0 or not (0 < c < 0.25):
        raise ParameterOutOfRange(f"limit classification needs real 0 < c < 1/4, got {ctx.c}")
    a1, a2 = ctx.fixed_coords()
    return c, float(a1), float(a2)


def _in_s(x, y, a2, one_c):
    return ((x >= a2 and y >= a2) or (x <= -1 and y >= one_c)
            or (x <= -1 and y <= -1) or (x >= one_c and y <= -1))


def _in_z(x, y, a2, one_c):
    return ((0 <= x <= a2 and y >= a2) or (-1 <= x <= 0 and y >= one_c)
            or (x <= -1 and 0 <= y <= one_c) or (x <= -1 and -1 <= y <= 0)
            or (-1 <= x <= 0 and y <= -1) or (0 <= x <= one_c and y <= -1)
            or (x >= one_c and -1 <= y <= 0) or (x >= one_c and 0 <= y <= a2))


def _classify(c, a1, a2, z, budget, tol, backward) -> LimitClass:
    one_c = 1.0 + c
    tx = (a1, a2, -1.0, one_c, -1.0)
    ty = (a1, a2, -1.0, -1.0, one_c)
    nxt = (0, 1, 4, 2, 3) if backward else (0, 1, 3, 4, 2)
    first = 1 if backward else 0
    cls_of = (LimitKind.ALPHA, LimitKind.THETA, LimitKind.CYCLE3, LimitKind.CYCLE3, LimitKind.CYCLE3)
    esc = LimitKind.BACKWARD_ESCAPE if backward else LimitKind.ESCAPE
    x, y = float(z[0]), float(z[1])
    cand, streak, entry_j, entry_n = -1, 0, 0, 0
    n = 0
    while True:
        if not (math.isfinite(x) and math.isfinite(y)):
            return LimitClass(esc, n)
        near = -1
        for j in range(first, 5):
            if max(abs(x - tx[j]), abs(y - ty[j])) < tol:
                near = j
                break
        if cand >= 0:
            if max(abs(x - tx[cand]), abs(y - ty[cand])) < 2.0 * tol:
                streak += 1
            else:
                cand, streak = -1, 0
        if cand >= 0 and streak >= SETTLE_STEPS:
            phase = None
            if entry_j >= 2:
                phase = (entry_j - 2 + (entry_n if backward else -entry_n)) % 3
            return LimitClass(cls_of[entry_j], n, phase)
        if cand < 0 and near >= 0:
            cand, streak, entry_j, entry_n = near, 0, near, n
        if near < 0 and (_in_z(x, y, a2, one_c) if backward else _in_s(x, y, a2, one_c)):
            return LimitClass(esc, n)
        if backward and y == 0.0:
            return LimitClass(LimitKind.INVERSE_UNDEFINED, n)
        if n == budget:
            return LimitClass(LimitKind.UNDECIDED, n)
        if cand >= 0:
            cand = nxt[cand]
        if backward:
            x, y = y, (x - c) / y
        else:
            x, y = x * y + c, x
        n += 1


def classify_limit_real(ctx: ParamContext, z, budget: int = 10_000, tol: float = 1e-6) -> LimitClass:
    """Where the forward orbit of a real point goes.

    Escape(n) once the orbit lands in L u M u N u P away from the periodic
    points.  Alpha, Theta or Cycle3 once it comes within ``tol`` of one and
    then shadows it within ``2 tol`` for ten more steps.  The Cycle3 phase k
    means the start point tends to the orbit of f^k(p) with p = (-1, -1).
    """
    c, a1, a2 = _real_params(ctx)
    return _classify(c, a1, a2, z, budget, tol, backward=False)


def classify_backward_limit_real(ctx: ParamContext, z, budget: int = 10_000, tol: float = 1e-6) -> LimitClass:
    """The same under the inverse branch; the escape set is A u ... u H."""
    c, a1, a2 = _real_params(ctx)
    return _classify(c, a1, a2, z, budget, tol, backward=True)


def classify_limit_grid(ctx: ParamContext, x, y, budget: int = 10_000, tol: float = 1e-6,
                        backward: bool = False, workers: int = 1, impl=None):
    """Batch version over arrays; returns (code, step, phase) arrays."""
    c, a1, a2 = _real_params(ctx)
    fn = kernels.limit_backward_real if backward else kernels.limit_forward_real
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    code, step, phase = fn(x.ravel(), y.ravel(), c, a1, a2, budget, tol, workers=workers, impl=impl)
    return code.reshape(x.shape), step.reshape(x.shape), phase.reshape(x.shape)


def itinerary(ctx: ParamContext, regions, z, direction=Direction.FORWARD, budget: int = 100,
              tol: float = 1e-9) -> list[frozenset[str]]:
    """Labels visited by the orbit of z, one set per point.

    Stops after ``budget`` steps, on entering the escape set of the chosen
    direction away from the fixed and period-3 points, or where the inverse
    branch is undefined.
    """
    direction = Direction(direction)
    c = ctx.c.real
    if regions is None:
        regions = build_regions(c)
    a1, a2 = (float(v.real) for v in ctx.fixed_coords())
    anchors = ((a1, a1), (a2, a2), (-1.0, -1.0), (1.0 + c, -1.0), (-1.0, 1.0 + c))
    esc = {"L", "M", "N", "P"} if direction is Direction.FORWARD else set("ABCDEFGH")
    x, y = float(z[0]), float(z[1])
    out = []
    for n in range(budget + 1):
        labels = locate(regions, Point2(x, y))
        out.append(labels)
        if not (math.isfinite(x) and math.isfinite(y)) or n == budget:
            break
        if labels & esc and all(max(abs(x - u), abs(y - v)) >= tol for u, v in anchors):
            break
        if direction is Direction.FORWARD:
            x, y = x * y + c, x
        else:
            if y == 0.0:
                break
            x, y = y, (x - c) / y
    return out
