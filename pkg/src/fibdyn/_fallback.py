"""Pure numpy implementations of the batch kernels.

Same signatures and bit-identical results as the compiled ``_kernels``
module: every per-point operation is the same IEEE sequence (no fused
multiply-add, no reassociation), only vectorized over the active points.
"""
from __future__ import annotations

import numpy as np

ALPHA, THETA, CYCLE3, ESCAPE, UNDECIDED, BACKWARD_ESCAPE, INVERSE_UNDEFINED = range(7)

BOUNDED, ESCAPED, UNDEFINED = 0, 1, 2


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def forward_escape(xr, xi, yr, yi, cr, ci, R, budget):
    """First n <= budget with min(|x_n|, |y_n|) > R (or a non-finite x_n); -1 if none."""
    xr, xi, yr, yi = (_f64(a).copy() for a in (xr, xi, yr, yi))
    out = np.full(xr.shape, -1, dtype=np.int64)
    idx = np.arange(xr.size)
    xr, xi, yr, yi = xr.ravel(), xi.ravel(), yr.ravel(), yi.ravel()
    flat = out.ravel()
    R2 = R * R
    with np.errstate(all="ignore"):
        for n in range(budget + 1):
            mx = xr * xr + xi * xi
            my = yr * yr + yi * yi
            bad = ~(np.isfinite(xr) & np.isfinite(xi) & np.isfinite(yr) & np.isfinite(yi))
            hit = bad | ((mx > R2) & (my > R2))
            if hit.any():
                flat[idx[hit]] = n
                keep = ~hit
                idx, xr, xi, yr, yi = idx[keep], xr[keep], xi[keep], yr[keep], yi[keep]
                if idx.size == 0:
                    break
            if n == budget:
                break
            ur = xr * yr - xi * yi + cr
            ui = xr * yi + xi * yr + ci
            yr, yi = xr, xi
            xr, xi = ur, ui
    return out


def backward_escape(xr, xi, yr, yi, cr, ci, R, budget):
    """First n <= budget with f^-n(z) in G_R; returns (index, status)."""
    xr, xi, yr, yi = (_f64(a).copy().ravel() for a in (xr, xi, yr, yi))
    shape = np.shape(xr)
    index = np.full(xr.size, -1, dtype=np.int64)
    status = np.zeros(xr.size, dtype=np.int8)
    idx = np.arange(xr.size)
    R2 = R * R
    iR2 = (1.0 / R) * (1.0 / R)
    with np.errstate(all="ignore"):
        for n in range(budget + 1):
            mx = xr * xr + xi * xi
            my = yr * yr + yi * yi
            bad = ~(np.isfinite(xr) & np.isfinite(xi) & np.isfinite(yr) & np.isfinite(yi))
            line = (yr == 0.0) & (yi == 0.0)
            mn = np.minimum(mx, my)
            mxn = np.maximum(mx, my)
            band = (mn > 0.0) & (mn < iR2) & (mxn > R2)
            hit = bad | line | band
            if hit.any():
                index[idx[hit]] = n
                status[idx[hit]] = ESCAPED
                keep = ~hit
                idx, xr, xi, yr, yi = idx[keep], xr[keep], xi[keep], yr[keep], yi[keep]
                if idx.size == 0:
                    break
            if n == budget:
                break
            # (x, y) -> (y, (x - c)/y), complex division written out
            nr = xr - cr
            ni = xi - ci
            d = yr * yr + yi * yi
            vr = (nr * yr + ni * yi) / d
            vi = (ni * yr - nr * yi) / d
            xr, xi = yr, yi
            yr, yi = vr, vi
    return index.reshape(shape), status.reshape(shape)


def _limit(x, y, c, a1, a2, budget, tol, backward):
    x = _f64(x).copy().ravel()
    y = _f64(y).copy().ravel()
    n_pts = x.size
    code = np.full(n_pts, UNDECIDED, dtype=np.int8)
    step = np.full(n_pts, -1, dtype=np.int64)
    phase = np.full(n_pts, -1, dtype=np.int8)
    one_c = 1.0 + c
    # targets: 0 alpha, 1 theta, 2 p, 3 f(p), 4 f^2(p)
    tx = np.array([a1, a2, -1.0, one_c, -1.0])
    ty = np.array([a1, a2, -1.0, -1.0, one_c])
    if backward:
        nxt = np.array([0, 1, 4, 2, 3])
        active_targets = np.array([False, True, True, True, True])
    else:
        nxt = np.array([0, 1, 3, 4, 2])
        active_targets = np.array([True, True, True, True, True])
    cls_of = np.array([ALPHA, THETA, CYCLE3, CYCLE3, CYCLE3], dtype=np.int8)
    tol2 = 2.0 * tol

    idx = np.arange(n_pts)
    cand = np.full(n_pts, -1, dtype=np.int64)
    streak = np.zeros(n_pts, dtype=np.int64)
    entry_j = np.zeros(n_pts, dtype=np.int64)
    entry_n = np.zeros(n_pts, dtype=np.int64)

    def retire(mask, cls, n, ph=None):
        nonlocal idx, x, y, cand, streak, entry_j, entry_n
        code[idx[mask]] = cls if np.isscalar(cls) else cls[mask]
        step[idx[mask]] = n
        if ph is not None:
            phase[idx[mask]] = ph[mask]
        keep = ~mask
        idx, x, y = idx[keep], x[keep], y[keep]
        cand, streak = cand[keep], streak[keep]
        entry_j, entry_n = entry_j[keep], entry_n[keep]

    with np.errstate(all="ignore"):
        for n in range(budget + 1):
            if idx.size == 0:
                break
            bad = ~(np.isfinite(x) & np.isfinite(y))
            if bad.any():
                retire(bad, BACKWARD_ESCAPE if backward else ESCAPE, n)
            # distance (max norm) to every target
            dist = np.maximum(np.abs(x[:, None] - tx[None, :]), np.abs(y[:, None] - ty[None, :]))
            near_mask = (dist < tol) & active_targets[None, :]
            near = np.where(near_mask.any(axis=1), near_mask.argmax(axis=1), -1)
            has = cand >= 0
            safe = np.where(has, cand, 0)
            ok = has & (dist[np.arange(idx.size), safe] < tol2)
            streak = np.where(ok, streak + 1, 0)
            cand = np.where(ok, cand, -1)
            done = ok & (streak >= 10)
            if done.any():
                ej = entry_j
                ph = np.where(ej >= 2, (ej - 2 - (entry_n if not backward else -entry_n)) % 3, -1).astype(np.int8)
                retire(done, cls_of[ej], n, ph)
                near = near[~done]
            start = (cand < 0) & (near >= 0)
            cand = np.where(start, near, cand)
            streak = np.where(start, 0, streak)
            entry_j = np.where(start, near, entry_j)
            entry_n = np.where(start, n, entry_n)
            if backward:
                inz = (
                    ((x >= 0) & (x <= a2) & (y >= a2))
                    | ((x >= -1) & (x <= 0) & (y >= one_c))
                    | ((x <= -1) & (y >= 0) & (y <= one_c))
                    | ((x <= -1) & (y >= -1) & (y <= 0))
                    | ((x >= -1) & (x <= 0) & (y <= -1))
                    | ((x >= 0) & (x <= one_c) & (y <= -1))
                    | ((x >= one_c) & (y >= -1) & (y <= 0))
                    | ((x >= one_c) & (y >= 0) & (y <= a2))
                )
            else:
                inz = (
                    ((x >= a2) & (y >= a2))
                    | ((x <= -1) & (y >= one_c))
                    | ((x <= -1) & (y <= -1))
                    | ((x >= one_c) & (y <= -1))
                )
            esc = inz & (near < 0)
            if esc.any():
                retire(esc, BACKWARD_ESCAPE if backward else ESCAPE, n)
                near = near[~esc]
            if backward:
                dead = y == 0.0
                if dead.any():
                    retire(dead, INVERSE_UNDEFINED, n)
            if n == budget or idx.size == 0:
                break
            cand = np.where(cand >= 0, nxt[np.where(cand >= 0, cand, 0)], -1)
            if backward:
                x, y = y, (x - c) / y
            else:
                x, y = x * y + c, x
    return code, step, phase


def limit_forward_real(x, y, c, a1, a2, budget, tol):
    return _limit(x, y, c, a1, a2, budget, tol, backward=False)


def limit_backward_real(x, y, c, a1, a2, budget, tol):
    return _limit(x, y, c, a1, a2, budget, tol, backward=True)
