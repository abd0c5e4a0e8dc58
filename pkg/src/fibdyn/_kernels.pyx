# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels; same contract as fibdyn._fallback."""
import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite, fabs

cnp.import_array()

DEF ALPHA = 0
DEF THETA = 1
DEF CYCLE3 = 2
DEF ESCAPE = 3
DEF UNDECIDED = 4
DEF BACKWARD_ESCAPE = 5
DEF INVERSE_UNDEFINED = 6


cdef inline bint _finite4(double a, double b, double c, double d) nogil:
    return isfinite(a) and isfinite(b) and isfinite(c) and isfinite(d)


def forward_escape(xr, xi, yr, yi, double cr, double ci, double R, long budget):
    cdef cnp.ndarray[double, ndim=1] axr = np.ascontiguousarray(xr, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] axi = np.ascontiguousarray(xi, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ayr = np.ascontiguousarray(yr, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ayi = np.ascontiguousarray(yi, dtype=np.float64).ravel()
    cdef Py_ssize_t m = axr.shape[0], k
    out = np.full(m, -1, dtype=np.int64)
    cdef cnp.int64_t[:] o = out
    cdef double a, b, p, q, ur, ui, R2 = R * R
    cdef long n
    with nogil:
        for k in range(m):
            a = axr[k]; b = axi[k]; p = ayr[k]; q = ayi[k]
            n = 0
            while True:
                if not _finite4(a, b, p, q) or (a * a + b * b > R2 and p * p + q * q > R2):
                    o[k] = n
                    break
                if n == budget:
                    break
                ur = a * p - b * q + cr
                ui = a * q + b * p + ci
                p = a; q = b
                a = ur; b = ui
                n += 1
    return out.reshape(np.shape(xr))


def backward_escape(xr, xi, yr, yi, double cr, double ci, double R, long budget):
    cdef cnp.ndarray[double, ndim=1] axr = np.ascontiguousarray(xr, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] axi = np.ascontiguousarray(xi, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ayr = np.ascontiguousarray(yr, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ayi = np.ascontiguousarray(yi, dtype=np.float64).ravel()
    cdef Py_ssize_t m = axr.shape[0], k
    index = np.full(m, -1, dtype=np.int64)
    status = np.zeros(m, dtype=np.int8)
    cdef cnp.int64_t[:] oi = index
    cdef cnp.int8_t[:] os = status
    cdef double a, b, p, q, mx, my, mn, mxn, nr, ni, d, vr, vi
    cdef double R2 = R * R
    cdef double iR2 = (1.0 / R) * (1.0 / R)
    cdef long n
    with nogil:
        for k in range(m):
            a = axr[k]; b = axi[k]; p = ayr[k]; q = ayi[k]
            n = 0
            while True:
                mx = a * a + b * b
                my = p * p + q * q
                mn = mx if mx < my else my
                mxn = mx if mx > my else my
                if (not _finite4(a, b, p, q)) or (p == 0.0 and q == 0.0) or (mn > 0.0 and mn < iR2 and mxn > R2):
                    oi[k] = n
                    os[k] = 1
                    break
                if n == budget:
                    break
                nr = a - cr
                ni = b - ci
                d = p * p + q * q
                vr = (nr * p + ni * q) / d
                vi = (ni * p - nr * q) / d
                a = p; b = q
                p = vr; q = vi
                n += 1
    return index.reshape(np.shape(xr)), status.reshape(np.shape(xr))


cdef inline bint _in_s(double x, double y, double a2, double one_c) nogil:
    return ((x >= a2 and y >= a2) or (x <= -1 and y >= one_c)
            or (x <= -1 and y <= -1) or (x >= one_c and y <= -1))


cdef inline bint _in_z(double x, double y, double a2, double one_c) nogil:
    return ((x >= 0 and x <= a2 and y >= a2)
            or (x >= -1 and x <= 0 and y >= one_c)
            or (x <= -1 and y >= 0 and y <= one_c)
            or (x <= -1 and y >= -1 and y <= 0)
            or (x >= -1 and x <= 0 and y <= -1)
            or (x >= 0 and x <= one_c and y <= -1)
            or (x >= one_c and y >= -1 and y <= 0)
            or (x >= one_c and y >= 0 and y <= a2))


cdef inline double _dmax(double a, double b) nogil:
    return a if a > b else b


def _limit(x, y, double c, double a1, double a2, long budget, double tol, bint backward):
    cdef cnp.ndarray[double, ndim=1] ax = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ay = np.ascontiguousarray(y, dtype=np.float64).ravel()
    cdef Py_ssize_t m = ax.shape[0], k
    code = np.full(m, UNDECIDED, dtype=np.int8)
    step = np.full(m, -1, dtype=np.int64)
    phase = np.full(m, -1, dtype=np.int8)
    cdef cnp.int8_t[:] oc = code
    cdef cnp.int64_t[:] ost = step
    cdef cnp.int8_t[:] oph = phase
    cdef double one_c = 1.0 + c
    cdef double tx[5]
    cdef double ty[5]
    cdef int nxt[5]
    cdef int cls_of[5]
    cdef double tol2 = 2.0 * tol
    cdef double px, py, t, dd
    cdef long n, entry_n
    cdef int j, cand, near, streak, entry_j, jfirst
    tx[0] = a1; ty[0] = a1
    tx[1] = a2; ty[1] = a2
    tx[2] = -1.0; ty[2] = -1.0
    tx[3] = one_c; ty[3] = -1.0
    tx[4] = -1.0; ty[4] = one_c
    cls_of[0] = ALPHA; cls_of[1] = THETA
    cls_of[2] = CYCLE3; cls_of[3] = CYCLE3; cls_of[4] = CYCLE3
    if backward:
        nxt[0] = 0; nxt[1] = 1; nxt[2] = 4; nxt[3] = 2; nxt[4] = 3
        jfirst = 1
    else:
        nxt[0] = 0; nxt[1] = 1; nxt[2] = 3; nxt[3] = 4; nxt[4] = 2
        jfirst = 0
    with nogil:
        for k in range(m):
            px = ax[k]; py = ay[k]
            cand = -1; streak = 0; entry_j = 0; entry_n = 0
            n = 0
            while True:
                if not (isfinite(px) and isfinite(py)):
                    oc[k] = BACKWARD_ESCAPE if backward else ESCAPE
                    ost[k] = n
                    break
                near = -1
                for j in range(jfirst, 5):
                    dd = _dmax(fabs(px - tx[j]), fabs(py - ty[j]))
                    if dd < tol:
                        near = j
                        break
                if cand >= 0:
                    dd = _dmax(fabs(px - tx[cand]), fabs(py - ty[cand]))
                    if dd < tol2:
                        streak += 1
                    else:
                        streak = 0
                        cand = -1
                if cand >= 0 and streak >= 10:
                    oc[k] = cls_of[entry_j]
                    ost[k] = n
                    if entry_j >= 2:
                        if backward:
                            oph[k] = <cnp.int8_t>(((entry_j - 2 + entry_n) % 3 + 3) % 3)
                        else:
                            oph[k] = <cnp.int8_t>(((entry_j - 2 - entry_n) % 3 + 3) % 3)
                    break
                if cand < 0 and near >= 0:
                    cand = near
                    streak = 0
                    entry_j = near
                    entry_n = n
                if near < 0:
                    if backward:
                        if _in_z(px, py, a2, one_c):
                            oc[k] = BACKWARD_ESCAPE
                            ost[k] = n
                            break
                    elif _in_s(px, py, a2, one_c):
                        oc[k] = ESCAPE
                        ost[k] = n
                        break
                if backward and py == 0.0:
                    oc[k] = INVERSE_UNDEFINED
                    ost[k] = n
                    break
                if n == budget:
                    break
                if cand >= 0:
                    cand = nxt[cand]
                if backward:
                    t = (px - c) / py
                    px = py
                    py = t
                else:
                    t = px * py + c
                    py = px
                    px = t
                n += 1
    return code, step, phase


def limit_forward_real(x, y, double c, double a1, double a2, long budget, double tol):
    return _limit(x, y, c, a1, a2, budget, tol, False)


def limit_backward_real(x, y, double c, double a1, double a2, long budget, double tol):
    return _limit(x, y, c, a1, a2, budget, tol, True)
