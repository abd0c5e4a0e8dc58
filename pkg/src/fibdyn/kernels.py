"""Batch kernel selection and row-parallel dispatch.

The compiled ``_kernels`` extension is used when it imports; otherwise (or
with ``FIBDYN_PURE=1``) the numpy implementations in ``_fallback`` are used.
Both produce bit-identical outputs.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

ALPHA = _fallback.ALPHA
THETA = _fallback.THETA
CYCLE3 = _fallback.CYCLE3
ESCAPE = _fallback.ESCAPE
UNDECIDED = _fallback.UNDECIDED
BACKWARD_ESCAPE = _fallback.BACKWARD_ESCAPE
INVERSE_UNDEFINED = _fallback.INVERSE_UNDEFINED

try:
    if os.environ.get("FIBDYN_PURE"):
        raise ImportError("FIBDYN_PURE set")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build
    _impl = _fallback
    BACKEND = "python"

_NAMES = ("forward_escape", "backward_escape", "limit_forward_real", "limit_backward_real")


def backend(name: str | None = None):
    """Module implementing the kernels: 'compiled', 'python', or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def _split(n: int, workers: int) -> list[slice]:
    step = max(1, -(-n // workers))
    return [slice(i, min(n, i + step)) for i in range(0, n, step)]


def run_chunked(fn, arrays, args, workers: int = 1):
    """Apply ``fn(*chunk_arrays, *args)`` over contiguous chunks of the leading axis.

    Chunks are reassembled in order, so the result does not depend on
    ``workers``.
    """
    arrays = [np.ascontiguousarray(a, dtype=np.float64).ravel() for a in arrays]
    n = arrays[0].size
    if workers <= 1 or n < 2:
        return fn(*arrays, *args)
    parts = _split(n, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda s: fn(*(a[s] for a in arrays), *args), parts))
    if isinstance(results[0], tuple):
        return tuple(np.concatenate([r[i] for r in results]) for i in range(len(results[0])))
    return np.concatenate(results)


def forward_escape(xr, xi, yr, yi, c, R, budget, workers=1, impl=None):
    impl = impl or _impl
    c = complex(c)
    return run_chunked(impl.forward_escape, (xr, xi, yr, yi), (c.real, c.imag, float(R), int(budget)), workers)


def backward_escape(xr, xi, yr, yi, c, R, budget, workers=1, impl=None):
    impl = impl or _impl
    c = complex(c)
    return run_chunked(impl.backward_escape, (xr, xi, yr, yi), (c.real, c.imag, float(R), int(budget)), workers)


def limit_forward_real(x, y, c, a1, a2, budget, tol, workers=1, impl=None):
    impl = impl or _impl
    return run_chunked(impl.limit_forward_real, (x, y), (float(c), float(a1), float(a2), int(budget), float(tol)), workers)


def limit_backward_real(x, y, c, a1, a2, budget, tol, workers=1, impl=None):
    impl = impl or _impl
    return run_chunked(impl.limit_backward_real, (x, y), (float(c), float(a1), float(a2), int(budget), float(tol)), workers)
