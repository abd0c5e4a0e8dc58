"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --points 200000 --budget 1000
"""
import argparse
import time

import numpy as np

from fibdyn import kernels
from fibdyn.escape import escape_radii
from fibdyn.rng import SplitMix64


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--budget", type=int, default=1000)
    ap.add_argument("--c", type=float, default=0.22)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    try:
        compiled = kernels.backend("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    python = kernels.backend("python")

    c = args.c
    r = escape_radii(c)
    s = np.sqrt(1 - 4 * c)
    a1, a2 = (1 - s) / 2, (1 + s) / 2
    pts = SplitMix64(0, 0).uniform_box([-2.5] * 4, [2.5] * 4, 0, args.points).T.copy()
    xr, xi, yr, yi = pts
    zero = np.zeros_like(xr)
    cases = {
        "forward_escape (C^2)": lambda impl: kernels.forward_escape(xr, xi, yr, yi, c, r.R0, args.budget,
                                                                    args.workers, impl),
        "backward_escape (C^2)": lambda impl: kernels.backward_escape(xr, xi, yr, yi, c, r.R1, args.budget,
                                                                      args.workers, impl),
        "forward_escape (R^2)": lambda impl: kernels.forward_escape(xr, zero, yr, zero, c, r.R0, args.budget,
                                                                    args.workers, impl),
        "limit_forward_real": lambda impl: kernels.limit_forward_real(xr, yr, c, a1, a2, args.budget, 1e-6,
                                                                      args.workers, impl),
    }
    print(f"{args.points} points, budget {args.budget}, c={c}, workers={args.workers}")
    print(f"{'kernel':<24}{'compiled s':>12}{'python s':>12}{'speedup':>10}  identical")
    for name, run in cases.items():
        tc, oc = _best(lambda: run(compiled), args.repeat)
        tp, op = _best(lambda: run(python), args.repeat)
        if isinstance(oc, tuple):
            same = all(np.array_equal(a, b, equal_nan=True) for a, b in zip(oc, op))
        else:
            same = np.array_equal(oc, op)
        print(f"{name:<24}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x  {same}")


if __name__ == "__main__":
    main()
