"""Command-line entry point: ``fibdyn <command> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on bad usage.
"""
from __future__ import annotations

import json
import sys

import click

from .core import ParamContext
from .errors import FibDynError, InvalidSpec, ParameterOutOfRange, UnsupportedFormat


class Complex(click.ParamType):
    name = "re[,im]"

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        from .render import parse_complex

        try:
            return parse_complex(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


COMPLEX = Complex()


def _floats(text: str, n: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise click.BadParameter(f"{what} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise click.BadParameter(f"{what} must be {n} comma-separated numbers")
    return vals


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise click.BadParameter("size must look like 512x512") from None
    return w, h


def _real(c: complex, what: str) -> float:
    if c.imag != 0:
        raise click.BadParameter(f"{what} needs a real parameter")
    return c.real


def _cjson(v):
    v = complex(v)
    return [v.real, v.imag]


def _usage_errors(fn):
    # library-level input errors are usage errors for the CLI
    def wrapper(*a, **kw):
        try:
            return fn(*a, **kw)
        except (InvalidSpec, UnsupportedFormat, ParameterOutOfRange) as exc:
            raise click.UsageError(str(exc)) from None

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Dynamics of f_c(x, y) = (xy + c, x)."""


@cli.command()
@click.option("--mode", required=True, help="kplus-real, kminus-real, kplus-complex-slice, nested(n), limit-classes")
@click.option("--c", "c", type=COMPLEX, required=True)
@click.option("--window", required=True, help="x0,x1,y0,y1")
@click.option("--size", required=True, help="WxH")
@click.option("--budget", type=int, default=1000, show_default=True)
@click.option("--y0", type=COMPLEX, default=None, help="slice height for kplus-complex-slice")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, allow_dash=True), required=True)
@click.option("--format", "fmt", type=click.Choice(["ppm", "csv", "json-meta"]), default="ppm", show_default=True)
@_usage_errors
def render(mode, c, window, size, budget, y0, seed, workers, out, fmt):
    """Classify a pixel grid and write it as PPM, CSV or JSON metadata."""
    from .render import RasterSpec, encode_output, parse_mode, rasterize

    name, extra = parse_mode(mode)
    if y0 is not None:
        extra["y0"] = y0
    w, h = _size(size)
    spec = RasterSpec(name, c, _floats(window, 4, "window"), w, h, budget, seed=seed, **extra)
    data = encode_output(rasterize(spec, workers=workers), fmt, spec=spec)
    with click.open_file(out, "wb") as fh:
        fh.write(data)


@cli.command("fixed-points")
@click.option("--c", "c", type=COMPLEX, required=True)
def fixed_points_cmd(c):
    """Fixed points and the 3-cycle with their multipliers, as JSON."""
    from .spectral import fixed_points, three_cycle

    fp = fixed_points(c)
    cyc = three_cycle(c.real if c.imag == 0 else c)
    doc = {
        "c": _cjson(c),
        "degenerate": fp.degenerate,
        "nonreal": fp.nonreal,
        "fixed_points": [
            {
                "which": p.which,
                "location": [_cjson(p.location.x), _cjson(p.location.y)],
                "eigenvalues": [_cjson(v) for v in p.eigenvalues],
                "kind": p.kind.value,
                "near_unit": p.near_unit,
            }
            for p in fp.points
        ],
        "cycle3": {
            "points": [[_cjson(p.x), _cjson(p.y)] for p in cyc.points],
            "multiplier_matrix": [[_cjson(v) for v in row] for row in cyc.multiplier_matrix],
            "multiplier_eigenvalues": [_cjson(v) for v in cyc.multiplier_eigenvalues],
            "kind": cyc.kind.value,
        },
    }
    click.echo(json.dumps(doc, indent=2))


@cli.group()
def verify():
    """Verification suites; exit status 1 on failure."""


@verify.command("transitions")
@click.option("--c", "c", type=COMPLEX, required=True)
@click.option("--depth", type=int, default=30, show_default=True)
@_usage_errors
def verify_transitions(c, depth):
    """Certify the region transition tables with exact arithmetic."""
    from .partition.certify import verify_transition_tables

    report = verify_transition_tables(_real(c, "verify transitions"), max_depth=depth)
    click.echo(report.table())
    sys.exit(0 if report.passed else 1)


@verify.command("decomposition")
@click.option("--c", "c", type=COMPLEX, required=True)
@click.option("--budget", type=int, default=10_000, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_usage_errors
def verify_decomposition(c, budget, workers):
    """Sampling checks of the K+ and K- decompositions (real 0 < c < 1/4)."""
    from .manifolds import verify_kminus_decomposition, verify_kplus_decomposition

    ctx = ParamContext(_real(c, "verify decomposition"))
    kp = verify_kplus_decomposition(ctx, budget=budget, workers=workers)
    click.echo(f"K+ grid classes      {kp.grid_counts}")
    click.echo(f"K+ interior          {kp.interior_tested - kp.interior_failed}/{kp.interior_tested} Alpha")
    click.echo(f"K+ boundary          theta={kp.boundary_theta} cycle={kp.boundary_cycle} "
               f"undecided={kp.boundary_undecided} failed={kp.boundary_failed} "
               f"success={kp.boundary_success:.3f}")
    click.echo(f"K+                   {'PASS' if kp.ok else 'FAIL'}")
    km = verify_kminus_decomposition(ctx, budget=min(budget, 1000), workers=workers)
    click.echo(f"K- grid              {km.grid_passed}/{km.grid_bounded} of {km.grid_points} points backward-bounded")
    click.echo(f"K- anchors           {km.anchors_passed}/{km.anchors_bounded} of {km.anchors}")
    click.echo(f"K-                   {'PASS' if km.ok else 'FAIL'}  fraction={km.fraction:.4f}")
    sys.exit(0 if kp.ok and km.ok else 1)


@verify.command("escape")
@click.option("--c", "c", type=COMPLEX, required=True)
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--n-max", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_usage_errors
def verify_escape(c, samples, n_max, seed):
    """Nested-set probes in both directions and the compactness probe."""
    from .escape import compactness_probe, escape_radii, nested_backward_probe, nested_forward_probe

    ctx = ParamContext(c)
    r = escape_radii(c)
    click.echo(f"radii R0={r.R0:.6g} R1={r.R1:.6g} R2={r.R2:.6g}")
    ok = True
    for probe in (nested_forward_probe, nested_backward_probe):
        rep = probe(ctx, n_max=n_max, sample_count=samples, seed=seed)
        ok &= rep.ok
        click.echo(f"nested {rep.direction:<8} R={rep.R:.6g} violations={len(rep.violations)} "
                   f"survivors={rep.survivors}  {'PASS' if rep.ok else 'FAIL'}")
    comp = compactness_probe(ctx, sample_count=samples, seed=seed)
    ok &= comp.ok
    click.echo(f"compact  hits={comp.hits} max_norm={comp.max_norm:.6g} bound={comp.R ** 3:.6g}  "
               f"{'PASS' if comp.ok else 'FAIL'}")
    sys.exit(0 if ok else 1)


@cli.command()
@click.option("--c", "c", type=COMPLEX, required=True)
@click.option("--set", "which", type=click.Choice(["kplus", "kminus", "k"]), required=True)
@click.option("--box", required=True, help="real:x0,x1,y0,y1 | complex:<8 numbers> | polydisk:r[@xr,xi,yr,yi]")
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=int, default=1000, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--header/--no-header", default=True, show_default=True)
@_usage_errors
def measure(c, which, box, samples, seed, budget, workers, header):
    """Monte Carlo estimate of the set's measure inside a box, as a CSV row."""
    from .measure import CSV_HEADER, mc_measure
    import csv

    sel = {"kplus": "Kplus", "kminus": "Kminus", "k": "K"}[which]
    est = mc_measure(ParamContext(c), sel, box, samples, seed, budget, workers)
    w = csv.writer(sys.stdout, lineterminator="\n")
    if header:
        w.writerow(CSV_HEADER)
    w.writerow(est.csv_fields())


@cli.command()
@click.option("--c", "c", type=COMPLEX, required=True)
@click.option("--base", type=click.Choice(["theta", "p1", "p2", "p3"]), default="theta", show_default=True)
@click.option("--side", type=click.Choice(["stable", "unstable"]), required=True)
@click.option("--arc-tol", type=float, default=1e-3, show_default=True)
@click.option("--max-arclen", type=float, default=100.0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, allow_dash=True), required=True)
@_usage_errors
def trace(c, base, side, arc_tol, max_arclen, out):
    """Trace both branches of a stable or unstable manifold to CSV."""
    from .manifolds import curves_to_csv, saddle_frame, trace_both

    frame = saddle_frame(ParamContext(_real(c, "trace")), base)
    curves = trace_both(frame, side, arc_tol=arc_tol, max_arclen=max_arclen)
    with click.open_file(out, "w") as fh:
        fh.write(curves_to_csv(curves))
    for cv in curves:
        click.echo(f"branch {cv.branch:+d}: {len(cv.vertices)} vertices, arclength {cv.arclength:.4g}, "
                   f"stop={cv.stop_reason}", err=True)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="fibdyn", standalone_mode=True)
    except FibDynError as exc:  # pragma: no cover - remaining library errors
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":  # pragma: no cover
    main()
