"""Command-line front end.

Subcommands ``denoise``, ``march``, ``oracle``, ``compare``,
``continue-analytic`` and ``kernel-table``. Every numeric flag can also be
given in a ``--config`` file as ``key = value`` (dashes or underscores);
flags on the command line win. Outputs are comma separated tables with
``# key=value`` headers.

Exit codes: 0 success, 2 configuration or input error, 3 numerical
divergence (partial output written), 4 I/O error.
"""

import argparse
import math
import sys

import numpy as np

from . import continuation as cont
from . import oracle
from .comparison import NoOverlapError, compare_fields, first_rows
from .geometry import (
    CausticAssumptionError,
    ConstantIndex,
    DegenerateCurveError,
    ExponentialIndex,
    SampledCurve,
    TabulatedIndex,
    curvature_profile,
    reparametrize_travel_time,
    with_derivatives,
)
from .kernel import autocorrelation_value, kernel_derivative, kernel_value
from .marching import SolverConfig, residual_diagnostics, solve, to_continuation_field
from .smoothing import denoise_curve
from .tables import Table, TableParseError, read_config, read_table, write_table

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4

CURVE_COLUMNS = ["u", "x", "y", "dx", "dy", "d2x", "d2y"]
FIELD_COLUMNS = ["x", "y", "u", "v"]


class ConfigError(ValueError):
    pass


class Params:
    """Look up a value: command-line flag, then config file, then default."""

    def __init__(self, args):
        self.args = args
        self.file = read_config(args.config) if getattr(args, "config", None) else {}

    def get(self, name, kind, default=None):
        value = getattr(self.args, name, None)
        if value is None and name in self.file:
            raw = self.file[name]
            try:
                value = kind(raw)
            except ValueError:
                raise ConfigError(f"config key {name}: cannot read {raw!r} as {kind.__name__}")
        return default if value is None else value


# --------------------------------------------------------------------------
# helpers


def _index_from(p):
    kind = p.get("index", str, "constant")
    n0 = p.get("index_n0", float, 1.0)
    if kind == "constant":
        return ConstantIndex(n0)
    if kind == "exponential":
        return ExponentialIndex(rate=p.get("index_rate", float, 1.0), n0=n0)
    if kind == "table":
        path = p.get("index_table", str)
        if path is None:
            raise ConfigError("index=table needs --index-table PATH (columns x,y,n)")
        tab = read_table(path)
        x, y, n = tab.column("x"), tab.column("y"), tab.column("n")
        xs, ys = np.unique(x), np.unique(y)
        if xs.size * ys.size != len(tab):
            raise ConfigError("index table must be a full rectilinear grid")
        values = np.full((xs.size, ys.size), np.nan)
        values[np.searchsorted(xs, x), np.searchsorted(ys, y)] = n
        return TabulatedIndex(xs, ys, values)
    raise ConfigError(f"unknown index {kind!r}; use constant, exponential or table")


def _index_meta(p):
    meta = {"index": p.get("index", str, "constant"), "index_n0": p.get("index_n0", float, 1.0)}
    if meta["index"] == "exponential":
        meta["index_rate"] = p.get("index_rate", float, 1.0)
    if meta["index"] == "table":
        meta["index_table"] = p.get("index_table", str)
    return meta


def _curve_table(curve, meta):
    data = np.column_stack([curve.params, curve.points, curve.derivs, curve.second_derivs])
    return Table(list(CURVE_COLUMNS), data, meta)


def _curve_from_table(tab, n, M):
    """A travel-time parameterised curve with ``M`` samples from a curve file."""
    if all(c in tab.columns for c in CURVE_COLUMNS) and len(tab) == M:
        cols = [tab.column(c) for c in CURVE_COLUMNS]
        return SampledCurve(
            cols[0],
            np.column_stack(cols[1:3]),
            np.column_stack(cols[3:5]),
            np.column_stack(cols[5:7]),
        )
    pts = np.column_stack([tab.column("x"), tab.column("y")])
    params = np.linspace(0.0, 1.0, len(tab))
    curve = with_derivatives(SampledCurve(params, pts))
    return reparametrize_travel_time(curve, n, M)


def _finish(table, args):
    table.meta.setdefault("seed", Params(args).get("seed", int, 0))
    write_table(args.out, table)
    return EXIT_OK


# --------------------------------------------------------------------------
# commands


def cmd_denoise(args):
    p = Params(args)
    lam = p.get("lam", float, 0.005)
    mu = p.get("mu", float, 0.1260)
    M = p.get("M", int, 101)
    n = _index_from(p)
    meta = {}
    if p.get("input", str) is not None:
        tab = read_table(p.get("input", str))
        xs, ys = tab.column("x"), tab.column("y")
        meta["source"] = p.get("input", str)
    else:
        seed = p.get("seed", int, 0)
        noise = p.get("noise", float, 0.05)
        count = p.get("samples", int, 31)
        t_min, t_max = p.get("t_min", float, -1.5), p.get("t_max", float, 2.2)
        _, xs, ys = oracle.noisy_tschirnhausen_samples(count, t_min, t_max, noise, seed)
        meta.update(source="tschirnhausen", seed=seed, noise=noise, samples=count, t_min=t_min, t_max=t_max)
    if xs.size < 3:
        raise ConfigError("need at least 3 input points")
    curve = denoise_curve(xs, ys, lam, mu, output_count=M)
    curve = reparametrize_travel_time(curve, n, M)
    speed = n.value(curve.x, curve.y) * curve.velocity()
    meta.update(
        lam=lam,
        mu=mu,
        M=M,
        total_travel_time=float(curve.params[-1]),
        max_velocity_error=float(np.max(np.abs(speed - 1.0))),
        **_index_meta(p),
    )
    return _finish(_curve_table(curve, meta), args)


def cmd_march(args):
    p = Params(args)
    config = SolverConfig(
        M=p.get("M", int, 101),
        N=p.get("N", int, 91),
        vstep=p.get("vstep", float, 0.005),
        lam=p.get("lam", float, 0.005),
        mu=p.get("mu", float, None),
        nu_visc=p.get("nu", float, 0.5),
        xi=p.get("xi", float, 0.9),
        center_rows=bool(p.get("center_rows", int, 1)),
    )
    n = _index_from(p)
    curve = _curve_from_table(read_table(p.get("input", str)), n, config.M)
    profile = curvature_profile(curve, n)
    grid = solve(curve, n, config, profile=profile)
    field = to_continuation_field(grid)
    meta = {
        "M": config.M,
        "N": config.N,
        "vstep": config.vstep,
        "lam": config.lam,
        "mu": config.resolve_mu(float(curve.params[0]), float(curve.params[-1])),
        "nu": config.nu_visc,
        "xi": config.xi,
        "center_rows": int(config.center_rows),
        "kappa_sign": profile.sign,
        "rows_completed": grid.rows_completed,
        "divergence": grid.divergence or "none",
        "seed": p.get("seed", int, 0),
        **_index_meta(p),
    }
    write_table(args.out, Table(list(FIELD_COLUMNS), field.as_array(), meta))
    if grid.rows_completed >= 3:
        rep = residual_diagnostics(grid, n)
        res_meta = {
            "max_first_form": rep.max_first_form,
            "max_orthogonality": rep.max_orthogonality,
            "seed": meta["seed"],
        }
        res_path = args.residuals or args.out + ".residuals.csv"
        data = np.column_stack([rep.v, rep.first_form, rep.orthogonality])
        write_table(res_path, Table(["v", "first_form", "orthogonality"], data, res_meta))
    if grid.divergence is not None:
        print(f"march diverged: {grid.divergence}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _span(p, prefix, lo, hi, count):
    lo = p.get(f"{prefix}_min", float, lo)
    hi = p.get(f"{prefix}_max", float, hi)
    count = p.get(f"{prefix}_count", int, count)
    if count < 1 or not hi >= lo:
        raise ConfigError(f"bad {prefix} range [{lo}, {hi}] with {count} points")
    return np.linspace(lo, hi, count)


def cmd_oracle(args):
    p = Params(args)
    name = args.name
    if name == "tschirnhausen":
        t = _span(p, "t", -1.5, 2.2, 75)
        s = _span(p, "s", 0.0, 0.5, 41)
        data = oracle.tschirnhausen_field(s, t)
        return _finish(Table(["x", "y", "u", "v", "t", "s"], data, {"oracle": name}), args)
    lam = _span(p, "lam", -2.0, 2.0, 41)
    mu = _span(p, "mu", 0.0, math.pi / 2, 21)
    if mu[0] < 0:
        raise ConfigError("mu must be non-negative")
    if name == "catenary":
        if mu[-1] > math.pi / 2:
            raise ConfigError("catenary needs mu <= pi/2")
        data = oracle.catenary_field(lam, mu)
        singular = np.array([oracle.catenary_is_singular(a, b) for a, b in data[:, 4:6]], dtype=float)
        data = np.column_stack([data, singular])
        return _finish(Table(["x", "y", "u", "v", "lam", "mu", "singular"], data, {"oracle": name}), args)
    curves = {
        "catenary-slope": oracle.catenary_slope_curve,
        "catenary-graph": oracle.catenary_graph_curve,
        "tschirnhausen": oracle.tschirnhausen_curve,
    }
    curve_name = p.get("curve", str, "catenary-slope")
    if curve_name not in curves:
        raise ConfigError(f"unknown curve {curve_name!r}; use {', '.join(curves)}")
    curve = curves[curve_name]()
    rows = []
    for a in lam:
        for b in mu:
            if b == 0:
                continue
            r = oracle.generic_continuation(curve, float(a), float(b))
            rows.append((r.x, r.y, r.w_re, r.w_im, a, b))
    meta = {"oracle": name, "curve": curve_name}
    return _finish(Table(["x", "y", "u", "v", "lam", "mu"], np.array(rows), meta), args)


def cmd_compare(args):
    p = Params(args)
    a = read_table(args.field_a)
    b = read_table(args.field_b)
    pick = lambda t: np.column_stack([t.column("x"), t.column("y"), t.column("v")])
    fa, fb = pick(a), pick(b)
    rows = p.get("rows", int, None)
    if rows is not None:
        fa = first_rows(fa, rows)
    radius = p.get("radius", float, 0.1)
    rep = compare_fields(fa, fb, radius)
    meta = {
        "radius": radius,
        "rows": rows if rows is not None else "all",
        "matched": rep.matched,
        "max_distance": rep.max_distance,
        "median_distance": rep.median_distance,
        "max_dv": rep.max_dv,
        "median_dv": rep.median_dv,
    }
    data = np.column_stack([rep.rows, rep.row_stats])
    cols = ["v", "count", "max_distance", "median_distance", "max_dv", "median_dv"]
    print(
        f"matched={rep.matched} median_distance={rep.median_distance:.6g} "
        f"median_dv={rep.median_dv:.6g} max_distance={rep.max_distance:.6g} max_dv={rep.max_dv:.6g}"
    )
    return _finish(Table(cols, data, meta), args)


def cmd_continue_analytic(args):
    p = Params(args)
    tab = read_table(p.get("input", str))
    h = tab.column("h")
    if "x" in tab.columns:
        x = tab.column("x")
        a, b = float(x[0]), float(x[-1])
        if x.size > 2 and not np.allclose(np.diff(x), (b - a) / (x.size - 1), rtol=1e-9, atol=1e-12):
            raise ConfigError("samples must be equally spaced in x")
    else:
        a, b = p.get("a", float, 0.0), p.get("b", float, 1.0)
    if h.size % 2 == 0:
        raise ConfigError(f"continuation needs an odd number of samples, got {h.size}; drop one sample")
    config = cont.ContinuationConfig(a, b, h.size, p.get("lam", float, 1e-3), p.get("L", float, 0.5))
    c = cont.continue_samples(h, config)
    rep = cont.inequality_report(c, h)
    half = config.spacing / 2
    xs = np.linspace(a - half, b + half, p.get("nx", int, 101))
    ys = np.linspace(-config.L, config.L, p.get("ny", int, 21))
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    H = cont.evaluate_continuation(c, xx.ravel(), yy.ravel())
    data = np.column_stack([xx.ravel(), yy.ravel(), H.real, H.imag])
    meta = {
        "a": a,
        "b": b,
        "N": config.N,
        "lam": config.lam,
        "L": config.L,
        "period": config.period,
        "discrepancy": rep.discrepancy,
        "discrepancy_bound": rep.discrepancy_bound,
        "discrepancy_ok": rep.discrepancy_ok,
        "strip_energy": rep.strip_energy,
        "strip_energy_bound": rep.strip_energy_bound,
        "strip_energy_ok": rep.strip_energy_ok,
    }
    return _finish(Table(["x", "y", "re", "im"], data, meta), args)


def cmd_kernel_table(args):
    p = Params(args)
    x = _span(p, "x", -10.0, 10.0, 401)
    data = np.column_stack(
        [x, kernel_value(x), kernel_derivative(x, 1), kernel_derivative(x, 2), autocorrelation_value(x)]
    )
    return _finish(Table(["x", "K", "K1", "K2", "L"], data, {"nu": math.pi / 8}), args)


# --------------------------------------------------------------------------
# argument parsing


def _common(sp):
    sp.add_argument("--config", help="key=value file; flags override it")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True, help="output table")


def _index_flags(sp):
    sp.add_argument("--index", choices=["constant", "exponential", "table"])
    sp.add_argument("--index-n0", dest="index_n0", type=float)
    sp.add_argument("--index-rate", dest="index_rate", type=float, help="n = n0 exp(rate y)")
    sp.add_argument("--index-table", dest="index_table", help="table with columns x,y,n")


def _range_flags(sp, prefix):
    for end in ("min", "max"):
        sp.add_argument(f"--{prefix}-{end}", dest=f"{prefix}_{end}", type=float)
    sp.add_argument(f"--{prefix}-count", dest=f"{prefix}_count", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="eikonal-shadow", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("denoise", help="smooth gross caustic samples and reparametrise by travel time")
    _common(sp)
    _index_flags(sp)
    sp.add_argument("--input", help="table with x,y columns; default: seeded noisy Tschirnhausen samples")
    sp.add_argument("--lam", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--M", type=int)
    sp.add_argument("--noise", type=float)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--t-min", dest="t_min", type=float)
    sp.add_argument("--t-max", dest="t_max", type=float)
    sp.set_defaults(func=cmd_denoise)

    sp = sub.add_parser("march", help="march the hodograph system from a caustic")
    _common(sp)
    _index_flags(sp)
    sp.add_argument("--input", required=True)
    sp.add_argument("--residuals", help="residual report path (default OUT.residuals.csv)")
    for name, kind in (("M", int), ("N", int), ("vstep", float), ("lam", float), ("mu", float), ("nu", float), ("xi", float)):
        sp.add_argument(f"--{name}", type=kind)
    sp.add_argument("--center-rows", dest="center_rows", type=int, choices=[0, 1],
                    help="1 (default): differentiate mean-removed rows; 0: apply D to raw rows")
    sp.set_defaults(func=cmd_march)

    sp = sub.add_parser("oracle", help="closed-form shadow continuations")
    _common(sp)
    sp.add_argument("name", choices=["tschirnhausen", "catenary", "generic"])
    sp.add_argument("--curve", help="generic: catenary-slope, catenary-graph or tschirnhausen")
    for prefix in ("t", "s", "lam", "mu"):
        _range_flags(sp, prefix)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("compare", help="match field_b points to field_a and report |dv|")
    _common(sp)
    sp.add_argument("field_a")
    sp.add_argument("field_b")
    sp.add_argument("--radius", type=float)
    sp.add_argument("--rows", type=int, help="use only the first ROWS v-levels of field_a")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("continue-analytic", help="trigonometric continuation of samples into a strip")
    _common(sp)
    sp.add_argument("--input", required=True, help="table with column h (and optionally x)")
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--lam", type=float)
    sp.add_argument("--L", type=float)
    sp.add_argument("--nx", type=int)
    sp.add_argument("--ny", type=int)
    sp.set_defaults(func=cmd_continue_analytic)

    sp = sub.add_parser("kernel-table", help="samples of K, K', K'' and L")
    _common(sp)
    _range_flags(sp, "x")
    sp.set_defaults(func=cmd_kernel_table)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CausticAssumptionError as exc:
        print(f"caustic assumption violated at sample {exc.index}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TableParseError, ConfigError, NoOverlapError, DegenerateCurveError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
