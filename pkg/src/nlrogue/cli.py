"""Command line front end.

Subcommands:

    field    evaluate a wave on a grid, write CSV / JSON / PPM
    verify   run verification suites, exit nonzero on any failure
    coeffs   print expansion coefficient families at a point
    census   count singular peaks of an evaluated wave
    figures  render every preset into a directory

Exit codes: 0 success, 1 verification or census failure, 2 configuration
error, 3 numeric failure (overflow or unexpected non-finite output).
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .chain import DELTA_POLE
from .expansion import generating_wave, scalar_wave, series_tables, vector_wave
from .fields import FieldGrid, compute_field
from .jets import NumericOverflowError
from .presets import PRESETS, get_preset
from .suites import SUITES, run_suites
from .verify import pole_census, residual_report


class ConfigError(Exception):
    pass


def _parse_complex(tok):
    tok = tok.strip().replace("i", "j")
    if not tok:
        raise ConfigError("empty complex entry")
    try:
        return complex(tok)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {tok!r}") from None


def _parse_rows(text):
    """Seed rows: ';' separates expansion orders, ',' separates components."""
    rows = [r for r in text.split(";") if r.strip()]
    if not rows:
        raise ConfigError("no seed rows given")
    parsed = [tuple(_parse_complex(c) for c in row.split(",")) for row in rows]
    widths = {len(r) for r in parsed}
    if len(widths) != 1:
        raise ConfigError("seed rows must all have the same component count")
    return parsed


def _parse_floats(text):
    return tuple(float(c) for c in text.split(",") if c.strip())


def _spec_from_flags(args):
    if args.omega is not None and args.generating_l is not None:
        raise ConfigError("give either --omega or --generating-l, not both")
    if args.omega is not None:
        rows = _parse_rows(args.omega)
        width = len(rows[0])
        if width == 2:
            return scalar_wave(args.rho, args.order, rows)
        if width == 3:
            return vector_wave(args.rho, args.order, rows)
        raise ConfigError("seed rows must have 2 or 3 components")
    if args.generating_l is not None:
        l = tuple(_parse_complex(c) for c in args.generating_l.split(","))
        if len(l) != 3:
            raise ConfigError("--generating-l needs 3 components")
        r = _parse_floats(args.generating_r) if args.generating_r else ()
        s = _parse_floats(args.generating_s) if args.generating_s else ()
        return generating_wave(args.rho, args.order, l, r, s)
    raise ConfigError("no wave given: use --preset, --omega, or --generating-l")


def _grid_from_flags(args, default=None):
    if args.window is not None:
        x0, x1, t0, t1 = args.window
        grid = FieldGrid(x0, x1, args.nx, t0, t1, args.nt)
    elif default is not None:
        grid = default
    else:
        raise ConfigError("no grid given: use --preset or --window")
    if args.refine > 1:
        grid = grid.refined(args.refine)
    return grid


def _load_config(args):
    """Fold a JSON config file into the argparse namespace and backfill
    defaults: explicit flags beat the config, the config beats defaults."""
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        spec = cfg.get("spec", {})
        if args.omega is None and "omega" in spec:
            # Components may be "1+2i" strings or [re, im] pairs.
            rows = []
            for row in spec["omega"]:
                comps = [
                    complex(c[0], c[1]) if isinstance(c, list) else _parse_complex(str(c))
                    for c in row
                ]
                rows.append(",".join(str(c).strip("()") for c in comps))
            args.omega = ";".join(rows)
        if args.generating_l is None and "generating" in spec:
            gen = spec["generating"]
            args.generating_l = ",".join(str(c) for c in gen["l"])
            if gen.get("r"):
                args.generating_r = ",".join(str(v) for v in gen["r"])
            if gen.get("s"):
                args.generating_s = ",".join(str(v) for v in gen["s"])
        if args.rho is None and "rho" in spec:
            args.rho = float(spec["rho"])
        if args.order is None and "order" in spec:
            args.order = int(spec["order"])
        g = cfg.get("grid")
        if g:
            if args.window is None:
                args.window = (float(g["x0"]), float(g["x1"]), float(g["t0"]), float(g["t1"]))
            if args.nx is None and "nx" in g:
                args.nx = int(g["nx"])
            if args.nt is None and "nt" in g:
                args.nt = int(g["nt"])
        out = cfg.get("outputs", {})
        args.csv = args.csv or out.get("csv")
        args.json = args.json or out.get("json")
        args.ppm = args.ppm or out.get("ppm")
        th = cfg.get("thresholds", {})
        if args.pole_threshold is None and "pole" in th:
            args.pole_threshold = float(th["pole"])
        if args.census_threshold is None and "census" in th:
            args.census_threshold = float(th["census"])
        if args.threads is None and "threads" in cfg:
            args.threads = int(cfg["threads"])
    if args.rho is None:
        args.rho = 1.0
    if args.order is None:
        args.order = 1
    if args.nx is None:
        args.nx = 201
    if args.nt is None:
        args.nt = 201
    if args.threads is None:
        args.threads = 1
    if args.pole_threshold is None:
        args.pole_threshold = DELTA_POLE


def _describe_spec(spec):
    d = {
        "rho": spec.setup.rho,
        "dim": spec.setup.dim,
        "order": spec.order,
    }
    if spec.omega is not None:
        d["omega"] = [[[c.real, c.imag] for c in row] for row in spec.omega]
    else:
        g = spec.generating
        d["generating"] = {
            "l": [[c.real, c.imag] for c in g.l],
            "r": list(g.r),
            "s": list(g.s),
        }
    return d


def write_csv(path, field_):
    """t-major rows; re/im/abs per component with round-trip formatting;
    pole cells carry 'inf' in every value column."""
    xs = field_.grid.xs()
    ts = field_.grid.ts()
    ncomp = field_.values.shape[-1]
    header = ["x", "t"]
    for i in range(1, ncomp + 1):
        header += [f"re{i}", f"im{i}", f"abs{i}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r, tv in enumerate(ts):
            for c, xv in enumerate(xs):
                row = [repr(float(xv)), repr(float(tv))]
                if field_.pole_level[r, c] >= 0:
                    row += ["inf"] * (3 * ncomp)
                else:
                    for i in range(ncomp):
                        z = field_.values[r, c, i]
                        row += [repr(float(z.real)), repr(float(z.imag)), repr(float(abs(z)))]
                w.writerow(row)


# Three-stop color ramp for the magnitude maps; poles get magenta.
_RAMP = np.array([[13, 8, 64], [32, 144, 140], [250, 230, 85]], dtype=float)
_POLE_RGB = np.array([255, 0, 255], dtype=np.uint8)


def write_ppm(path, field_, clip, component=None):
    """Binary P6 map of log-scaled magnitude, clipped at clip; the top
    pixel row is the largest t."""
    mags = field_.magnitudes
    m = mags[..., component] if component is not None else np.linalg.norm(mags, axis=-1)
    bad = (field_.pole_level >= 0) | ~np.isfinite(m)
    u = np.log10(1.0 + np.clip(np.where(bad, 0.0, m), 0.0, clip))
    u /= math.log10(1.0 + clip)
    seg = np.clip(u * 2.0, 0.0, 2.0)
    lo = np.clip(seg.astype(int), 0, 1)
    frac = (seg - lo)[..., None]
    rgb = _RAMP[lo] * (1.0 - frac) + _RAMP[lo + 1] * frac
    img = np.clip(rgb, 0, 255).astype(np.uint8)
    img[bad] = _POLE_RGB
    img = img[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        fh.write(img.tobytes())


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_meta(path, meta):
    Path(path).write_text(json.dumps(_plain(meta), sort_keys=True, indent=2) + "\n")


def _census_dict(census):
    return {
        "threshold": census.threshold,
        "n_clusters": census.n_clusters,
        "n_bounded": census.n_bounded,
        "clusters": [{"x": c.x, "t": c.t, "size": c.size} for c in census.clusters],
        "bounded": [
            {"x": b.x, "t": b.t, "magnitude": b.magnitude} for b in census.bounded
        ],
    }


def _resolve(args):
    """(spec, grid, census_threshold, bounded_floor) from preset and flags."""
    preset = get_preset(args.preset) if args.preset else None
    if preset is not None:
        spec = preset.spec
        grid = _grid_from_flags(args, default=preset.window)
        thr = args.census_threshold or preset.census_threshold
        floor = preset.bounded_floor
    else:
        spec = _spec_from_flags(args)
        grid = _grid_from_flags(args)
        thr = args.census_threshold or 10.0 * max(1.0, spec.setup.rho)
        floor = None
    return spec, grid, thr, floor


def cmd_field(args):
    _load_config(args)
    spec, grid, thr, _ = _resolve(args)
    field_ = compute_field(
        spec, grid, threads=args.threads, sign=args.sign, delta_pole=args.pole_threshold
    )
    finite = np.isfinite(field_.values) | (field_.pole_level[..., None] >= 0)
    if not finite.all():
        print("non-finite values outside flagged poles", file=sys.stderr)
        return 3
    if args.csv:
        write_csv(args.csv, field_)
    if args.ppm:
        write_ppm(args.ppm, field_, clip=thr, component=args.component)
    if args.json:
        meta = {
            "spec": _describe_spec(spec),
            "grid": asdict(grid),
            "threads": args.threads,
            "pole_cells": int((field_.pole_level >= 0).sum()),
            "census": _census_dict(pole_census(field_, thr)),
            "version": __version__,
        }
        write_meta(args.json, meta)
    if not (args.csv or args.ppm or args.json):
        m = np.linalg.norm(field_.magnitudes, axis=-1)
        m = m[np.isfinite(m)]
        print(
            json.dumps(
                {
                    "max_magnitude": float(m.max()),
                    "pole_cells": int((field_.pole_level >= 0).sum()),
                },
                sort_keys=True,
            )
        )
    return 0


def cmd_verify(args):
    if args.update_sign is not None:
        p = get_preset("fig1")
        g = p.window
        rep = residual_report(
            p.spec,
            (g.x0, g.x1, g.t0, g.t1),
            n_points=30,
            sign=args.update_sign,
        )
        line = "PASS" if rep.passed else "FAIL"
        print(
            f"[{line}] fig1 residuals with update sign {args.update_sign:+d}: "
            f"max {rep.details['max_fine']:.3e}"
        )
        return 0 if rep.passed else 1
    names = args.suite or list(SUITES)
    for n in names:
        if n not in SUITES:
            raise ConfigError(f"unknown suite {n!r}; have {sorted(SUITES)}")
    results = run_suites(names)
    for r in results:
        print(r.line())
        if args.verbose:
            print(json.dumps(_plain(r.details), sort_keys=True, indent=2))
    return 0 if all(r.passed for r in results) else 1


def cmd_coeffs(args):
    tables = series_tables(args.n_max, args.rho, args.x, args.t, dim=args.dim)
    out = {
        "rho": args.rho,
        "x": args.x,
        "t": args.t,
        "alpha": [float(v) for v in tables.alpha],
        "beta": [float(v) for v in tables.beta],
        "gamma": [float(v) for v in tables.gamma],
        "theta": [float(v) for v in tables.theta],
    }
    if args.dim == 3:
        out["third_x"] = [[v.real, v.imag] for v in tables.a3.astype(complex)]
        out["third_t"] = [[v.real, v.imag] for v in tables.rho3]
    print(json.dumps(_plain(out), sort_keys=True, indent=2))
    return 0


def cmd_census(args):
    _load_config(args)
    spec, grid, thr, floor = _resolve(args)
    field_ = compute_field(spec, grid, threads=args.threads, delta_pole=args.pole_threshold)
    census = pole_census(field_, thr, bounded_floor=floor)
    print(json.dumps(_plain(_census_dict(census)), sort_keys=True, indent=2))
    if args.expect_clusters is not None and census.n_clusters != args.expect_clusters:
        return 1
    return 0


def cmd_figures(args):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = args.presets or sorted(PRESETS)
    for name in names:
        p = get_preset(name)
        field_ = compute_field(p.spec, p.window, threads=args.threads)
        census = pole_census(field_, p.census_threshold, bounded_floor=p.bounded_floor)
        write_csv(outdir / f"{name}.csv", field_)
        write_ppm(outdir / f"{name}.ppm", field_, clip=p.census_threshold)
        write_meta(
            outdir / f"{name}.json",
            {
                "spec": _describe_spec(p.spec),
                "census": _census_dict(census),
                "notes": p.notes,
                "version": __version__,
            },
        )
        print(f"{name}: {census.n_clusters} singular, {census.n_bounded} bounded")
    return 0


def _add_spec_flags(sp):
    # Defaults are filled after the config file is folded in, so that an
    # explicit flag always beats the config and the config beats defaults.
    sp.add_argument("--preset", choices=sorted(PRESETS), help="canonical configuration")
    sp.add_argument("--rho", type=float, default=None, help="background amplitude (default 1)")
    sp.add_argument("--order", type=int, default=None, help="dressing steps (default 1)")
    sp.add_argument(
        "--omega",
        help="seed rows, e.g. '1,0;0,1000i' (';' between orders, ',' between components)",
    )
    sp.add_argument("--generating-l", help="3-component direction, e.g. '5e7,5e7,1'")
    sp.add_argument("--generating-r", help="x-shift coefficients, e.g. '0,1.5'")
    sp.add_argument("--generating-s", help="t-shift coefficients, e.g. '0,400,300'")
    sp.add_argument("--config", help="JSON config file; explicit flags win")


def _add_grid_flags(sp):
    sp.add_argument(
        "--window", type=float, nargs=4, metavar=("X0", "X1", "T0", "T1"), help="grid bounds"
    )
    sp.add_argument("--nx", type=int, default=None, help="grid columns (default 201)")
    sp.add_argument("--nt", type=int, default=None, help="grid rows (default 201)")
    sp.add_argument("--refine", type=int, default=1, help="refine the grid this many times")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--pole-threshold", type=float, default=None)
    sp.add_argument("--census-threshold", type=float, default=None)
    sp.add_argument("--sign", type=int, choices=(1, -1), default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="nlrogue", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("field", help="evaluate a wave on a grid")
    _add_spec_flags(sp)
    _add_grid_flags(sp)
    sp.add_argument("--csv")
    sp.add_argument("--json")
    sp.add_argument("--ppm")
    sp.add_argument("--component", type=int, default=None, help="0-based, for the PPM map")
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite", nargs="*", help=f"subset of {sorted(SUITES)}")
    sp.add_argument(
        "--update-sign",
        type=int,
        choices=(1, -1),
        default=None,
        help="check fig1 residuals under a forced update orientation",
    )
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("coeffs", help="expansion coefficient families at a point")
    sp.add_argument("--rho", type=float, default=1.0)
    sp.add_argument("--dim", type=int, choices=(2, 3), default=2)
    sp.add_argument("--n-max", type=int, default=4)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--t", type=float, default=1.0)
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("census", help="count singular peaks of a wave")
    _add_spec_flags(sp)
    _add_grid_flags(sp)
    sp.add_argument("--expect-clusters", type=int, default=None)
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("figures", help="render presets into a directory")
    sp.add_argument("--outdir", required=True)
    sp.add_argument("--presets", nargs="*", help="subset of presets")
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_figures)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericOverflowError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
