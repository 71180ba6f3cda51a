"""Command-line experiments: corner constants, FEM sweeps, model tables, cusp scans.

Exit status is 0 on success, 2 for invalid input and 3 for numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import fem2d
from .corner_constants import (bounds_codim3, cone_constant, domain_constant,
                               polygon_constant)
from .errors import DomainError, NoPositiveWeight, RobinError, ValidationError
from .geometry import PlanarPolygon, PolyhedralCone, load_domain
from .model_solvers import ModelDomain, model_lambda
from .rayleigh import cusp_scan

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

MODELS = ("halfline", "ball", "box", "angle", "halfspace-cone")

# flag defaults, applied after the optional JSON config has been merged
DEFAULTS = {
    "gamma_start": 1.0, "gamma_stop": 8.0, "gamma_count": 4, "gamma_log": False,
    "tol": 1e-10, "h": 0.1, "m": 2, "sides": None, "alpha": None, "p": 1.5,
    "workers": 1,
}
CUSP_DEFAULTS = {"gamma_start": 10.0, "gamma_stop": 100.0, "gamma_count": 10,
                 "gamma_log": True}


class UsageError(ValueError):
    pass


def gamma_grid(start, stop, count, log=False):
    if count is None or count < 1:
        raise UsageError("the gamma grid is empty (--gamma-count must be >= 1)")
    if not (start > 0 and stop > 0):
        raise UsageError("gamma values must be positive")
    if count == 1:
        return np.array([float(start)])
    if stop <= start:
        raise UsageError("--gamma-stop must exceed --gamma-start")
    return np.geomspace(start, stop, count) if log else np.linspace(start, stop, count)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row])


def _out_dir(args):
    if not args.out:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------

def cmd_corner(args):
    if not args.input:
        raise UsageError("corner needs --input")
    dom = load_domain(args.input)
    report = {}
    if isinstance(dom, PlanarPolygon):
        dc = polygon_constant(dom)
    elif isinstance(dom, PolyhedralCone):
        if dom.dim == 3:
            bnd = bounds_codim3(dom, tol=args.tol)
            report = bnd.to_json()
            tag = "exact" if bnd.exact else "bracket"
            print(f"C_y in [{bnd.lower:.12g}, {bnd.upper:.12g}] ({tag})")
            if bnd.a_opt is not None:
                print(f"optimal decay a = {bnd.a_opt:.12g}")
        else:
            cv = cone_constant(dom)
            report = {"lower": cv.lower, "upper": cv.upper, "exact": bool(cv.exact)}
            print(f"C_y in [{cv.lower:.12g}, {cv.upper:.12g}]")
        dc = None
    else:
        dc = domain_constant(dom)
    if dc is not None:
        for c in dc.contributions:
            cv = c.corner
            if not c.weight > 0:
                print(f"{c.label or c.kind:>12}  G={c.weight:g}  (ignored)")
                continue
            val = (f"{cv.value:.10g}" if cv.exact
                   else f"[{cv.lower:.10g}, {cv.upper:.10g}]")
            print(f"{c.label or c.kind:>12}  {c.kind:<22} G={c.weight:<8g} C_y={val}")
        att = dc.attained_by
        print(f"C_Omega = {dc.value:.12g} attained at {att.label or att.kind}")
        report = {"C_Omega": dc.value, "attained_by": att.label or att.kind,
                  "bracket": list(dc.bracket),
                  "corners": [{"label": c.label, "kind": c.kind, "weight": c.weight,
                               "lower": c.corner.lower, "upper": c.corner.upper}
                              for c in dc.contributions]}
    out = _out_dir(args)
    if out:
        with open(out / "corner.json", "w") as fh:
            json.dump(report, fh, indent=2, allow_nan=True)
    return EXIT_OK


def _plot_sweep(result, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "robin-sweep"
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(result.gammas, result.ratios, "o-", label=r"$\Lambda_h/\gamma^2$")
    if result.c_omega is not None:
        ax.axhline(-result.c_omega, color="k", ls="--", lw=1,
                   label=rf"$-C_\Omega = {-result.c_omega:.4g}$")
    ax.set_xlabel(r"$\gamma$")
    ax.set_ylabel(r"$\Lambda/\gamma^2$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_sweep(args):
    if not args.input:
        raise UsageError("sweep needs --input")
    poly = load_domain(args.input)
    if not isinstance(poly, PlanarPolygon):
        raise ValidationError("sweep needs a polygon domain file")
    gammas = gamma_grid(args.gamma_start, args.gamma_stop, args.gamma_count, args.gamma_log)
    res = fem2d.gamma_sweep(poly, gammas, h=args.h, workers=args.workers)
    print(f"{'gamma':>10} {'lambda':>16} {'ratio':>10} {'dof':>7}")
    for g, lam, r, d, _ in res.rows():
        print(f"{g:10.4g} {lam:16.8g} {r:10.5f} {d:7d}")
    print(f"C_est = {res.c_est:.6g}   C_Omega = {res.c_omega:.6g}")
    out = _out_dir(args)
    if out:
        res.to_csv(out / "sweep.csv")
        _plot_sweep(res, out / "sweep.svg")
    return EXIT_OK


def _model_domain(args):
    name = args.model
    if name == "halfline":
        return ModelDomain.halfline()
    if name == "ball":
        return ModelDomain.ball(int(args.m))
    if name == "box":
        if not args.sides:
            raise UsageError("box model needs --sides")
        return ModelDomain.box(*args.sides)
    if name == "angle":
        if args.alpha is None:
            raise UsageError("angle model needs --alpha")
        return ModelDomain.angle(args.alpha)
    if name == "halfspace-cone":
        return ModelDomain.halfspace_cone()
    raise UsageError(f"unknown model {name!r}; choose from {', '.join(MODELS)}")


def cmd_model(args):
    if not args.model:
        raise UsageError("model needs --model")
    dom = _model_domain(args)
    gammas = gamma_grid(args.gamma_start, args.gamma_stop, args.gamma_count, args.gamma_log)
    rows = [(g, model_lambda(dom, g), model_lambda(dom, g) / g**2) for g in gammas]
    print(f"{'gamma':>10} {'lambda':>20} {'ratio':>12}")
    for g, lam, r in rows:
        print(f"{g:10.4g} {lam:20.12g} {r:12.8f}")
    out = _out_dir(args)
    if out:
        _write_csv(out / "model.csv", ["gamma", "lambda", "ratio"], rows)
    return EXIT_OK


def cmd_cusp(args):
    p = args.p
    if p is not None and p >= 2:
        print(f"p = {p:g}: unbounded order, |Lambda| outgrows every power of gamma",
              file=sys.stderr)
        return EXIT_INVALID
    gammas = gamma_grid(args.gamma_start, args.gamma_stop, args.gamma_count, args.gamma_log)
    scan = cusp_scan(p, gammas)
    predicted = 2.0 / (2.0 - p)
    print(f"fitted exponent {scan.slope:.6f}  (predicted {predicted:.6f})")
    out = _out_dir(args)
    if out:
        _write_csv(out / "cusp.csv", ["gamma", "J", "log_gamma", "log_negJ"], scan.rows())
    return EXIT_OK


COMMANDS = {"corner": cmd_corner, "sweep": cmd_sweep, "model": cmd_model, "cusp": cmd_cusp}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys mirror the flags")
    common.add_argument("--input", help="domain JSON file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--gamma-start", type=float)
    common.add_argument("--gamma-stop", type=float)
    common.add_argument("--gamma-count", type=int)
    common.add_argument("--gamma-log", action="store_true", default=None)
    common.add_argument("--tol", type=float)
    common.add_argument("--h", type=float, help="interior mesh size")
    common.add_argument("--workers", type=int)
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--m", type=int, help="ball dimension")
    common.add_argument("--sides", type=float, nargs="+", help="box half-sides")
    common.add_argument("--alpha", type=float, help="angle half-opening")
    common.add_argument("--p", type=float, help="cusp exponent")

    parser = argparse.ArgumentParser(prog="robin-asym", parents=[common],
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_args(args):
    """Merge the JSON config (flags take precedence) and fill defaults."""
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        for key, value in cfg.items():
            key = key.replace("-", "_")
            if not hasattr(args, key) and key != "command":
                raise UsageError(f"unknown config key {key!r}")
            if getattr(args, key, None) is None:
                setattr(args, key, value)
    if args.command not in COMMANDS:
        raise UsageError("a command is required: " + ", ".join(COMMANDS))
    defaults = dict(DEFAULTS)
    if args.command == "cusp":
        defaults.update(CUSP_DEFAULTS)
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve_args(args)
        return COMMANDS[args.command](args)
    except (UsageError, ValidationError, DomainError, NoPositiveWeight,
            FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RobinError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
