"""Command-line front end.

Exit codes: 0 success, 1 usage/config error, 2 violated geometric
hypothesis, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .embedding import integrate_frenet, build_mesh, measure_metric, write_mesh_csv, write_obj
from .errors import (
    ConfigError,
    HypothesisError,
    PreconditionError,
    QuadratureError,
    RuledStripError,
    SolverError,
)
from .geometry import (
    check_assumptions,
    eval_h,
    geometry_to_dict,
    load_geometry,
    sharp_bound_applies,
)
from .hardy import (
    build_certificate,
    random_hardy_trials_1d,
    HardyTrial1D,
    stability_threshold,
    verify_curved_hardy,
    verify_hardy_1d,
    verify_lemma_kinetic,
    verify_local_hardy,
    verify_theorem1,
)
from .spectrum import truncated_ground_state
from .transverse import lambda_profile, profile_to_csv
from .trials import random_trials

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(payload, args):
    payload = {"schema_version": SCHEMA_VERSION, "command": args.command, **payload}
    _emit(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n", args.out)


def _load(args):
    geom, env = load_geometry(args.config)
    rep = check_assumptions(geom)
    if not rep.checks["basic"].passed:
        raise HypothesisError(
            f"hypothesis failed: a*sup|k| = {rep.checks['basic'].value:.6g} must be below 1"
        )
    return geom, env


def cmd_lambda(args):
    geom, _ = _load(args)
    lo, hi = args.s_range
    results = lambda_profile(geom, lo, hi, args.samples, args.n)
    _emit(profile_to_csv(results), args.out)


def cmd_certificate(args):
    geom, _ = _load(args)
    cert = build_certificate(geom, n=args.n)
    _emit_json({"geometry": geometry_to_dict(geom), "certificate": cert.to_dict()}, args)


def cmd_stability(args):
    geom, env = _load(args)
    cert = build_certificate(geom, n=args.n)
    rep = stability_threshold(geom, cert, bound=args.bound)
    payload = {"geometry": geometry_to_dict(geom, env), "report": rep.to_dict(),
               "sharp_bound_applies": sharp_bound_applies(geom)}
    if env is not None:
        payload["eps0_within_threshold"] = bool(env.eps0 <= rep.eps0_max)
    _emit_json(payload, args)


def cmd_spectrum(args):
    geom, _ = _load(args)
    n_s, n_t = args.grid
    res = truncated_ground_state(geom, L=args.truncate, n_s=n_s, n_t=n_t,
                                 metric=args.metric, seed=args.seed)
    _emit_json({"geometry": geometry_to_dict(geom), "spectrum": res.to_dict(args.tol),
                "tol": args.tol}, args)


def cmd_verify(args):
    geom, env = _load(args)
    rng = np.random.default_rng(args.seed)
    which = args.which
    if which == "one":
        n = args.trials
        trials = random_hardy_trials_1d(max(n - 5, 0), rng)
        trials += [HardyTrial1D("power_spline", (d,)) for d in (0.4, 0.2, 0.1, 0.05, 0.02)][:n]
        rep = verify_hardy_1d(trials)
    elif which == "local":
        rep = verify_local_hardy(geom, random_trials(geom.a, args.trials, rng))
    else:
        cert = build_certificate(geom, n=args.n)
        trials = random_trials(geom.a, args.trials, rng, s0=cert.s0)
        if which == "theorem1":
            rep = verify_theorem1(geom, cert, trials)
        elif which == "kinetic":
            rep = verify_lemma_kinetic(geom, cert, trials)
        else:
            if env is None:
                raise ConfigError("'verify curved' needs 'eps0' in the geometry config")
            rep = verify_curved_hardy(geom, env, cert, trials, bound=args.bound)
    payload = {"geometry": geometry_to_dict(geom, env), "report": rep.to_dict(),
               "seed": args.seed}
    if which == "curved":
        payload["sharp_bound_applies"] = sharp_bound_applies(geom)
    _emit_json(payload, args)


def cmd_embed(args):
    geom, _ = _load(args)
    lo, hi = args.s_range
    n_s, n_t = args.grid
    s = np.linspace(lo, hi, n_s)
    t = np.linspace(-geom.a, geom.a, n_t + 2)[1:-1]
    frame = integrate_frenet(geom.kappa, geom.tau, s)
    mesh = build_mesh(geom, frame, t)
    base = Path(args.out) if args.out else Path("strip")
    write_mesh_csv(mesh, base.with_suffix(".csv"))
    write_obj(mesh, base.with_suffix(".obj"))
    G11, G12, G22 = measure_metric(mesh)
    S, T = np.meshgrid(s, t, indexing="ij")
    h = eval_h(geom, S, T)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "embed",
        "vertices": mesh.vertex_count,
        "files": [str(base.with_suffix(".csv")), str(base.with_suffix(".obj"))],
        "max_metric_error": {
            "G11_vs_h2": float(np.max(np.abs(G11 - h**2))),
            "G12": float(np.max(np.abs(G12))),
            "G22_vs_1": float(np.max(np.abs(G22 - 1.0))),
        },
        "frame_orthonormality_defect": frame.orthonormality_defect(),
    }
    sys.stdout.write(json.dumps(summary, sort_keys=True, indent=2) + "\n")


def build_parser():
    p = _Parser(prog="ruledstrip", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("config", help="geometry JSON file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--n", type=int, default=2048, help="transverse grid size")

    sp = sub.add_parser("lambda", help="Hardy weight profile as CSV")
    common(sp)
    sp.add_argument("--s-range", type=float, nargs=2, default=(-10.0, 10.0))
    sp.add_argument("--samples", type=int, default=201)
    sp.set_defaults(func=cmd_lambda)

    sp = sub.add_parser("certificate", help="Hardy constant certificate as JSON")
    common(sp)
    sp.set_defaults(func=cmd_certificate)

    sp = sub.add_parser("stability", help="largest admissible curvature envelope")
    common(sp)
    sp.add_argument("--bound", choices=("sharp", "uniform"), default="sharp")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("spectrum", help="truncated ground-state energy vs E1")
    common(sp)
    sp.add_argument("--grid", type=int, nargs=2, default=(600, 60), metavar=("N_S", "N_T"))
    sp.add_argument("--truncate", type=float, default=12.0, metavar="L")
    sp.add_argument("--metric", choices=("full", "geodesic"), default="full")
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("verify", help="check an inequality on random trial functions")
    common(sp)
    sp.add_argument("which", choices=("one", "local", "theorem1", "kinetic", "curved"))
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--bound", choices=("sharp", "uniform"), default="sharp")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("embed", help="mesh of the strip in R^3 (CSV + OBJ)")
    common(sp)
    sp.add_argument("--s-range", type=float, nargs=2, default=(-5.0, 5.0))
    sp.add_argument("--grid", type=int, nargs=2, default=(201, 21), metavar=("N_S", "N_T"))
    sp.set_defaults(func=cmd_embed)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    try:
        args.func(args)
    except HypothesisError as exc:
        print(f"ruledstrip: {exc}", file=sys.stderr)
        return 2
    except (SolverError, QuadratureError) as exc:
        print(f"ruledstrip: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, PreconditionError, RuledStripError, OSError) as exc:
        print(f"ruledstrip: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
