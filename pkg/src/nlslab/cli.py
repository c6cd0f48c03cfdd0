"""Command-line surface.

Subcommands: ground-state, thresholds, gn-constant, evolve, sweep, verify.
Exit codes: 0 success, 1 verification/evolution outcome failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .core import CartesianGrid
from .errors import NlsLabError
from .evolution import split_step_evolve
from .functionals import (ThresholdSet, classify_plane_point,
                          gn_constant_formula, gn_constant_minimize)
from .ground_state import ModelParams, pohozaev_residuals, solve_shooting
from .initial_data import gaussian_with_norms, make_phi_ab
from .io import (checkpoint_write, observables_csv_write, profile_csv_write)
from .sweep import (SweepConfig, cached_unit_ground_state, run_sweep,
                    write_sweep_artifacts)
from .verify import run_verify

__all__ = ["main"]


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--dim", type=int, default=1, help="spatial dimension")
    p.add_argument("--alpha", type=float, default=8.0,
                   help="nonlinearity exponent")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="focusing coupling")
    p.add_argument("--omega", type=float, default=1.0,
                   help="bound-state frequency")
    p.add_argument("--config", type=str, default=None,
                   help="key=value config file (CLI flags win)")
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--reproducible", action="store_true",
                   help="force deterministic reductions and ordering")


def _params(args) -> ModelParams:
    return ModelParams(args.dim, args.alpha, lam=args.lam, omega=args.omega)


def _out_dir(args) -> str | None:
    if args.out is None:
        return None
    os.makedirs(args.out, exist_ok=True)
    return args.out


def cmd_ground_state(args) -> int:
    params = _params(args)
    gs = solve_shooting(params)
    res = pohozaev_residuals(gs)
    print(f"ground state dim={params.dim} alpha={params.alpha} "
          f"lam={params.lam} omega={params.omega}")
    print(f"  method {gs.method}, equation residual {gs.residual_linf:.3e}")
    print(f"  L2 norm        {gs.l2:.12g}")
    print(f"  grad L2 norm   {np.sqrt(gs.norms.grad_sq):.12g}")
    print(f"  pohozaev residuals {res[0]:.3e} {res[1]:.3e} {res[2]:.3e}")
    out = _out_dir(args)
    if out:
        profile_csv_write(gs.profile, os.path.join(out, "ground_state.csv"))
        from .initial_data import auto_box, embed_radial
        field = embed_radial(gs.profile, auto_box(gs.profile))
        field.params_link = params
        checkpoint_write(field, os.path.join(out, "ground_state.nlsf"))
        print(f"  wrote ground_state.csv and ground_state.nlsf to {out}")
    return 0


def cmd_thresholds(args) -> int:
    params = _params(args)
    R_unit = cached_unit_ground_state(params, None)
    ts = ThresholdSet.from_ground_state(R_unit)
    a_grid = np.geomspace(args.a_min, args.a_max, args.count)
    lines = ["a,gamma_star,r_star,rho_star"]
    for a in a_grid:
        a = float(a)
        lines.append("%.17g,%.17g,%.17g,%.17g"
                     % (a, ts.gamma_star(a), ts.r_star(a), ts.rho_star(a)))
    text = "\n".join(lines) + "\n"
    out = _out_dir(args)
    if out:
        path = os.path.join(out, "thresholds.csv")
        with open(path, "w") as f:
            f.write(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_gn_constant(args) -> int:
    params = _params(args)
    unit = params.with_(lam=1.0, omega=1.0)
    R_unit = solve_shooting(unit)
    c_formula = gn_constant_formula(unit, R_unit.l2)
    c_min = gn_constant_minimize(unit, init=R_unit)
    rel = abs(c_min - c_formula) / c_formula
    print(f"sharp constant (closed form)  {c_formula:.12g}")
    print(f"sharp constant (minimizer)    {c_min:.12g}")
    print(f"relative difference           {rel:.3e}")
    return 0 if rel < 5e-3 else 1


def cmd_evolve(args) -> int:
    params = _params(args)
    grid = CartesianGrid(dim=params.dim, half_width=args.half_width,
                         points_per_axis=args.points)
    if args.family == "phi_ab":
        R_unit = cached_unit_ground_state(params, None)
        ts = ThresholdSet.from_ground_state(R_unit)
        cert = make_phi_ab(args.a, args.b, ts, R_unit, grid=grid)
        field = cert.field
        label = classify_plane_point(ts, args.a, args.b)
        print(f"datum phi_ab: beta={cert.beta:.6g} omega={cert.omega:.6g} "
              f"E={cert.e_value:.6g} region={label.label}")
    else:
        field = gaussian_with_norms(args.a, args.b, grid)
        print(f"datum gaussian: a={args.a} b={args.b}")
    out = _out_dir(args)
    writer = None
    if out and args.checkpoint_every is not None:
        counter = {"i": 0}

        def writer(f):
            path = os.path.join(out, f"checkpoint_{counter['i']:05d}.nlsf")
            checkpoint_write(f, path)
            counter["i"] += 1

    outcome, series = split_step_evolve(
        field, params, t_end=args.t_end, dt0=args.dt,
        checkpoint_every=args.checkpoint_every, checkpoint_writer=writer)
    print(f"status: {outcome.status}"
          + (f" ({outcome.reason})" if outcome.reason else ""))
    if outcome.blow_up_time_estimate is not None:
        print(f"blow-up time estimate: {outcome.blow_up_time_estimate:.6g}")
    if out:
        observables_csv_write(series, os.path.join(out, "observables.csv"))
        if outcome.final_field is not None:
            checkpoint_write(outcome.final_field,
                             os.path.join(out, "final.nlsf"))
        print(f"wrote observables.csv to {out}")
    return 0


def cmd_sweep(args) -> int:
    overrides = {
        "dim": args.dim, "alpha": args.alpha, "lam": args.lam,
        "omega": args.omega,
        "reproducible": "true" if args.reproducible else None,
        "out_dir": args.out,
        "parallelism": args.parallelism,
    }
    if args.config:
        config = SweepConfig.from_file(args.config, overrides)
    else:
        print("error: sweep requires --config", file=sys.stderr)
        return 2
    result = run_sweep(config)
    out = args.out or config.out_dir
    paths = write_sweep_artifacts(result, out)
    print(f"wrote {paths['csv']} and {paths['svg']}")
    return 0


def cmd_verify(args) -> int:
    report = run_verify(_params(args))
    print(report.text())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlslab",
        description="Numerical laboratory for the focusing nonlinear "
                    "Schroedinger equation: ground states, sharp thresholds, "
                    "split-step evolution, blow-up diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground-state", help="solve the radial bound state")
    _add_common(p)
    p.set_defaults(func=cmd_ground_state)

    p = sub.add_parser("thresholds", help="emit the threshold curves as CSV")
    _add_common(p)
    p.add_argument("--a-min", type=float, default=0.1)
    p.add_argument("--a-max", type=float, default=10.0)
    p.add_argument("--count", type=int, default=50)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("gn-constant",
                       help="sharp interpolation constant, two ways")
    _add_common(p)
    p.set_defaults(func=cmd_gn_constant)

    p = sub.add_parser("evolve", help="evolve one datum and report the outcome")
    _add_common(p)
    p.add_argument("--a", type=float, required=True, help="L2 norm of the datum")
    p.add_argument("--b", type=float, required=True,
                   help="gradient L2 norm of the datum")
    p.add_argument("--family", choices=("phi_ab", "gaussian"),
                   default="gaussian")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--half-width", type=float, default=30.0)
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--checkpoint-every", type=float, default=None)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="sweep the (b, a) plane from a config file")
    _add_common(p)
    p.add_argument("--parallelism", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the full identity suite")
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NlsLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
