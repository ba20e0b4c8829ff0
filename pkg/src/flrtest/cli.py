"""Command line surface.

Subcommands: ``test`` (CSV in, analysis report out), ``simulate`` (one Monte
Carlo cell as CSV), ``power-curve`` (CSV table plus an SVG line plot), and
``select-lambda`` (smoothing-parameter diagnostics only).

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import io as flio
from .design import build_design, eig_qhat, eig_qraw
from .errors import (DataError, DegenerateDesignError, DegenerateResponseError,
                     FlrtestError, InvalidInputError, NumericError)
from .glrt import run_test
from .grid import make_grid
from .lambda_select import select_lambda
from .simlab import SimConfig, power_curve, run_monte_carlo

__all__ = ["cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="flrtest",
                     description="Spline likelihood-ratio test for the slope "
                                 "function in functional linear regression")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--m", type=int, default=2, help="penalty order")
        p.add_argument("--grid", type=int, default=201, help="grid points")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--sided", choices=["one", "two"], default="two")
        lam = p.add_mutually_exclusive_group()
        lam.add_argument("--lambda", dest="fixed_lambda", type=float,
                         default=None, help="fixed smoothing parameter")
        lam.add_argument("--adaptive", action="store_true", default=False,
                         help="data-driven smoothing parameter (default)")
        p.add_argument("--threads", type=int, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p_test = sub.add_parser("test", help="run the test on a CSV dataset")
    p_test.add_argument("--in", dest="infile", required=True)
    p_test.add_argument("--scale", type=float, default=1.0)
    p_test.add_argument("--lag", type=int, default=0)
    common(p_test)

    p_sim = sub.add_parser("simulate", help="one Monte Carlo size/power cell")
    p_sim.add_argument("--setup", type=int, choices=[1, 2], default=1)
    p_sim.add_argument("--nu", type=float, default=2.0)
    p_sim.add_argument("--n", type=int, default=100)
    p_sim.add_argument("--B", type=float, default=0.0)
    p_sim.add_argument("--reps", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--setup2-bracket", choices=["floor", "literal"],
                       default="floor")
    common(p_sim)

    p_pow = sub.add_parser("power-curve", help="power across a range of B")
    p_pow.add_argument("--setup", type=int, choices=[1, 2], default=1)
    p_pow.add_argument("--nu", type=float, action="append", default=None,
                       help="may be given several times, one series each")
    p_pow.add_argument("--n", type=int, default=100)
    p_pow.add_argument("--B", type=float, action="append", default=None,
                       help="may be given several times")
    p_pow.add_argument("--reps", type=int, default=500)
    p_pow.add_argument("--seed", type=int, default=0)
    p_pow.add_argument("--svg", default=None, help="also write an SVG plot here")
    common(p_pow)

    p_sel = sub.add_parser("select-lambda",
                           help="smoothing-parameter diagnostics for a dataset")
    p_sel.add_argument("--in", dest="infile", required=True)
    p_sel.add_argument("--scale", type=float, default=1.0)
    p_sel.add_argument("--lag", type=int, default=0)
    common(p_sel)

    return parser


def _validate_common(args):
    if not 0.0 < args.alpha < 1.0:
        raise _UsageError("--alpha must be in (0, 1)")
    if args.m < 1:
        raise _UsageError("--m must be >= 1")
    if args.grid < 3:
        raise _UsageError("--grid must be >= 3")
    if args.fixed_lambda is not None and args.fixed_lambda <= 0:
        raise _UsageError("--lambda must be positive")


def _write_out(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _cmd_test(args) -> int:
    grid = make_grid(args.grid)
    sample, info = flio.ingest_curves(args.infile, grid, args.scale, args.lag)
    design = build_design(sample, args.m)
    selection = None
    if args.fixed_lambda is not None:
        lam = args.fixed_lambda
    else:
        selection = select_lambda(eig_qraw(design), sample.n)
        lam = selection.lambda_tilde
    eigs = eig_qhat(design)
    result = run_test(design, eigs, sample.responses, lam,
                      alpha=args.alpha, sided=args.sided)
    spline = None
    from .estimator import fit as fit_beta
    spline = fit_beta(design, eigs, sample.responses, lam)
    report = flio.AnalysisReport(result=result, beta=spline.beta.values,
                                 selection=selection, info=info)
    _write_out(flio.emit_report(report).decode(), args.out)
    return 0


def _cmd_simulate(args) -> int:
    config = SimConfig(
        setup=args.setup, n=args.n, nu=args.nu, B=args.B, reps=args.reps,
        alpha=args.alpha, m=args.m, grid_points=args.grid, seed=args.seed,
        sided=args.sided,
        lambda_rule="fixed" if args.fixed_lambda is not None else "adaptive",
        fixed_lambda=args.fixed_lambda or 0.0,
        setup2_bracket=args.setup2_bracket, threads=args.threads,
    )
    row = run_monte_carlo(config)
    _write_out(flio.rows_to_csv([row]), args.out)
    return 0


def _cmd_power_curve(args) -> int:
    nus = args.nu or [2.0]
    b_values = sorted(args.B) if args.B else [0.0, 0.25, 0.5, 0.75, 1.0]
    base = SimConfig(
        setup=args.setup, n=args.n, nu=nus[0], reps=args.reps,
        alpha=args.alpha, m=args.m, grid_points=args.grid, seed=args.seed,
        sided=args.sided,
        lambda_rule="fixed" if args.fixed_lambda is not None else "adaptive",
        fixed_lambda=args.fixed_lambda or 0.0, threads=args.threads,
    )
    series = {}
    all_rows = []
    for nu in nus:
        rows = power_curve(replace(base, nu=float(nu)), b_values)
        series[f"nu={nu:g}"] = rows
        all_rows.extend(rows)
    _write_out(flio.rows_to_csv(all_rows), args.out)
    if args.svg is not None:
        with open(args.svg, "w") as fh:
            fh.write(flio.power_rows_to_svg(series))
    return 0


def _cmd_select_lambda(args) -> int:
    grid = make_grid(args.grid)
    sample, info = flio.ingest_curves(args.infile, grid, args.scale, args.lag)
    design = build_design(sample, args.m)
    sel = select_lambda(eig_qraw(design), sample.n)
    lines = [
        f"file = {info.path}",
        f"n = {sample.n}",
        f"lambda_tilde = {sel.lambda_tilde:.17g}",
        f"objective = {sel.objective_value:.17g}",
        f"stationarity_residual = {sel.stationarity_residual:.17g}",
        f"at_boundary = {sel.at_boundary}",
    ]
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


_COMMANDS = {
    "test": _cmd_test,
    "simulate": _cmd_simulate,
    "power-curve": _cmd_power_curve,
    "select-lambda": _cmd_select_lambda,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _validate_common(args)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, DegenerateDesignError, DegenerateResponseError,
            InvalidInputError, FlrtestError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


def main():  # console-script entry point
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
