"""Command-line front end.

Four subcommands operate on a config file (see `config`):

* ``solve``   -- solve one problem, write a one-row summary CSV.
* ``profile`` -- evaluate temperature profiles at given times, write CSV.
* ``verify``  -- run the verification suite (residuals, boundary values,
  ODE residual, shape checks, redundant-path agreement, and the
  finite-difference oracle when enabled), write a report CSV; exit 4 if
  any check fails.
* ``sweep``   -- solve a grid of dimensionless parameter tuples, write a
  table CSV; tuples run in parallel with ``--workers N``.

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 verification failure.  All CSV output uses 17 significant digits and
is byte-identical across runs of the same config.

Examples::

    stefansim solve --config melting.cfg --out results
    stefansim profile --config melting.cfg --t 0.1,0.5,1.0 --points 201
    stefansim verify --config melting.cfg
    stefansim sweep --config grid.cfg --workers 4
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from .checks import run_checks
from .config import RunConfig, load_config, reduced_problem
from .errors import ConfigError, InvalidInput, StefanError
from .model import (
    ExponentialSource,
    FluxFeedbackSource,
    NoSource,
    SimilaritySource,
)
from .reconstruct import front_position, similarity_coordinate
from .similarity import SimilaritySolution, solve_problem


def _fmt(value: float) -> str:
    return "%.17g" % value


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _out_path(cfg: RunConfig, args: argparse.Namespace, filename: str) -> str:
    out_dir = args.out or cfg.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, filename)


def _source_kind(source) -> str:
    if isinstance(source, NoSource):
        return "none"
    if isinstance(source, ExponentialSource):
        return "exponential"
    if isinstance(source, FluxFeedbackSource):
        return "feedback"
    assert isinstance(source, SimilaritySource)
    return "custom"


def _solve_from_config(cfg: RunConfig) -> SimilaritySolution:
    if cfg.material is None:
        raise ConfigError(
            "config leaves swept parameters without base values; "
            "only the sweep command accepts it"
        )
    return solve_problem(cfg.material, cfg.boundary, cfg.source, cfg.tol, cfg.table_nodes)


def _summary_row(sol: SimilaritySolution) -> tuple[list[str], list[str]]:
    groups = sol.dimensionless
    feedback = "" if groups.feedback is None else _fmt(groups.feedback)
    front_defect = abs(
        float(sol.y_many(np.array([sol.lam]), exact=True, clamp=False)[0])
    )
    header = [
        "source", "ste", "delta", "p", "feedback",
        "lam", "y_prime0", "lambda_residual", "front_value_defect",
    ]
    row = [
        _source_kind(sol.source),
        _fmt(groups.ste),
        _fmt(sol.material.delta),
        _fmt(sol.material.p),
        feedback,
        _fmt(sol.lam),
        _fmt(sol.y_prime0),
        _fmt(abs(sol.lambda_residual())),
        _fmt(front_defect),
    ]
    return header, row


def cmd_solve(cfg: RunConfig, args: argparse.Namespace) -> int:
    sol = _solve_from_config(cfg)
    header, row = _summary_row(sol)
    path = _out_path(cfg, args, "summary.csv")
    _write_csv(path, header, [row])
    print(f"lam = {_fmt(sol.lam)}")
    print(f"ste = {_fmt(sol.dimensionless.ste)}")
    if sol.dimensionless.feedback is not None:
        print(f"feedback = {_fmt(sol.dimensionless.feedback)}")
    print(f"y_prime0 = {_fmt(sol.y_prime0)}")
    print(f"lambda_residual = {_fmt(abs(sol.lambda_residual()))}")
    print(f"wrote {path}")
    return 0


def _parse_times(text: str) -> list[float]:
    try:
        times = [float(piece) for piece in text.split(",") if piece.strip()]
    except ValueError as exc:
        raise ConfigError(f"--t: not a number list: {text!r}") from exc
    if not times:
        raise ConfigError("--t: empty time list")
    if any(t <= 0.0 for t in times):
        raise ConfigError("--t: times must be positive")
    return sorted(times)


def cmd_profile(cfg: RunConfig, args: argparse.Namespace) -> int:
    times = _parse_times(args.t)
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    sol = _solve_from_config(cfg)
    span = sol.boundary.theta0 - sol.boundary.theta_f
    rows: list[list[str]] = []
    for t in times:
        front = front_position(sol, t)
        xs = np.linspace(0.0, front, args.points)
        etas = similarity_coordinate(sol, xs, t)
        ys = sol.y_many(np.clip(etas, 0.0, sol.lam))
        for x, eta, y in zip(xs, etas, ys):
            theta = sol.boundary.theta_f + span * y
            rows.append([_fmt(t), _fmt(x), _fmt(eta), _fmt(y), _fmt(theta)])
    path = _out_path(cfg, args, "profile.csv")
    _write_csv(path, ["t", "x", "eta", "y", "theta"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    sol = _solve_from_config(cfg)
    results = run_checks(sol, oracle_cfg=cfg.oracle)
    rows = [
        [r.name, _fmt(r.value), _fmt(r.threshold), "true" if r.passed else "false"]
        for r in results
    ]
    path = _out_path(cfg, args, "verify.csv")
    _write_csv(path, ["check", "value", "threshold", "passed"], rows)
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: {_fmt(r.value)} (threshold {_fmt(r.threshold)})")
    print(f"wrote {path}")
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed", file=sys.stderr)
        return 4
    return 0


def _sweep_case(case: tuple) -> tuple[str, str, str, str]:
    """One sweep tuple -> (lam, y_prime0, residual, status) as CSV strings.

    Top-level so process pools can pickle it; never raises, failures are
    recorded in the status column.
    """
    ste, delta, p, feedback, kind, tol = case
    try:
        material, boundary, source = reduced_problem(ste, delta, p, kind, feedback)
        sol = solve_problem(material, boundary, source, tol)
        return (
            _fmt(sol.lam),
            _fmt(sol.y_prime0),
            _fmt(abs(sol.lambda_residual())),
            "ok",
        )
    except StefanError as exc:
        return ("nan", "nan", "nan", f"error: {type(exc).__name__}")


def cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    if not cfg.sweep:
        raise ConfigError("sweep command requires at least one sweep.* key")
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    reduced = cfg.reduced
    assert reduced is not None  # sweep keys force dimensionless mode
    axes: list[list[Optional[float]]] = []
    for name in ("ste", "delta", "p", "feedback"):
        if name in cfg.sweep:
            axes.append(list(cfg.sweep[name]))
        else:
            axes.append([getattr(reduced, name)])
    cases = [
        (ste, delta, p, feedback, reduced.kind, cfg.tol)
        for ste in axes[0]
        for delta in axes[1]
        for p in axes[2]
        for feedback in axes[3]
    ]
    if args.workers == 1:
        outcomes = [_sweep_case(case) for case in cases]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            outcomes = list(pool.map(_sweep_case, cases))
    rows = []
    for case, outcome in zip(cases, outcomes):
        ste, delta, p, feedback = case[:4]
        rows.append(
            [
                _fmt(ste),
                _fmt(delta),
                _fmt(p),
                "" if feedback is None else _fmt(feedback),
                *outcome,
            ]
        )
    path = _out_path(cfg, args, "sweep.csv")
    _write_csv(
        path,
        ["ste", "delta", "p", "feedback", "lam", "y_prime0", "lambda_residual", "status"],
        rows,
    )
    n_failed = sum(1 for outcome in outcomes if outcome[3] != "ok")
    print(f"wrote {path} ({len(rows)} rows, {n_failed} failed)")
    if rows and n_failed == len(rows):
        print("all sweep tuples failed", file=sys.stderr)
        return 3
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stefansim",
        description="Similarity solutions of a one-phase melting problem "
        "with temperature-dependent conductivity, verified by finite differences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one problem, write summary.csv")
    profile = sub.add_parser("profile", help="write temperature profiles as profile.csv")
    verify = sub.add_parser("verify", help="run the verification suite, write verify.csv")
    sweep = sub.add_parser("sweep", help="solve a parameter grid, write sweep.csv")

    for p, func in ((solve, cmd_solve), (profile, cmd_profile), (verify, cmd_verify), (sweep, cmd_sweep)):
        p.add_argument("--config", required=True, help="path to the run config file")
        p.add_argument("--out", default=None, help="output directory (default: config or cwd)")
        p.set_defaults(func=func)
    profile.add_argument("--t", default="1.0", help="comma-separated evaluation times")
    profile.add_argument("--points", type=int, default=101, help="samples per profile")
    sweep.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (ConfigError, InvalidInput) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StefanError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
