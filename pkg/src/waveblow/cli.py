"""Command line entry point.

Exit codes: 0 success, 1 usage/validation errors, 2 numerically
inconclusive or diverged outcomes (so scripts can tell a bad config from
an undecided experiment).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_document, parse_grid, parse_problem, parse_query, \
    parse_sweep_config
from .functional import WindowTooShortError, growth_window_trace, moment_series
from .picard import PicardDivergedError, integral_residual, run_picard
from .regimes import OutsideTheorems, predict, query_from_spec
from .solver import estimate_lifespan, solve
from .sweep import CONSISTENT, INCONSISTENT, export, run_sweep

USAGE_ERROR = 1
INCONCLUSIVE_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="waveblow", description=__doc__)
    parser.add_argument("--version", action="version", version=f"waveblow {__version__}")
    sub = parser.add_subparsers(dest="command")

    def add_common(p):
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled diagnostics")

    p = sub.add_parser("predict", help="scaling law for a regime query")
    p.add_argument("config", type=Path, help="file with a [query] (or [problem]) section")
    add_common(p)

    p = sub.add_parser("solve", help="one grid integration")
    p.add_argument("config", type=Path, help="file with [problem], [data], [grid]")
    p.add_argument("--grid-h", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--dump-every", type=int, default=0, help="snapshot stride for --out dump")
    add_common(p)

    p = sub.add_parser("sweep", help="epsilon sweep with scaling fits")
    p.add_argument("config", type=Path, help="file with [problem], [data], [grid], [sweep]")
    p.add_argument("--grid-h", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    add_common(p)

    p = sub.add_parser("iterate", help="weighted fixed-point iteration")
    p.add_argument("config", type=Path, help="file with [problem], [data]")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--grid-h", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-steps", type=int, default=50)
    add_common(p)

    p = sub.add_parser("functional", help="moment functional trace of one run")
    p.add_argument("config", type=Path, help="file with [problem], [data], [grid]")
    p.add_argument("--grid-h", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    add_common(p)

    p = sub.add_parser("report", help="summarize an exported sweep directory")
    p.add_argument("dir", type=Path)
    add_common(p)
    return parser


def _grid_overrides(args) -> dict:
    return {
        "h": getattr(args, "grid_h", None),
        "t_max": getattr(args, "t_max", None),
        "threshold": getattr(args, "threshold", None),
    }


def _prediction_record(pred) -> dict:
    if isinstance(pred, OutsideTheorems):
        return {"kind": "outside", "reason": pred.reason, "nearest": pred.nearest}
    rec = {
        "kind": pred.kind,
        "exponent": pred.exponent,
        "branch": pred.branch,
        "condition": pred.condition,
        "description": pred.describe(),
    }
    if pred.log_law is not None:
        rec["log_law"] = {
            "label": pred.log_law.label,
            "mu": pred.log_law.mu,
            "nu": pred.log_law.nu,
            "shift": pred.log_law.shift,
        }
        rec["inner_exponent"] = pred.inner_exponent
    return rec


def _cmd_predict(args) -> int:
    doc = load_document(args.config)
    if "query" in doc:
        query = parse_query(doc)
    else:
        query = query_from_spec(parse_problem(doc))
    pred = predict(query)
    rec = _prediction_record(pred)
    if isinstance(pred, OutsideTheorems):
        print(f"outside known results: {pred.reason}")
        if pred.nearest:
            print(f"nearest covered regime: {pred.nearest}")
    else:
        print(f"{pred.describe()}")
        print(f"branch: {pred.branch}")
        print(f"condition: {pred.condition}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "prediction.json").write_text(json.dumps(rec, indent=2, sort_keys=True))
    return 0


def _cmd_solve(args) -> int:
    doc = load_document(args.config)
    spec = parse_problem(doc)
    overrides = _grid_overrides(args)
    if args.dump_every:
        overrides["snapshot_every"] = args.dump_every
    grid = parse_grid(doc, overrides)
    est = estimate_lifespan(spec, grid)
    for hh, tt in zip(est.spacings, est.refinements):
        print(f"h={hh:g}: T={tt:g}")
    print(f"status: {est.status}")
    print(f"T_num: {est.t_num:g}  uncertainty: {est.uncertainty:g}")
    print(f"threshold_sensitivity: {est.threshold_sensitivity:g}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        sol = solve(spec, grid)
        lines = ["x,t,u,u_t"]
        for snap in sol.snapshots:
            for xv, uv, utv in zip(sol.xs, snap.u, snap.ut):
                lines.append(f"{float(xv)!r},{float(snap.t)!r},{float(uv)!r},{float(utv)!r}")
        (args.out / "levels.csv").write_text("\n".join(lines) + "\n")
        rec = {
            "status": est.status,
            "t_num": est.t_num if math.isfinite(est.t_num) else None,
            "refinements": list(est.refinements),
            "spacings": list(est.spacings),
            "uncertainty": est.uncertainty,
            "threshold_sensitivity": est.threshold_sensitivity,
        }
        (args.out / "lifespan.json").write_text(json.dumps(rec, indent=2, sort_keys=True))
    return INCONCLUSIVE_ERROR if est.status == "inconclusive" else 0


def _cmd_sweep(args) -> int:
    doc = load_document(args.config)
    overrides = _grid_overrides(args)
    overrides["workers"] = args.workers
    cfg = parse_sweep_config(doc, overrides)
    result = run_sweep(cfg)
    for row in result.rows:
        t = f"{row.t_num:g}" if math.isfinite(row.t_num) else "horizon"
        print(f"eps={row.epsilon:.6g}  T={t}  [{row.status}]")
    worst = 0
    for fit in result.fits:
        print(
            f"{fit.law_kind} fit: slope={fit.slope:.5g} (+/- {fit.stderr_slope:.2g}) "
            f"r2={fit.r2:.5f} expected={fit.expected_exponent} verdict={fit.verdict}"
        )
        if fit.verdict not in (CONSISTENT, INCONSISTENT):
            worst = max(worst, INCONCLUSIVE_ERROR)
    print(f"expected: {result.provenance['expected']}")
    if args.out:
        csv_path, rep_path = export(result, args.out)
        print(f"wrote {csv_path} and {rep_path}")
    return worst


def _cmd_iterate(args) -> int:
    doc = load_document(args.config)
    spec = parse_problem(doc)
    try:
        res = run_picard(
            spec, horizon=args.horizon, h=args.grid_h, tol=args.tol, max_steps=args.max_steps
        )
    except PicardDivergedError as exc:
        print(f"diverged: {exc}")
        return INCONCLUSIVE_ERROR
    rep = res.report
    for j, (un, vn, dn) in enumerate(zip(rep.u_norms, rep.v_norms, rep.diffs), start=1):
        print(f"step {j}: |U|_1={un:.6g} |V|_2={vn:.6g} diff={dn:.3g}")
    ratios = ", ".join(f"{r:.3g}" for r in rep.contraction_ratios)
    print(f"contraction ratios: [{ratios}]")
    print(f"converged: {rep.converged} in {rep.steps} steps")
    resid = integral_residual(res, spec, seed=args.seed)
    print(f"integral-equation residual (sampled): {resid:.3e}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        rec = {
            "converged": rep.converged,
            "steps": rep.steps,
            "u_norms": list(rep.u_norms),
            "v_norms": list(rep.v_norms),
            "diffs": list(rep.diffs),
            "contraction_ratios": list(rep.contraction_ratios),
            "residual": resid,
        }
        (args.out / "iteration.json").write_text(json.dumps(rec, indent=2, sort_keys=True))
    return 0 if rep.converged else INCONCLUSIVE_ERROR


def _cmd_functional(args) -> int:
    doc = load_document(args.config)
    spec = parse_problem(doc)
    grid = parse_grid(doc, _grid_overrides(args))
    sol = solve(spec, grid)
    series = moment_series(sol, spec)
    print(f"status: {sol.status}  levels: {series.times.size}")
    code = 0
    try:
        trace = growth_window_trace(series)
        print(
            f"early window [{trace.early.t_lo:.3g}, {trace.early.t_hi:.3g}]: "
            f"kappa={trace.early.kappa:.3f} (r2={trace.early.r2:.4f})"
        )
        print(
            f"late window [{trace.late.t_lo:.3g}, {trace.late.t_hi:.3g}]: "
            f"kappa={trace.late.kappa:.3f} (r2={trace.late.r2:.4f})"
        )
        windows = [trace.early, trace.late]
    except WindowTooShortError as exc:
        print(f"window fits unavailable: {exc}")
        windows = []
        code = INCONCLUSIVE_ERROR
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        lines = ["t,F,F2"]
        for t, f, f2 in zip(series.times, series.f, series.f2):
            lines.append(f"{float(t)!r},{float(f)!r},{float(f2)!r}")
        (args.out / "moments.csv").write_text("\n".join(lines) + "\n")
        rec = [
            {"t_lo": w.t_lo, "t_hi": w.t_hi, "kappa": w.kappa, "r2": w.r2, "n": w.n_points}
            for w in windows
        ]
        (args.out / "windows.json").write_text(json.dumps(rec, indent=2, sort_keys=True))
    return code


def _cmd_report(args) -> int:
    csv_path = args.dir / "sweep.csv"
    rep_path = args.dir / "report.txt"
    if not csv_path.exists():
        raise ConfigError(f"no sweep.csv under {args.dir}")
    rows = csv_path.read_text().strip().splitlines()
    print(f"{len(rows) - 1} sweep rows from {csv_path}")
    for line in rows[1:]:
        eps, t, unc, status = line.split(",")
        print(f"  eps={float(eps):.6g}  T={t}  (+/- {unc})  [{status}]")
    code = 0
    if rep_path.exists():
        text = rep_path.read_text()
        print(text.rstrip())
        verdicts = [ln.split("=", 1)[1].strip() for ln in text.splitlines()
                    if ln.startswith("verdict =")]
        if any(v not in (CONSISTENT, INCONSISTENT) for v in verdicts):
            code = INCONCLUSIVE_ERROR
    return code


_COMMANDS = {
    "predict": _cmd_predict,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "iterate": _cmd_iterate,
    "functional": _cmd_functional,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
