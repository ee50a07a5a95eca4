"""Experiment harness: eps sweeps, scaling-law fits, persistence.

A sweep runs `estimate_lifespan` over a geometric eps grid (optionally in a
process pool; cells are independent and aggregation is an ordered reduce,
so results are bit-identical for any worker count), fits the measured
(eps, T) cloud in log space, and compares the fitted exponent against the
predicted law.  Exports are byte-stable: no timestamps, shortest-repr
floats, fixed row order.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__
from .model import ProblemSpec
from .regimes import OutsideTheorems, Prediction, ScalingLaw, evaluate_law, predict, query_from_spec
from .solver import BLOWUP, GridConfig, LifespanEstimate, estimate_lifespan

__all__ = [
    "SweepConfig",
    "SweepRow",
    "FitReport",
    "SweepResult",
    "DegenerateFitError",
    "run_sweep",
    "fit_power_law",
    "fit_exp_law",
    "fit_against_law",
    "export",
]

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"


class DegenerateFitError(ValueError):
    """The point cloud cannot support a least-squares fit."""


@dataclass(frozen=True)
class SweepConfig:
    """Template problem, eps grid, grid config and execution knobs."""

    template: ProblemSpec
    eps_max: float
    eps_min: float
    count: int
    grid: GridConfig
    workers: int = 1
    fit_tolerance: float = 0.15
    expected: Optional[Prediction] = None

    def __post_init__(self) -> None:
        if not (self.eps_max > self.eps_min > 0):
            raise ValueError("need eps_max > eps_min > 0 (strictly decreasing grid)")
        if self.count < 4:
            raise ValueError("count >= 4 required (fits need at least 4 points)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 < self.fit_tolerance < 1:
            raise ValueError("fit_tolerance must be in (0, 1)")

    def eps_grid(self) -> np.ndarray:
        return np.geomspace(self.eps_max, self.eps_min, self.count)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    estimate: LifespanEstimate

    @property
    def t_num(self) -> float:
        return self.estimate.t_num

    @property
    def status(self) -> str:
        return self.estimate.status


@dataclass(frozen=True)
class FitReport:
    """One least-squares fit of the (eps, T) cloud with a verdict."""

    law_kind: str  # "power" | "exp"
    slope: float
    intercept: float
    stderr_slope: float
    stderr_intercept: float
    r2: float
    residuals: tuple[float, ...]
    n_points: int
    expected_exponent: Optional[float]
    verdict: str
    note: str = ""
    rival_r2: Optional[float] = None

    @property
    def fitted_exponent(self) -> float:
        """Exponent estimate: -slope for power fits, slope is C for exp fits."""
        return -self.slope if self.law_kind == "power" else self.slope


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    fits: tuple[FitReport, ...]
    expected: Optional[Prediction]
    provenance: dict[str, str] = field(default_factory=dict)

    def clean_points(self) -> tuple[np.ndarray, np.ndarray]:
        """(eps, T) of blow-up rows only; horizon/inconclusive rows never
        enter slope fits."""
        eps = [r.epsilon for r in self.rows if r.status == BLOWUP]
        ts = [r.t_num for r in self.rows if r.status == BLOWUP]
        return np.asarray(eps), np.asarray(ts)


def _ols(x: np.ndarray, y: np.ndarray):
    n = x.size
    xbar, ybar = float(np.mean(x)), float(np.mean(y))
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise DegenerateFitError("all abscissae equal; cannot fit a slope")
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = ybar - slope * xbar
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - ybar) ** 2))
    # zero-variance data is fit perfectly by its constant
    degenerate_y = ss_tot <= 1e-20 * n * max(1.0, ybar**2)
    r2 = 1.0 if degenerate_y or ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    dof = max(n - 2, 1)
    se_slope = math.sqrt(ss_res / dof / sxx)
    se_intercept = se_slope * math.sqrt(float(np.mean(x**2)))
    return slope, intercept, se_slope, se_intercept, r2, resid


def _verdict_power(fitted: float, expected: Optional[float], r2: float, tol: float) -> str:
    if expected is None:
        return INCONCLUSIVE
    if r2 < 0.98:
        return INCONCLUSIVE
    return CONSISTENT if abs(fitted - expected) / abs(expected) <= tol else INCONSISTENT


def fit_power_law(
    eps: Sequence[float],
    ts: Sequence[float],
    expected_exponent: Optional[float] = None,
    tolerance: float = 0.15,
) -> FitReport:
    """OLS on (ln eps, ln T); slope = -exponent estimate."""
    eps = np.asarray(eps, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if eps.size < 4:
        raise DegenerateFitError("need at least 4 points")
    if np.any(~np.isfinite(ts)) or np.any(ts <= 0):
        raise DegenerateFitError("all T must be finite and positive")
    slope, intercept, se_s, se_i, r2, resid = _ols(np.log(eps), np.log(ts))
    verdict = _verdict_power(-slope, expected_exponent, r2, tolerance)
    return FitReport(
        law_kind="power",
        slope=slope,
        intercept=intercept,
        stderr_slope=se_s,
        stderr_intercept=se_i,
        r2=r2,
        residuals=tuple(float(v) for v in resid),
        n_points=int(eps.size),
        expected_exponent=expected_exponent,
        verdict=verdict,
    )


def fit_exp_law(
    eps: Sequence[float],
    ts: Sequence[float],
    exponent_hypothesis: float,
    tolerance: float = 0.15,
) -> FitReport:
    """ln T against eps^(-e): linearity supports T ~ exp(C eps^(-e)).

    The competing pure power fit is run as well; the verdict requires the
    exponential model to fit at least as well.
    """
    eps = np.asarray(eps, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if eps.size < 4:
        raise DegenerateFitError("need at least 4 points")
    if np.any(~np.isfinite(ts)) or np.any(ts <= 0):
        raise DegenerateFitError("all T must be finite and positive")
    slope, intercept, se_s, se_i, r2, resid = _ols(eps ** (-exponent_hypothesis), np.log(ts))
    rival = fit_power_law(eps, ts)
    if r2 >= 0.98 and r2 >= rival.r2 and slope > 0:
        verdict = CONSISTENT
    elif r2 < 0.98:
        verdict = INCONCLUSIVE
    else:
        verdict = INCONSISTENT
    return FitReport(
        law_kind="exp",
        slope=slope,
        intercept=intercept,
        stderr_slope=se_s,
        stderr_intercept=se_i,
        r2=r2,
        residuals=tuple(float(v) for v in resid),
        n_points=int(eps.size),
        expected_exponent=exponent_hypothesis,
        verdict=verdict,
        note=f"power rival r2={rival.r2!r}",
        rival_r2=rival.r2,
    )


def fit_against_law(
    eps: Sequence[float],
    ts: Sequence[float],
    law: ScalingLaw,
) -> tuple[float, float]:
    """Best scale constant C and the log-space residual norm against a law.

    This is how log-corrected predictions are checked: neither a pure power
    nor a pure exponential fit is faithful, so the measured cloud is
    compared with the evaluated law curve directly.
    """
    eps = np.asarray(eps, dtype=float)
    ts = np.asarray(ts, dtype=float)

    def cost(log_c: float) -> float:
        c = math.exp(log_c)
        pred = np.array([evaluate_law(law, e, c) for e in eps])
        if np.any(~np.isfinite(pred)) or np.any(pred <= 0):
            return 1e300
        return float(np.sum((np.log(ts) - np.log(pred)) ** 2))

    res = minimize_scalar(cost, bounds=(-20.0, 20.0), method="bounded")
    c = math.exp(res.x)
    return c, math.sqrt(cost(res.x) / eps.size)


def _lifespan_cell(args: tuple[ProblemSpec, GridConfig]) -> LifespanEstimate:
    spec, grid = args
    return estimate_lifespan(spec, grid)


def _config_hash(cfg: SweepConfig) -> str:
    text = repr((cfg.template, cfg.eps_max, cfg.eps_min, cfg.count, cfg.grid, cfg.fit_tolerance))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run the sweep (parallel over eps cells) and attach fits.

    Failed or non-blow-up cells keep their status in the row table; fits
    proceed when at least 4 clean blow-up points remain.
    """
    eps_grid = cfg.eps_grid()
    jobs = [(cfg.template.with_epsilon(float(e)), cfg.grid) for e in eps_grid]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            estimates = list(pool.map(_lifespan_cell, jobs))
    else:
        estimates = [_lifespan_cell(j) for j in jobs]
    rows = tuple(
        SweepRow(epsilon=float(e), estimate=est) for e, est in zip(eps_grid, estimates)
    )

    expected = cfg.expected
    if expected is None:
        expected = predict(query_from_spec(cfg.template))

    fits: list[FitReport] = []
    clean_eps = np.asarray([r.epsilon for r in rows if r.status == BLOWUP])
    clean_ts = np.asarray([r.t_num for r in rows if r.status == BLOWUP])
    if clean_eps.size >= 4:
        if isinstance(expected, ScalingLaw) and expected.kind == "power":
            fits.append(
                fit_power_law(clean_eps, clean_ts, expected.exponent, cfg.fit_tolerance)
            )
        elif isinstance(expected, ScalingLaw) and expected.kind == "exp":
            fits.append(fit_exp_law(clean_eps, clean_ts, expected.exponent, cfg.fit_tolerance))
            fits.append(fit_power_law(clean_eps, clean_ts, None, cfg.fit_tolerance))
        else:
            # no usable exponent hypothesis: report the plain power fit
            fits.append(fit_power_law(clean_eps, clean_ts, None, cfg.fit_tolerance))

    provenance = {
        "config_hash": _config_hash(cfg),
        "code_version": __version__,
        "label": cfg.template.label,
        "expected": _describe_prediction(expected),
    }
    return SweepResult(rows=rows, fits=tuple(fits), expected=expected, provenance=provenance)


def _describe_prediction(pred: Optional[Prediction]) -> str:
    if pred is None:
        return "none"
    if isinstance(pred, OutsideTheorems):
        return f"outside known results: {pred.reason}"
    return f"{pred.branch}: {pred.describe()}"


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf"
    if math.isnan(v):
        return "nan"
    return repr(float(v))


def export(result: SweepResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write rows CSV and a structured text report; bit-identical per input."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "sweep.csv"
        lines = ["epsilon,T_num,T_uncertainty,status"]
        for row in result.rows:
            lines.append(
                f"{_fmt(row.epsilon)},{_fmt(row.t_num)},"
                f"{_fmt(row.estimate.uncertainty)},{row.status}"
            )
        csv_path.write_text("\n".join(lines) + "\n")

        rep_path = out / "report.txt"
        rep: list[str] = ["[provenance]"]
        for key in sorted(result.provenance):
            rep.append(f"{key} = {result.provenance[key]}")
        rep.append("")
        for i, fit in enumerate(result.fits):
            rep.append(f"[fit.{i}]")
            rep.append(f"law_kind = {fit.law_kind}")
            rep.append(f"slope = {_fmt(fit.slope)}")
            rep.append(f"intercept = {_fmt(fit.intercept)}")
            rep.append(f"stderr_slope = {_fmt(fit.stderr_slope)}")
            rep.append(f"r2 = {_fmt(fit.r2)}")
            rep.append(f"n_points = {fit.n_points}")
            exp = fit.expected_exponent
            rep.append(f"expected_exponent = {_fmt(exp) if exp is not None else 'none'}")
            rep.append(f"fitted_exponent = {_fmt(fit.fitted_exponent)}")
            rep.append(f"verdict = {fit.verdict}")
            if fit.note:
                rep.append(f"note = {fit.note}")
            rep.append("")
        rep_path.write_text("\n".join(rep))
        return csv_path, rep_path
    except OSError as exc:
        raise OSError(f"export to {out} failed: {exc}") from exc
