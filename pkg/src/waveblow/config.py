"""Structured-text configuration: [problem], [data], [grid], [sweep], [query].

Unknown keys are hard errors, and every side condition of the model types
is checked at parse time with the violated condition named, so a bad file
never reaches the solvers.
"""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .model import (
    Bump,
    CharacteristicWeight,
    ConstantWeight,
    InitialData,
    GradientTerm,
    MixedDerivativeTerm,
    PowerTerm,
    ProblemSpec,
    SmoothMonomialTerm,
    Term,
    TimePowerWeight,
    Weight,
    ZeroWeight,
)
from .regimes import RegimeQuery
from .solver import GridConfig
from .sweep import SweepConfig

__all__ = [
    "ConfigError",
    "ParseError",
    "ValidationError",
    "parse_config",
    "parse_problem",
    "parse_grid",
    "parse_sweep_config",
    "parse_query",
]


class ConfigError(ValueError):
    """Base class for configuration failures."""


class ParseError(ConfigError):
    def __init__(self, reason: str, key: str = "", line: int | None = None):
        self.key = key
        self.line = line
        loc = f" (key {key!r})" if key else ""
        loc += f" (line {line})" if line is not None else ""
        super().__init__(f"parse error{loc}: {reason}")


class ValidationError(ConfigError):
    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(f"validation failed: {condition}")


def _check_keys(tbl: dict, allowed: set[str], where: str) -> None:
    for key in tbl:
        if key not in allowed:
            raise ParseError(f"unknown key in [{where}]", key=key)


def _num(tbl: dict, key: str, where: str, default=None, required: bool = False) -> float | None:
    if key not in tbl:
        if required:
            raise ParseError(f"missing required key in [{where}]", key=key)
        return default
    v = tbl[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"key must be a number in [{where}]", key=key)
    return float(v)


def _int(tbl: dict, key: str, where: str, default=None, required: bool = False) -> int | None:
    if key not in tbl:
        if required:
            raise ParseError(f"missing required key in [{where}]", key=key)
        return default
    v = tbl[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"key must be an integer in [{where}]", key=key)
    return v


def _parse_weight(tbl: Any, where: str) -> Weight:
    if tbl is None:
        return ConstantWeight(1.0)
    if not isinstance(tbl, dict):
        raise ParseError("weight must be a table", key="weight")
    kind = tbl.get("kind")
    try:
        if kind == "constant":
            _check_keys(tbl, {"kind", "value"}, where + ".weight")
            return ConstantWeight(_num(tbl, "value", where, default=1.0))
        if kind == "characteristic":
            _check_keys(tbl, {"kind", "a", "b", "c"}, where + ".weight")
            return CharacteristicWeight(
                a=_num(tbl, "a", where, default=-1.0),
                b=_num(tbl, "b", where, default=-1.0),
                c=_num(tbl, "c", where, default=-1.0),
            )
        if kind == "time_power":
            _check_keys(tbl, {"kind", "k"}, where + ".weight")
            return TimePowerWeight(k=_num(tbl, "k", where, required=True))
        if kind == "zero":
            _check_keys(tbl, {"kind"}, where + ".weight")
            return ZeroWeight()
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ValidationError(str(exc)) from exc
    raise ParseError(f"unknown weight kind {kind!r}", key="kind")


def _parse_term(tbl: dict, where: str) -> Term:
    kind = tbl.get("kind")
    weight = _parse_weight(tbl.get("weight"), where)
    try:
        if kind == "power":
            _check_keys(tbl, {"kind", "r", "weight"}, where)
            r = _num(tbl, "r", where, required=True)
            if not r > 1.0:
                raise ValidationError("r > 1 required")
            return PowerTerm(r=r, weight=weight)
        if kind == "mixed":
            _check_keys(tbl, {"kind", "p", "q", "weight"}, where)
            p = _num(tbl, "p", where, required=True)
            q = _num(tbl, "q", where, default=0.0)
            if not p > 1.0:
                raise ValidationError("p > 1 required")
            if not q >= 0.0:
                raise ValidationError("q >= 0 required")
            return MixedDerivativeTerm(p=p, q=q, weight=weight)
        if kind == "gradient":
            _check_keys(tbl, {"kind", "p", "weight"}, where)
            p = _num(tbl, "p", where, required=True)
            if not p > 1.0:
                raise ValidationError("p > 1 required")
            return GradientTerm(p=p, weight=weight)
        if kind == "smooth":
            _check_keys(tbl, {"kind", "p", "q", "r", "weight"}, where)
            return SmoothMonomialTerm(
                p=_int(tbl, "p", where, default=0),
                q=_int(tbl, "q", where, default=0),
                r=_int(tbl, "r", where, default=0),
                weight=weight,
            )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ValidationError(str(exc)) from exc
    raise ParseError(f"unknown term kind {kind!r}", key="kind")


def _parse_bumps(entries: Any, where: str) -> tuple[Bump, ...]:
    if entries is None:
        return ()
    if not isinstance(entries, list):
        raise ParseError(f"[{where}] must be an array of bump tables", key=where)
    bumps = []
    for i, tbl in enumerate(entries):
        if not isinstance(tbl, dict):
            raise ParseError(f"bump {i} in [{where}] must be a table", key=where)
        _check_keys(tbl, {"center", "amplitude", "width"}, f"{where}[{i}]")
        try:
            bumps.append(
                Bump(
                    center=_num(tbl, "center", where, default=0.0),
                    amplitude=_num(tbl, "amplitude", where, required=True),
                    width=_num(tbl, "width", where, required=True),
                )
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ValidationError(str(exc)) from exc
    return tuple(bumps)


def parse_data(tbl: dict) -> InitialData:
    _check_keys(tbl, {"radius", "f", "g"}, "data")
    radius = _num(tbl, "radius", "data", required=True)
    try:
        return InitialData(
            f_bumps=_parse_bumps(tbl.get("f"), "data.f"),
            g_bumps=_parse_bumps(tbl.get("g"), "data.g"),
            radius=radius,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ValidationError(str(exc)) from exc


def parse_problem(doc: dict) -> ProblemSpec:
    if "problem" not in doc:
        raise ParseError("missing [problem] section", key="problem")
    if "data" not in doc:
        raise ParseError("missing [data] section", key="data")
    tbl = doc["problem"]
    _check_keys(tbl, {"label", "epsilon", "terms"}, "problem")
    epsilon = _num(tbl, "epsilon", "problem", required=True)
    label = tbl.get("label", "")
    if not isinstance(label, str):
        raise ParseError("label must be a string", key="label")
    terms_tbl = tbl.get("terms", [])
    if not isinstance(terms_tbl, list):
        raise ParseError("problem.terms must be an array of tables", key="terms")
    terms = tuple(_parse_term(t, f"problem.terms[{i}]") for i, t in enumerate(terms_tbl))
    data = parse_data(doc["data"])
    try:
        return ProblemSpec(terms=terms, data=data, epsilon=epsilon, label=label)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ValidationError(str(exc)) from exc


def parse_grid(doc: dict, overrides: dict | None = None) -> GridConfig:
    tbl = dict(doc.get("grid", {}))
    _check_keys(
        tbl,
        {"h", "t_max", "threshold", "x_margin", "refinement_levels", "snapshot_every",
         "track_moments"},
        "grid",
    )
    if overrides:
        tbl.update({k: v for k, v in overrides.items() if v is not None})
    kwargs = {}
    for key in ("h", "t_max", "threshold", "x_margin"):
        v = _num(tbl, key, "grid")
        if v is not None:
            kwargs[key] = v
    for key in ("refinement_levels", "snapshot_every"):
        v = _int(tbl, key, "grid")
        if v is not None:
            kwargs[key] = v
    if "track_moments" in tbl:
        if not isinstance(tbl["track_moments"], bool):
            raise ParseError("track_moments must be a boolean", key="track_moments")
        kwargs["track_moments"] = tbl["track_moments"]
    if "h" not in kwargs or "t_max" not in kwargs:
        raise ParseError("grid needs h and t_max (file key or flag)", key="grid")
    try:
        return GridConfig(**kwargs)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def parse_sweep_config(doc: dict, overrides: dict | None = None) -> SweepConfig:
    if "sweep" not in doc:
        raise ParseError("missing [sweep] section", key="sweep")
    template = parse_problem(doc)
    grid = parse_grid(doc, overrides)
    tbl = doc["sweep"]
    _check_keys(tbl, {"eps_max", "eps_min", "count", "workers", "fit_tolerance"}, "sweep")
    workers = _int(tbl, "workers", "sweep", default=1)
    if overrides and overrides.get("workers") is not None:
        workers = overrides["workers"]
    try:
        return SweepConfig(
            template=template,
            eps_max=_num(tbl, "eps_max", "sweep", required=True),
            eps_min=_num(tbl, "eps_min", "sweep", required=True),
            count=_int(tbl, "count", "sweep", required=True),
            grid=grid,
            workers=workers,
            fit_tolerance=_num(tbl, "fit_tolerance", "sweep", default=0.15),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ValidationError(str(exc)) from exc


def parse_query(doc: dict) -> RegimeQuery:
    if "query" not in doc:
        raise ParseError("missing [query] section", key="query")
    tbl = doc["query"]
    _check_keys(
        tbl,
        {"mixed_p", "mixed_q", "power_r", "gradient_p", "zero_mean", "weight"},
        "query",
    )
    mixed = None
    if "mixed_p" in tbl:
        mixed = (
            _num(tbl, "mixed_p", "query", required=True),
            _num(tbl, "mixed_q", "query", default=0.0),
        )
    zero_mean = tbl.get("zero_mean", False)
    if not isinstance(zero_mean, bool):
        raise ParseError("zero_mean must be a boolean", key="zero_mean")
    return RegimeQuery(
        mixed=mixed,
        power=_num(tbl, "power_r", "query"),
        gradient=_num(tbl, "gradient_p", "query"),
        weight=_parse_weight(tbl.get("weight"), "query"),
        g_mean_zero=zero_mean,
    )


def load_document(path: str | Path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"config file not found: {p}")
    try:
        with open(p, "rb") as fh:
            return _toml.load(fh)
    except _toml.TOMLDecodeError as exc:
        line = None
        msg = str(exc)
        if "line" in msg:
            try:
                line = int(msg.split("line")[1].split(",")[0].strip())
            except (ValueError, IndexError):
                line = None
        raise ParseError(msg, line=line) from exc


def parse_config(path: str | Path):
    """Auto-detect the object a file describes: sweep, problem or query."""
    doc = load_document(path)
    if "sweep" in doc:
        return parse_sweep_config(doc)
    if "query" in doc:
        return parse_query(doc)
    if "problem" in doc:
        return parse_problem(doc)
    raise ParseError("file has none of [sweep], [problem], [query]")
