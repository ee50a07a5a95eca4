"""Atlas of sharp lifespan scaling laws T(eps) for the 1D model family.

Each supported regime (which nonlinear terms are present, how their
coefficients decay in space-time, whether the initial speed has zero mean)
maps to exactly one law:

    Global              T(eps) = infinity for small eps
    PowerLaw(e)         T(eps) ~ C * eps^(-e)
    ExpLaw(e)           T(eps) ~ exp(C * eps^(-e))
    LogInverse(...)     T(eps) given implicitly through s^mu log^nu(shift+s)

Branch predicates are evaluated exhaustively and must select exactly one
branch; queries not covered by any known result come back as an explicit
`OutsideTheorems` value instead of a guess.  All exponent formulas are
plain Python arithmetic so they stay exact under `fractions.Fraction`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .model import (
    CharacteristicWeight,
    ConstantWeight,
    GeneralTheoryParams,
    GradientTerm,
    MixedDerivativeTerm,
    PowerTerm,
    ProblemSpec,
    SmoothMonomialTerm,
    TimePowerWeight,
    Weight,
    ZeroWeight,
)

__all__ = [
    "LogLaw",
    "ScalingLaw",
    "OutsideTheorems",
    "RegimeQuery",
    "NotMonotoneError",
    "predict",
    "query_from_spec",
    "general_theory_bound",
    "improved_general_bound",
    "evaluate_law",
    "invert_law",
    "combined_window",
    "combined_exponent",
    "conjectured_exponent",
    "general_theory_exponent",
    "improved_vanishing_exponent",
]


class NotMonotoneError(ValueError):
    """Log-law parameters violate the side condition that makes it invertible."""


# ---------------------------------------------------------------------------
# log-corrected laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogLaw:
    """s |-> s^mu * log^nu(shift + s), strictly increasing on (0, inf) for mu > 0."""

    label: str
    mu: float
    nu: float
    shift: float = 2.0

    @staticmethod
    def phi() -> "LogLaw":
        return LogLaw("phi", 1.0, 1.0)

    @staticmethod
    def psi(p: float) -> "LogLaw":
        return LogLaw("psi", 1.0, p)

    @staticmethod
    def phi1(a: float) -> "LogLaw":
        return LogLaw("phi1", -a, 1.0)

    @staticmethod
    def psi1(p: float, a: float) -> "LogLaw":
        return LogLaw("psi1", -p * a, 1.0)

    @staticmethod
    def psi2(p: float, b: float) -> "LogLaw":
        return LogLaw("psi2", -b, p - 1.0)

    @staticmethod
    def b_implicit() -> "LogLaw":
        return LogLaw("b_implicit", 1.0, 1.0, shift=1.0)

    def __call__(self, s: float) -> float:
        return s**self.mu * math.log(self.shift + s) ** self.nu


def invert_law(law: LogLaw, y: float) -> float:
    """Solve law(s) = y by bracketed bisection to relative 1e-12."""
    if not (law.mu > 0.0 and law.nu >= 0.0):
        raise NotMonotoneError(
            f"log law {law.label} needs mu > 0 (got mu={law.mu}); not invertible"
        )
    if not y > 0.0:
        raise ValueError("y must be > 0")
    lo, hi = 0.0, 1.0
    while law(hi) < y:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise OverflowError("bisection bracket exceeded 1e300")
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        if law(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# scaling laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingLaw:
    """One lifespan law with the branch tag and condition that selected it."""

    kind: str  # "global" | "power" | "exp" | "log_inverse"
    exponent: float | None = None
    log_law: LogLaw | None = None
    inner_exponent: float | None = None
    scale_outside: bool = False
    branch: str = ""
    condition: str = ""

    def __post_init__(self) -> None:
        if self.kind in ("power", "exp") and not (self.exponent is not None and self.exponent > 0):
            raise ValueError(f"{self.kind} law requires a positive exponent")
        if self.kind == "log_inverse" and (self.log_law is None or self.inner_exponent is None):
            raise ValueError("log_inverse law requires log_law and inner_exponent")

    def describe(self) -> str:
        if self.kind == "global":
            return "T(eps) = infinity for small eps"
        if self.kind == "power":
            return f"T(eps) ~ C * eps^(-{self.exponent:g})"
        if self.kind == "exp":
            return f"T(eps) ~ exp(C * eps^(-{self.exponent:g}))"
        ll = self.log_law
        core = f"s^{ll.mu:g} * log^{ll.nu:g}({ll.shift:g}+s)"
        if self.scale_outside:
            return f"T(eps) ~ C * s(eps) where s solves {core} = eps^(-{self.inner_exponent:g})"
        return f"T(eps) ~ s where {core} = C * eps^(-{self.inner_exponent:g})"


@dataclass(frozen=True)
class OutsideTheorems:
    """Explicit no-prediction value naming the closest covered regime."""

    reason: str
    nearest: str = ""


Prediction = Union[ScalingLaw, OutsideTheorems]


def _power(e, branch: str, cond: str) -> ScalingLaw:
    return ScalingLaw(kind="power", exponent=float(e), branch=branch, condition=cond)


def _exp(e, branch: str, cond: str) -> ScalingLaw:
    return ScalingLaw(kind="exp", exponent=float(e), branch=branch, condition=cond)


def _log(law: LogLaw, inner, branch: str, cond: str, outside: bool = False) -> ScalingLaw:
    return ScalingLaw(
        kind="log_inverse",
        log_law=law,
        inner_exponent=float(inner),
        scale_outside=outside,
        branch=branch,
        condition=cond,
    )


def _global(branch: str, cond: str) -> ScalingLaw:
    return ScalingLaw(kind="global", branch=branch, condition=cond)


# ---------------------------------------------------------------------------
# exponent formulas (exact under Fraction inputs)
# ---------------------------------------------------------------------------

def combined_exponent(p, q, r):
    """(p+q)(r-1)/(r+1), the combined-effect lifespan exponent."""
    return (p + q) * (r - 1) / (r + 1)


def single_power_exponent(r, zero_mean: bool):
    """Lifespan exponent of the single |u|^r term with constant coefficient."""
    return r * (r - 1) / (r + 1) if zero_mean else (r - 1) / 2


def conjectured_exponent(p, q, r, zero_mean: bool):
    """min of the two single-term exponents (valid outside the combined window)."""
    return min(p + q - 1, single_power_exponent(r, zero_mean))


def combined_window(p: float, q: float, r: float) -> bool:
    """(r+1)/2 < p+q < r, the strict window where the combined effect wins."""
    return (r + 1) / 2 < p + q < r


def general_theory_exponent(alpha, beta0=None, u_power_vanishing=False, g_mean_zero=False):
    """Best classical lower-bound exponent: all applicable branches, max taken."""
    candidates = [alpha / 2]
    if g_mean_zero:
        candidates.append(alpha * (1 + alpha) / (2 + alpha))
    if u_power_vanishing:
        candidates.append(min(beta0 / 2, alpha))
    return max(candidates)


def improved_vanishing_exponent(alpha, beta0, g_mean_zero: bool):
    """Refined lower-bound exponent under vanishing pure-u derivatives."""
    if g_mean_zero:
        return min((alpha + 1) * beta0 / (beta0 + 2), alpha)
    return min(beta0 / 2, alpha)


def general_theory_bound(params: GeneralTheoryParams) -> ScalingLaw:
    e = general_theory_exponent(
        params.alpha, params.beta0, params.u_power_vanishing, params.g_mean_zero
    )
    flags = []
    if params.g_mean_zero:
        flags.append("zero-mean speed")
    if params.u_power_vanishing:
        flags.append(f"pure-u derivatives vanish through order {params.beta0}")
    cond = ", ".join(flags) if flags else "no structure flags"
    return _power(e, "general-theory", f"alpha={params.alpha}, {cond}")


def improved_general_bound(params: GeneralTheoryParams) -> ScalingLaw:
    if not params.u_power_vanishing:
        raise ValueError("improved bound applies only with u_power_vanishing set")
    e = improved_vanishing_exponent(params.alpha, params.beta0, params.g_mean_zero)
    cond = (
        f"alpha={params.alpha}, beta0={params.beta0}, "
        f"{'zero' if params.g_mean_zero else 'nonzero'}-mean speed"
    )
    return _power(e, "general-theory-refined", cond)


# ---------------------------------------------------------------------------
# branch tables
# ---------------------------------------------------------------------------
# Each table is a list of (predicate, builder) pairs; dispatch checks that
# exactly one predicate fires, which doubles as the partition invariant.

def _dispatch(table, args, plane: str) -> ScalingLaw:
    hits = [build for pred, build in table if pred(*args)]
    if len(hits) != 1:
        raise AssertionError(f"{plane} branch table fired {len(hits)} branches at {args}")
    return hits[0](*args)


# |u|^p with two-characteristic decay <t+<x>>^-(1+a) <t-<x>>^-(1+b)
_CHAR_U_NONZERO = [
    (lambda a, b, p: a > 0 and a + b > 0,
     lambda a, b, p: _global("char-u/global", f"a={a:g}>0, a+b={a + b:g}>0")),
    (lambda a, b, p: (a > 0 and a + b == 0) or (a == 0 and b > 0),
     lambda a, b, p: _exp(p - 1, "char-u/nonzero/critical-line", f"a={a:g}, b={b:g} on critical line")),
    (lambda a, b, p: a == 0 and b == 0,
     lambda a, b, p: _exp((p - 1) / 2, "char-u/nonzero/origin", "a=b=0")),
    (lambda a, b, p: a < 0 and b > 0,
     lambda a, b, p: _power((p - 1) / (-a), "char-u/nonzero/a<0,b>0", f"a={a:g}<0, b={b:g}>0")),
    (lambda a, b, p: a < 0 and b == 0,
     lambda a, b, p: _log(LogLaw.phi1(a), p - 1, "char-u/nonzero/a<0,b=0", f"a={a:g}<0, b=0")),
    (lambda a, b, p: a + b < 0 and b < 0,
     lambda a, b, p: _power((p - 1) / (-a - b), "char-u/nonzero/subcritical",
                            f"a+b={a + b:g}<0, b={b:g}<0")),
]

_CHAR_U_ZERO = [
    (lambda a, b, p: a > 0 and a + b > 0,
     lambda a, b, p: _global("char-u/global", f"a={a:g}>0, a+b={a + b:g}>0")),
    (lambda a, b, p: a == 0 and b > 0,
     lambda a, b, p: _exp(p - 1, "char-u/zero/a=0,b>0", f"a=0, b={b:g}>0")),
    (lambda a, b, p: a > 0 and a + b == 0,
     lambda a, b, p: _exp(p * (p - 1), "char-u/zero/a>0,a+b=0", f"a={a:g}>0, a+b=0")),
    (lambda a, b, p: a == 0 and b == 0,
     lambda a, b, p: _exp(p * (p - 1) / (p + 1), "char-u/zero/origin", "a=b=0")),
    (lambda a, b, p: a < 0 and b > 0,
     lambda a, b, p: _power((p - 1) / (-a), "char-u/zero/a<0,b>0", f"a={a:g}<0, b={b:g}>0")),
    (lambda a, b, p: a < 0 and b == 0,
     lambda a, b, p: _log(LogLaw.psi1(p, a), p * (p - 1), "char-u/zero/a<0,b=0", f"a={a:g}<0, b=0")),
    (lambda a, b, p: a < 0 and b < 0,
     lambda a, b, p: _power(p * (p - 1) / (-p * a - b), "char-u/zero/a<0,b<0",
                            f"a={a:g}<0, b={b:g}<0")),
    (lambda a, b, p: a == 0 and b < 0,
     lambda a, b, p: _log(LogLaw.psi2(p, b), p * (p - 1), "char-u/zero/a=0,b<0", f"a=0, b={b:g}<0")),
    (lambda a, b, p: a + b < 0 and a > 0,
     lambda a, b, p: _power(p * (p - 1) / (-a - b), "char-u/zero/a>0,a+b<0",
                            f"a={a:g}>0, a+b={a + b:g}<0")),
]

# |u_t|^p with two-characteristic decay (data-independent)
_CHAR_UT = [
    (lambda a, b, p: a > 0 and p * (1 + a) + b > 0,
     lambda a, b, p: _global("char-ut/global", f"a={a:g}>0, p(1+a)+b={p * (1 + a) + b:g}>0")),
    (lambda a, b, p: a > 0 and p * (1 + a) + b == 0,
     lambda a, b, p: _exp(p * (p - 1), "char-ut/critical-line", f"a={a:g}>0, p(1+a)+b=0")),
    (lambda a, b, p: a == 0 and b >= -p,
     lambda a, b, p: _exp(p - 1, "char-ut/a=0", f"a=0, b={b:g}>=-p")),
    (lambda a, b, p: a < 0 and b >= -p,
     lambda a, b, p: _power((p - 1) / (-a), "char-ut/a<0", f"a={a:g}<0, b={b:g}>=-p")),
    (lambda a, b, p: p * (1 + a) + b < 0 and b < -p,
     lambda a, b, p: _power(p * (p - 1) / (-p * (1 + a) - b), "char-ut/steep-b",
                            f"p(1+a)+b={p * (1 + a) + b:g}<0, b={b:g}<-p")),
]

# |u|^p with spatial decay <x>^-(1+c)
_SPATIAL_U_NONZERO = [
    (lambda c, p: c < 0, lambda c, p: _power((p - 1) / (1 - c), "spatial-u/nonzero/c<0", f"c={c:g}<0")),
    (lambda c, p: c == 0, lambda c, p: _log(LogLaw.phi(), p - 1, "spatial-u/nonzero/c=0", "c=0")),
    (lambda c, p: c > 0, lambda c, p: _power(p - 1, "spatial-u/nonzero/c>0", f"c={c:g}>0")),
]

_SPATIAL_U_ZERO = [
    (lambda c, p: c < 0,
     lambda c, p: _power(p * (p - 1) / (1 - p * c), "spatial-u/zero/c<0", f"c={c:g}<0")),
    (lambda c, p: c == 0, lambda c, p: _log(LogLaw.psi(p), p * (p - 1), "spatial-u/zero/c=0", "c=0")),
    (lambda c, p: c > 0, lambda c, p: _power(p * (p - 1), "spatial-u/zero/c>0", f"c={c:g}>0")),
]

# |u_t|^p with spatial decay (data-independent)
_SPATIAL_UT = [
    (lambda c, p: c < 0, lambda c, p: _power((p - 1) / (-c), "spatial-ut/c<0", f"c={c:g}<0")),
    (lambda c, p: c == 0, lambda c, p: _exp(p - 1, "spatial-ut/c=0", "c=0")),
    (lambda c, p: c > 0, lambda c, p: _global("spatial-ut/c>0", f"c={c:g}>0")),
]

# |u|^p with (1+t)^-(p-1) weight: the scale-invariant-damping correspondence
_TIMEPOWER_U_NONZERO = [
    (lambda p: 1 < p < 3,
     lambda p: _power((p - 1) / (3 - p), "timepower-u/nonzero/heat-like", f"1<p={p:g}<3")),
    (lambda p: p == 3, lambda p: _exp(p - 1, "timepower-u/nonzero/critical", "p=3")),
    (lambda p: p > 3, lambda p: _global("timepower-u/global", f"p={p:g}>3")),
]

_TIMEPOWER_U_ZERO = [
    (lambda p: 1 < p < 2,
     lambda p: _power(p * (p - 1) / (1 + 2 * p - p * p), "timepower-u/zero/wave-like-low",
                      f"1<p={p:g}<2")),
    (lambda p: p == 2,
     lambda p: _log(LogLaw.b_implicit(), 2.0, "timepower-u/zero/p=2", "p=2", outside=True)),
    (lambda p: 2 < p < 3,
     lambda p: _power(p * (p - 1) / (3 - p), "timepower-u/zero/wave-like-high", f"2<p={p:g}<3")),
    (lambda p: p == 3, lambda p: _exp(p * (p - 1), "timepower-u/zero/critical", "p=3")),
    (lambda p: p > 3, lambda p: _global("timepower-u/global", f"p={p:g}>3")),
]


def char_u_law(a: float, b: float, p: float, zero_mean: bool) -> ScalingLaw:
    table = _CHAR_U_ZERO if zero_mean else _CHAR_U_NONZERO
    return _dispatch(table, (a, b, p), "char-u")


def char_ut_law(a: float, b: float, p: float) -> ScalingLaw:
    return _dispatch(_CHAR_UT, (a, b, p), "char-ut")


def spatial_u_law(c: float, p: float, zero_mean: bool) -> ScalingLaw:
    table = _SPATIAL_U_ZERO if zero_mean else _SPATIAL_U_NONZERO
    return _dispatch(table, (c, p), "spatial-u")


def spatial_ut_law(c: float, p: float) -> ScalingLaw:
    return _dispatch(_SPATIAL_UT, (c, p), "spatial-ut")


def timepower_u_law(p: float, zero_mean: bool) -> ScalingLaw:
    table = _TIMEPOWER_U_ZERO if zero_mean else _TIMEPOWER_U_NONZERO
    return _dispatch(table, (p,), "timepower-u")


# ---------------------------------------------------------------------------
# query and dispatcher
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeQuery:
    """Which terms are present, their exponents, the shared weight, data class."""

    mixed: tuple[float, float] | None = None  # (p, q) of |u_t|^p |u|^q
    power: float | None = None  # r of |u|^r
    gradient: float | None = None  # p of |u_x|^p
    weight: Weight = field(default_factory=ConstantWeight)
    g_mean_zero: bool = False


def _classify_weight(w: Weight):
    """-> ("const"|"spatial"|"char"|"timepower"|"zero"|"other", params)."""
    if isinstance(w, ConstantWeight):
        return ("zero", ()) if w.value == 0.0 else ("const", ())
    if isinstance(w, ZeroWeight):
        return ("zero", ())
    if isinstance(w, TimePowerWeight):
        return ("timepower", (w.k,))
    if isinstance(w, CharacteristicWeight):
        a, b, c = w.a, w.b, w.c
        if a == -1.0 and b == -1.0 and c == -1.0:
            return ("const", ())
        if a == -1.0 and b == -1.0:
            return ("spatial", (c,))
        if c == -1.0:
            return ("char", (a, b))
        return ("other", (a, b, c))
    return ("other", ())


def predict(query: RegimeQuery) -> Prediction:
    """Scaling law for the query, or an explicit OutsideTheorems value."""
    has_mixed = query.mixed is not None
    has_power = query.power is not None
    has_grad = query.gradient is not None
    wkind, wparams = _classify_weight(query.weight)
    zm = query.g_mean_zero

    if wkind == "zero" or not (has_mixed or has_power or has_grad):
        return _global("free", "no active nonlinear term")

    if has_grad:
        if has_mixed or has_power:
            return OutsideTheorems(
                "gradient term combined with other terms is not covered",
                nearest="gradient/const",
            )
        if wkind != "const":
            return OutsideTheorems(
                "gradient term with non-constant coefficient is not covered",
                nearest="gradient/const",
            )
        p = query.gradient
        return _power(p - 1, "gradient/const", f"|u_x|^p, p={p:g}, constant coefficient")

    if has_mixed and has_power:
        p, q = query.mixed
        r = query.power
        if wkind != "const":
            return OutsideTheorems(
                "combined effect with variable coefficients is open",
                nearest="const-both",
            )
        if 0.0 < q <= 1.0:
            return OutsideTheorems(
                f"q={q:g} in (0, 1] is outside the stated results (need q=0 or q>1)",
                nearest="const-both",
            )
        if zm and combined_window(p, q, r):
            return _power(
                combined_exponent(p, q, r),
                "const-both/combined-window",
                f"zero-mean speed, (r+1)/2 < p+q={p + q:g} < r={r:g}",
            )
        e = conjectured_exponent(p, q, r, zm)
        cond = f"{'zero' if zm else 'nonzero'}-mean speed, p+q={p + q:g}, r={r:g}"
        return _power(e, "const-both/min-branch", cond)

    if has_power:
        r = query.power
        if wkind == "const":
            return _power(
                single_power_exponent(r, zm),
                "const-u/zero" if zm else "const-u/nonzero",
                f"|u|^r, r={r:g}, {'zero' if zm else 'nonzero'}-mean speed",
            )
        if wkind == "spatial":
            return spatial_u_law(wparams[0], r, zm)
        if wkind == "char":
            return char_u_law(wparams[0], wparams[1], r, zm)
        if wkind == "timepower":
            (k,) = wparams
            if k == r - 1.0:
                return timepower_u_law(r, zm)
            # (1+t) and <t+<x>> are comparable on the light cone, so a pure
            # time power is the a = k-1, b = -1 characteristic weight.
            law = char_u_law(k - 1.0, -1.0, r, zm)
            return ScalingLaw(
                kind=law.kind,
                exponent=law.exponent,
                log_law=law.log_law,
                inner_exponent=law.inner_exponent,
                scale_outside=law.scale_outside,
                branch=law.branch + "+timepower-equivalence",
                condition=law.condition + f" (from (1+t)^-{k:g})",
            )
        return OutsideTheorems(
            "three-factor space-time weight on |u|^r is not covered",
            nearest="char-u",
        )

    # mixed term alone
    p, q = query.mixed
    if wkind == "const":
        if q == 0.0 or q > 1.0:
            return _power(
                p + q - 1,
                "const-ut",
                f"|u_t|^p|u|^q, p+q={p + q:g}, constant coefficient",
            )
        return OutsideTheorems(
            f"q={q:g} in (0, 1] is outside the stated results (need q=0 or q>1)",
            nearest="const-ut",
        )
    if q != 0.0:
        return OutsideTheorems(
            "variable-coefficient |u_t|^p|u|^q with q != 0 is not covered",
            nearest="char-ut",
        )
    if wkind == "spatial":
        return spatial_ut_law(wparams[0], p)
    if wkind == "char":
        return char_ut_law(wparams[0], wparams[1], p)
    if wkind == "timepower":
        (k,) = wparams
        law = char_ut_law(k - 1.0, -1.0, p)
        return ScalingLaw(
            kind=law.kind,
            exponent=law.exponent,
            log_law=law.log_law,
            inner_exponent=law.inner_exponent,
            scale_outside=law.scale_outside,
            branch=law.branch + "+timepower-equivalence",
            condition=law.condition + f" (from (1+t)^-{k:g})",
        )
    return OutsideTheorems(
        "three-factor space-time weight on |u_t|^p is not covered",
        nearest="char-ut",
    )


def query_from_spec(spec: ProblemSpec) -> RegimeQuery:
    """Collapse a ProblemSpec into a RegimeQuery (terms with zero weight drop out)."""
    mixed = None
    power = None
    gradient = None
    weights = []
    for term in spec.terms:
        wkind, _ = _classify_weight(term.weight)
        if wkind == "zero":
            continue
        if isinstance(term, MixedDerivativeTerm):
            mixed = (term.p, term.q)
        elif isinstance(term, PowerTerm):
            power = term.r
        elif isinstance(term, GradientTerm):
            gradient = term.p
        elif isinstance(term, SmoothMonomialTerm):
            if term.p + term.q > 0:
                mixed = (float(term.p), float(term.q))
            if term.r > 0:
                power = float(term.r)
        weights.append(term.weight)
    if not weights:
        return RegimeQuery(g_mean_zero=spec.data.g_mean_zero)
    non_const = [w for w in weights if _classify_weight(w)[0] != "const"]
    if len(set(map(repr, weights))) > 1 and non_const:
        # mixed weight shapes across terms: keep the non-constant one; the
        # dispatcher only accepts it for single-term queries anyway
        weight = non_const[0]
    else:
        weight = weights[0]
    return RegimeQuery(
        mixed=mixed,
        power=power,
        gradient=gradient,
        weight=weight,
        g_mean_zero=spec.data.g_mean_zero,
    )


def evaluate_law(law: ScalingLaw, epsilon: float, constant: float = 1.0) -> float:
    """Predicted T for given eps and constant; +inf for global branches."""
    if not (epsilon > 0 and constant > 0):
        raise ValueError("epsilon and constant must be > 0")
    if law.kind == "global":
        return math.inf
    if law.kind == "power":
        return constant * epsilon ** (-law.exponent)
    if law.kind == "exp":
        try:
            return math.exp(constant * epsilon ** (-law.exponent))
        except OverflowError:
            return math.inf
    if law.kind == "log_inverse":
        y = epsilon ** (-law.inner_exponent)
        if law.scale_outside:
            return constant * invert_law(law.log_law, y)
        return invert_law(law.log_law, constant * y)
    raise ValueError(f"unknown law kind {law.kind!r}")
