"""Problem descriptions for 1D semilinear wave equations.

The model family is

    u_tt - u_xx = sum of weighted nonlinear terms in (u, u_t, u_x),
    u(x,0) = eps*f(x),  u_t(x,0) = eps*g(x),

with smooth compactly supported data built from scaled translates of the
standard bump exp(-1/(1-s^2)).  Everything here is immutable and cheap to
share between workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

__all__ = [
    "ConstantWeight",
    "CharacteristicWeight",
    "TimePowerWeight",
    "ZeroWeight",
    "Weight",
    "evaluate_weight",
    "MixedDerivativeTerm",
    "PowerTerm",
    "GradientTerm",
    "SmoothMonomialTerm",
    "Term",
    "evaluate_source",
    "term_value",
    "term_needs_ut",
    "Bump",
    "InitialData",
    "sample_data",
    "ProblemSpec",
    "GeneralTheoryParams",
    "liouville_transform",
    "BUMP_MASS",
    "bump_profile",
    "bump_profile_prime",
    "bump_profile_second",
    "bump_cdf",
    "symmetric_data",
    "antisymmetric_speed_data",
]

ArrayLike = Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantWeight:
    """Space-time independent coefficient."""

    value: float = 1.0

    def __post_init__(self) -> None:
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise ValueError("constant weight must be finite and >= 0")


@dataclass(frozen=True)
class CharacteristicWeight:
    """1 / (<t+<x>>^(1+a) * <t-<x>>^(1+b) * <x>^(1+c)) with <x> = sqrt(1+x^2).

    An exponent parameter of -1 switches the corresponding factor off,
    so (a, b, c) = (-1, -1, -1) is the constant weight 1, c alone active
    gives a purely spatial decay and (a, b) alone active decays along the
    two characteristic directions.
    """

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"characteristic weight exponent {name} must be finite")


@dataclass(frozen=True)
class TimePowerWeight:
    """(1+t)^(-k), the weight produced by removing scale-invariant damping."""

    k: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.k):
            raise ValueError("time-power exponent must be finite")


@dataclass(frozen=True)
class ZeroWeight:
    """Identically zero coefficient (term switched off)."""


Weight = Union[ConstantWeight, CharacteristicWeight, TimePowerWeight, ZeroWeight]


def _bracket(v: ArrayLike) -> ArrayLike:
    return np.sqrt(1.0 + np.square(v))


def _neg_pow(z: np.ndarray, e: float) -> np.ndarray:
    """z^(-e) for z >= 1, with cheap paths for the common half-integer e."""
    if e == 0.0:
        return np.ones_like(z)
    if e == 1.0:
        return 1.0 / z
    if e == 2.0:
        return 1.0 / (z * z)
    if e == 0.5:
        return 1.0 / np.sqrt(z)
    if e == 1.5:
        return 1.0 / (z * np.sqrt(z))
    return z ** (-e)


def evaluate_weight(w: Weight, x: ArrayLike, t: ArrayLike, _bx: np.ndarray | None = None) -> ArrayLike:
    """Evaluate a weight at (x, t), t >= 0.  Vectorized over x and t.

    `_bx` optionally passes a precomputed <x> = sqrt(1+x^2) for hot loops.
    """
    if isinstance(w, ConstantWeight):
        return w.value * np.ones_like(np.asarray(x, dtype=float) + np.asarray(t, dtype=float))
    if isinstance(w, ZeroWeight):
        return np.zeros_like(np.asarray(x, dtype=float) + np.asarray(t, dtype=float))
    if isinstance(w, TimePowerWeight):
        val = (1.0 + np.asarray(t, dtype=float)) ** (-w.k)
        return val * np.ones_like(np.asarray(x, dtype=float))
    if isinstance(w, CharacteristicWeight):
        bx = _bracket(np.asarray(x, dtype=float)) if _bx is None else _bx
        t = np.asarray(t, dtype=float)
        out = 1.0
        if w.a != -1.0:
            out = out * _neg_pow(_bracket(t + bx), 1.0 + w.a)
        if w.b != -1.0:
            out = out * _neg_pow(_bracket(t - bx), 1.0 + w.b)
        if w.c != -1.0:
            out = out * _neg_pow(bx, 1.0 + w.c)
        return out * np.ones_like(t + bx)
    raise TypeError(f"unknown weight {w!r}")


# ---------------------------------------------------------------------------
# nonlinear terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixedDerivativeTerm:
    """|u_t|^p * |u|^q."""

    p: float
    q: float = 0.0
    weight: Weight = field(default_factory=ConstantWeight)

    def __post_init__(self) -> None:
        if not self.p > 1.0:
            raise ValueError("mixed term requires p > 1")
        if not self.q >= 0.0:
            raise ValueError("mixed term requires q >= 0")


@dataclass(frozen=True)
class PowerTerm:
    """|u|^r."""

    r: float
    weight: Weight = field(default_factory=ConstantWeight)

    def __post_init__(self) -> None:
        if not self.r > 1.0:
            raise ValueError("power term requires r > 1")


@dataclass(frozen=True)
class GradientTerm:
    """|u_x|^p."""

    p: float
    weight: Weight = field(default_factory=ConstantWeight)

    def __post_init__(self) -> None:
        if not self.p > 1.0:
            raise ValueError("gradient term requires p > 1")


@dataclass(frozen=True)
class SmoothMonomialTerm:
    """Signed u_t^p * u^q + u^r with integer exponents.

    Either piece may be switched off: p = q = 0 drops the monomial and
    r = 0 drops the pure power, so single signed terms are expressible.
    """

    p: int
    q: int
    r: int
    weight: Weight = field(default_factory=ConstantWeight)

    def __post_init__(self) -> None:
        for name in ("p", "q", "r"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and v >= 0):
                raise ValueError(f"smooth term exponent {name} must be an integer >= 0")


Term = Union[MixedDerivativeTerm, PowerTerm, GradientTerm, SmoothMonomialTerm]


def term_needs_ut(term: Term) -> bool:
    """Whether the term value depends on u_t (drives the corrector pass)."""
    if isinstance(term, MixedDerivativeTerm):
        return True
    return isinstance(term, SmoothMonomialTerm) and term.p > 0


def term_value(term: Term, u: ArrayLike, ut: ArrayLike, ux: ArrayLike) -> ArrayLike:
    if isinstance(term, PowerTerm):
        return np.abs(u) ** term.r
    if isinstance(term, MixedDerivativeTerm):
        val = np.abs(ut) ** term.p
        if term.q != 0.0:
            val = val * np.abs(u) ** term.q
        return val
    if isinstance(term, GradientTerm):
        return np.abs(ux) ** term.p
    if isinstance(term, SmoothMonomialTerm):
        val = 0.0
        if term.p + term.q > 0:
            piece = np.ones_like(np.asarray(u, dtype=float) + np.asarray(ut, dtype=float))
            if term.p:
                piece = piece * np.asarray(ut, dtype=float) ** term.p
            if term.q:
                piece = piece * np.asarray(u, dtype=float) ** term.q
            val = piece
        if term.r > 0:
            val = val + np.asarray(u, dtype=float) ** term.r
        return val
    raise TypeError(f"unknown term {term!r}")


def evaluate_source(
    spec: "ProblemSpec",
    u: ArrayLike,
    ut: ArrayLike,
    ux: ArrayLike,
    x: ArrayLike,
    t: ArrayLike,
) -> ArrayLike:
    """Right-hand side of the equation at given field values and position.

    Overflow is deliberately allowed to produce +/-inf (picked up by the
    solver as a blow-up signal) instead of raising.
    """
    total = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for term in spec.terms:
            w = evaluate_weight(term.weight, x, t)
            total = total + w * term_value(term, u, ut, ux)
    if np.isscalar(u) and np.ndim(total) == 0:
        return float(total)
    return total * np.ones_like(np.asarray(u, dtype=float))


# ---------------------------------------------------------------------------
# bump data family
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


def bump_profile(s: ArrayLike) -> ArrayLike:
    """exp(-1/(1-s^2)) on |s| < 1, exactly 0 elsewhere."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - s[m] ** 2))
    return out


def bump_profile_prime(s: ArrayLike) -> ArrayLike:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    sm = s[m]
    w = 1.0 - sm**2
    out[m] = np.exp(-1.0 / w) * (-2.0 * sm) / w**2
    return out


def bump_profile_second(s: ArrayLike) -> ArrayLike:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    sm = s[m]
    w = 1.0 - sm**2
    out[m] = np.exp(-1.0 / w) * (4.0 * sm**2 / w**4 - 2.0 / w**2 - 8.0 * sm**2 / w**3)
    return out


def bump_cdf(s: ArrayLike) -> ArrayLike:
    """Antiderivative int_{-1}^{s} of the standard profile, clamped outside.

    Gauss-Legendre with 96 nodes is exact to ~1e-15 here, so downstream
    integrals of the data inherit machine accuracy.
    """
    s = np.asarray(s, dtype=float)
    sc = np.clip(s, -1.0, 1.0)
    half = (sc + 1.0) / 2.0
    nodes = -1.0 + np.multiply.outer(half, _GL_NODES + 1.0)
    vals = bump_profile(nodes)
    out = half * (vals @ _GL_WEIGHTS)
    return out


BUMP_MASS = float(bump_cdf(np.asarray(1.0)))


@dataclass(frozen=True)
class Bump:
    """amplitude * exp(-1/(1-((x-center)/width)^2)) supported on |x-center| < width."""

    center: float
    amplitude: float
    width: float

    def __post_init__(self) -> None:
        if not self.width > 0.0:
            raise ValueError("bump width must be > 0")

    @property
    def mass(self) -> float:
        return self.amplitude * self.width * BUMP_MASS


def _sum_bumps(bumps: tuple[Bump, ...], x: ArrayLike, fn) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for b in bumps:
        out = out + b.amplitude * fn((x - b.center) / b.width)
    return out


def _cancels_exactly(bumps: tuple[Bump, ...]) -> bool:
    # Pairs (amp, w) with (-amp, w) have exactly opposite masses, so the total
    # integral is zero by construction rather than by float cancellation.
    pool = list(bumps)
    while pool:
        b = pool.pop()
        match = None
        for other in pool:
            if other.amplitude == -b.amplitude and other.width == b.width:
                match = other
                break
        if match is None:
            return False
        pool.remove(match)
    return True


@dataclass(frozen=True)
class InitialData:
    """Compactly supported C^inf data (f, g) with supp f,g inside {|x| <= R}, R > 1."""

    f_bumps: tuple[Bump, ...]
    g_bumps: tuple[Bump, ...]
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 1.0:
            raise ValueError("support radius R must be > 1")
        object.__setattr__(self, "f_bumps", tuple(self.f_bumps))
        object.__setattr__(self, "g_bumps", tuple(self.g_bumps))
        for b in self.f_bumps + self.g_bumps:
            if abs(b.center) + b.width > self.radius:
                raise ValueError("bump support must lie inside {|x| <= R}")

    # pointwise evaluation -------------------------------------------------
    def f(self, x: ArrayLike) -> ArrayLike:
        return _sum_bumps(self.f_bumps, x, bump_profile)

    def g(self, x: ArrayLike) -> ArrayLike:
        return _sum_bumps(self.g_bumps, x, bump_profile)

    def f_prime(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for b in self.f_bumps:
            out = out + (b.amplitude / b.width) * bump_profile_prime((x - b.center) / b.width)
        return out

    def g_antiderivative(self, y: ArrayLike) -> ArrayLike:
        """int_{-inf}^{y} g, exact up to the bump-cdf quadrature (~1e-15)."""
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for b in self.g_bumps:
            out = out + b.amplitude * b.width * bump_cdf((y - b.center) / b.width)
        return out

    # cached integrals -----------------------------------------------------
    @property
    def f_mean(self) -> float:
        return sum(b.mass for b in self.f_bumps)

    @property
    def g_mean(self) -> float:
        if self.g_mean_zero:
            return 0.0
        return sum(b.mass for b in self.g_bumps)

    @property
    def g_mean_zero(self) -> bool:
        return _cancels_exactly(self.g_bumps)


def sample_data(data: InitialData, x: ArrayLike) -> tuple[ArrayLike, ArrayLike, ArrayLike]:
    """(f(x), g(x), f'(x)), exactly zero outside the support."""
    return data.f(x), data.g(x), data.f_prime(x)


def symmetric_data(
    radius: float = 2.0,
    f_amplitude: float = 1.0,
    f_width: float = 1.0,
    g_amplitude: float = 0.0,
    g_width: float = 1.0,
) -> InitialData:
    """One centered bump each for f and g (g omitted when its amplitude is 0)."""
    f_bumps = (Bump(0.0, f_amplitude, f_width),) if f_amplitude != 0.0 else ()
    g_bumps = (Bump(0.0, g_amplitude, g_width),) if g_amplitude != 0.0 else ()
    return InitialData(f_bumps=f_bumps, g_bumps=g_bumps, radius=radius)


def antisymmetric_speed_data(
    radius: float = 2.0,
    f_amplitude: float = 0.0,
    f_width: float = 1.0,
    g_amplitude: float = 1.0,
    g_width: float = 0.5,
    g_separation: float = 1.0,
) -> InitialData:
    """Zero-mean g made of an exact antisymmetric bump pair."""
    f_bumps = (Bump(0.0, f_amplitude, f_width),) if f_amplitude != 0.0 else ()
    g_bumps = (
        Bump(+g_separation, +g_amplitude, g_width),
        Bump(-g_separation, -g_amplitude, g_width),
    )
    return InitialData(f_bumps=f_bumps, g_bumps=g_bumps, radius=radius)


# ---------------------------------------------------------------------------
# problem spec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """One initial value problem: nonlinear terms, data family and size eps."""

    terms: tuple[Term, ...]
    data: InitialData
    epsilon: float
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be > 0")

    def with_epsilon(self, epsilon: float) -> "ProblemSpec":
        return replace(self, epsilon=epsilon)


@dataclass(frozen=True)
class GeneralTheoryParams:
    """Inputs to the small-data lower-bound exponents for general smooth terms.

    alpha is the order of vanishing of the nonlinearity at 0 (term =
    O(|state|^(1+alpha))); u_power_vanishing means all pure-u derivatives
    of order alpha+1..beta0 vanish at the origin.
    """

    alpha: int
    beta0: int | None = None
    u_power_vanishing: bool = False
    g_mean_zero: bool = False

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, np.integer)) and self.alpha >= 1):
            raise ValueError("alpha must be an integer >= 1")
        if self.u_power_vanishing:
            if self.beta0 is None:
                raise ValueError("beta0 required when u_power_vanishing is set")
            if not self.beta0 >= self.alpha + 1:
                raise ValueError("beta0 >= alpha + 1 required when u_power_vanishing is set")


def liouville_transform(damped: ProblemSpec) -> ProblemSpec:
    """Map the damped model v_tt - v_xx + 2/(1+t) v_t = |v|^p to its undamped twin.

    The substitution u = (1+t) v turns the problem into
    u_tt - u_xx = |u|^p / (1+t)^(p-1) with data (f, f+g), which is what the
    returned spec describes.
    """
    if len(damped.terms) != 1:
        raise ValueError("damped model must have exactly one term |v|^p")
    term = damped.terms[0]
    if not isinstance(term, PowerTerm):
        raise ValueError("damped model term must be a pure power |v|^p")
    if not (isinstance(term.weight, ConstantWeight) and term.weight.value == 1.0):
        raise ValueError("damped model term must carry unit constant coefficient")
    p = term.r
    new_term = PowerTerm(r=p, weight=TimePowerWeight(k=p - 1.0))
    old = damped.data
    new_data = InitialData(
        f_bumps=old.f_bumps,
        g_bumps=old.f_bumps + old.g_bumps,
        radius=old.radius,
    )
    label = (damped.label + "+liouville") if damped.label else "liouville"
    return ProblemSpec(terms=(new_term,), data=new_data, epsilon=damped.epsilon, label=label)
