"""Exact free-wave solution and quadratured Duhamel integrals.

The source-to-solution map of the 1D wave operator is

    (L v)(x,t)  = 1/2 int_0^t ds int_{x-t+s}^{x+t-s} v(y,s) dy
    (L'v)(x,t)  = d/dt (L v)(x,t)
                = 1/2 int_0^t [v(x+t-s, s) + v(x-t+s, s)] ds,

computed here by composite midpoint (in s) and trapezoid (in y) rules, both
second order.  The time derivative is quadratured from its own 1D formula
instead of differencing L, which would lose digits to cancellation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .model import InitialData

__all__ = [
    "SpaceTimeField",
    "GridField",
    "QuadratureConfig",
    "NonFiniteFieldError",
    "free_solution",
    "duhamel_integral",
    "duhamel_time_derivative",
    "huygens_residual",
]

ArrayLike = Union[float, np.ndarray]


class NonFiniteFieldError(ArithmeticError):
    """A field returned NaN/inf inside the backward cone of a Duhamel integral."""


@dataclass(frozen=True)
class SpaceTimeField:
    """Callable field v(x, t) that is exactly 0 outside {|x| <= t + R}."""

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    radius: float

    def __call__(self, x: ArrayLike, t: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        inside = np.abs(x) <= t + self.radius
        out = np.zeros(np.broadcast(x, t).shape)
        if np.any(inside):
            xi, ti = np.broadcast_arrays(x, t)
            out[inside] = np.asarray(self.fn(xi[inside], ti[inside]), dtype=float)
        return out


class GridField:
    """Bilinear interpolant of node values on a uniform (x, t) grid.

    Used to feed grid-sampled Picard iterates back into the Duhamel
    quadrature; evaluations outside {|x| <= t + R} or off the grid are 0.
    """

    def __init__(self, values: np.ndarray, xs: np.ndarray, ts: np.ndarray, radius: float):
        self.values = np.asarray(values, dtype=float)
        self.xs = np.asarray(xs, dtype=float)
        self.ts = np.asarray(ts, dtype=float)
        self.radius = radius
        if self.values.shape != (self.ts.size, self.xs.size):
            raise ValueError("values must have shape (len(ts), len(xs))")
        self._dx = self.xs[1] - self.xs[0] if self.xs.size > 1 else 1.0
        self._dt = self.ts[1] - self.ts[0] if self.ts.size > 1 else 1.0

    def __call__(self, x: ArrayLike, t: ArrayLike) -> np.ndarray:
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        fx = (x - self.xs[0]) / self._dx
        ft = (t - self.ts[0]) / self._dt
        ix = np.clip(np.floor(fx).astype(int), 0, self.xs.size - 2)
        it = np.clip(np.floor(ft).astype(int), 0, self.ts.size - 2)
        wx = np.clip(fx - ix, 0.0, 1.0)
        wt = np.clip(ft - it, 0.0, 1.0)
        v = (
            self.values[it, ix] * (1 - wt) * (1 - wx)
            + self.values[it, ix + 1] * (1 - wt) * wx
            + self.values[it + 1, ix] * wt * (1 - wx)
            + self.values[it + 1, ix + 1] * wt * wx
        )
        inside = (
            (np.abs(x) <= t + self.radius)
            & (x >= self.xs[0])
            & (x <= self.xs[-1])
            & (t >= self.ts[0])
            & (t <= self.ts[-1])
        )
        return np.where(inside, v, 0.0)


@dataclass(frozen=True)
class QuadratureConfig:
    """Step of the composite rules; normally tied to the solver grid spacing."""

    h: float

    def __post_init__(self) -> None:
        if not self.h > 0.0:
            raise ValueError("quadrature step must be > 0")


def free_solution(
    data: InitialData, epsilon: float, x: ArrayLike, t: ArrayLike
) -> tuple[np.ndarray, np.ndarray]:
    """Value and time derivative of the free wave with data (eps*f, eps*g).

    u0   = eps * [ (f(x+t) + f(x-t))/2 + (1/2) int_{x-t}^{x+t} g ]
    u0_t = eps * [ (f'(x+t) - f'(x-t))/2 + (g(x+t) + g(x-t))/2 ]

    The g-integral goes through the analytic antiderivative of the bump
    family, so it is exact for intervals covering the whole support.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    xp, xm = x + t, x - t
    u0 = 0.5 * (data.f(xp) + data.f(xm)) + 0.5 * (
        data.g_antiderivative(xp) - data.g_antiderivative(xm)
    )
    u0t = 0.5 * (data.f_prime(xp) - data.f_prime(xm)) + 0.5 * (data.g(xp) + data.g(xm))
    return epsilon * u0, epsilon * u0t


def _s_midpoints(t: float, h: float) -> tuple[np.ndarray, float]:
    n = max(1, int(np.ceil(t / h)))
    ds = t / n
    return (np.arange(n) + 0.5) * ds, ds


def duhamel_integral(
    v: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: float,
    t: float,
    quad: QuadratureConfig,
) -> float:
    """(L v)(x, t) by midpoint-in-s composed with trapezoid-in-y."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0
    mids, ds = _s_midpoints(t, quad.h)
    total = 0.0
    for s in mids:
        half_width = t - s
        lo, hi = x - half_width, x + half_width
        ny = max(1, int(np.ceil(2.0 * half_width / quad.h)))
        ys = np.linspace(lo, hi, ny + 1)
        vals = np.asarray(v(ys, np.full(ny + 1, s)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteFieldError(f"field non-finite inside backward cone of ({x}, {t})")
        total += np.trapezoid(vals, dx=(hi - lo) / ny) * ds
    return 0.5 * total


def duhamel_time_derivative(
    v: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: float,
    t: float,
    quad: QuadratureConfig,
) -> float:
    """(L' v)(x, t) = 1/2 int_0^t [v(x+t-s,s) + v(x-t+s,s)] ds by midpoint rule."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0
    mids, ds = _s_midpoints(t, quad.h)
    vals = np.asarray(v(x + t - mids, mids), dtype=float) + np.asarray(
        v(x - t + mids, mids), dtype=float
    )
    if not np.all(np.isfinite(vals)):
        raise NonFiniteFieldError(f"field non-finite on backward characteristics of ({x}, {t})")
    return 0.5 * float(np.sum(vals)) * ds


def huygens_residual(
    data: InitialData,
    epsilon: float,
    points: np.ndarray,
) -> float:
    """sup |u0| over sample points of the interior region {t - |x| >= R}.

    For exactly zero-mean g (and f = 0) this is zero up to antiderivative
    rounding; for nonzero mean it equals eps*|int g|/2.  The raw sup is
    returned, interpretation is the caller's.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("empty sample of the interior region")
    pts = pts.reshape(-1, 2)
    xs, ts = pts[:, 0], pts[:, 1]
    if np.any(ts - np.abs(xs) < data.radius):
        raise ValueError("sample point outside the interior region {t - |x| >= R}")
    u0, _ = free_solution(data, epsilon, xs, ts)
    return float(np.max(np.abs(u0)))
