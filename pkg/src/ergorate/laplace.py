"""Laplace transforms of measures and functions, and the rate identity

    int_0^inf t r(t) e^{-zt} dt = (g(z) - g(0+)/2) / z^2.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ergorate._quad import integrate_exp_weighted
from ergorate.bernstein import BernsteinFunction, ProbeVerdict, bernstein_probe, evaluate, rate
from ergorate.measure import EXP, MeasureError, RadonMeasure

TRUNCATION = 40.0


class GrowthBoundError(ValueError):
    """A sampled value exceeded the declared growth bound ``C (1 + t)``."""


def laplace_measure(mu: RadonMeasure, z: complex, method: str = "auto") -> complex:
    """``int e^{-sz} mu(ds)``; needs re z > 0, or re z = 0 with finite mass."""
    z = complex(z)
    if z.real < 0:
        raise MeasureError("laplace_measure needs re z >= 0")
    return mu.exp_integral(z, EXP, method)


def laplace_function(h: Callable[[float], float], z: complex, growth: float,
                     points: Sequence[float] = ()) -> complex:
    """``int_0^inf h(t) e^{-zt} dt`` for real ``h`` with ``|h(t)| <= growth (1 + t)``.

    The integral is truncated at ``T = 40/re z``; the neglected tail is at
    most ``growth e^{-xT} ((1 + T)/x + 1/x^2)`` with ``x = re z``, and ``T``
    is doubled until that bound is below ``1e-12`` of the result.
    """
    z = complex(z)
    x = z.real
    if not x > 0:
        raise ValueError("laplace_function needs re z > 0")
    if not growth >= 0:
        raise ValueError("growth bound must be >= 0")

    def guarded(t: float) -> float:
        v = h(t)
        if abs(v) > growth * (1 + t) * (1 + 1e-12):
            raise GrowthBoundError(f"|h({t:g})| = {abs(v):g} exceeds {growth:g} (1 + t)")
        return v

    T = TRUNCATION / x
    while True:
        pts = sorted({p for p in (1 / x, *points) if 0 < p < T})
        val = integrate_exp_weighted(guarded, z, 0.0, T, pts)
        tail = growth * math.exp(-x * T) * ((1 + T) / x + 1 / x**2)
        if tail <= 1e-12 * abs(val) or tail < 1e-300:
            return val
        T *= 2


def rate_laplace_residual(g: BernsteinFunction, z: complex) -> float:
    """Relative mismatch of ``L[t r(t)](z)`` against ``(g(z) - a/2)/z^2``."""
    z = complex(z)
    if not z.real > 0:
        raise ValueError("rate_laplace_residual needs re z > 0")
    # t r(t) is concave and increasing, so t r(t) <= f(1) max(1, t)
    growth = rate(g, 1.0)
    pts = [1.0]
    if g.mu is not None:
        pts += [p for p in g.mu.scale_points() if p < 1e6]
    lhs = laplace_function(lambda t: t * rate(g, t), z, growth, pts)
    rhs = (evaluate(g, z) - g.a / 2) / z**2
    return abs(lhs - rhs) / abs(rhs)


def cbf_rate_probe(g: BernsteinFunction, grid: Sequence[float] | None = None, n_max: int = 4,
                   value_rtol: float | None = None) -> ProbeVerdict:
    """Test that ``t -> t r(t)`` is a Bernstein function on a grid.

    This holds exactly when ``r = r[g]`` for a complete Bernstein function;
    a failure pinpoints the order and window of the first sign violation.
    """
    t = np.geomspace(0.1, 10.0, 21) if grid is None else np.asarray(grid, float)
    if value_rtol is None:
        value_rtol = 1e-9 if g.mu is None else 1e-13
    return bernstein_probe(lambda s: s * rate(g, s), t, n_max, value_rtol=value_rtol)


__all__ = ["laplace_measure", "laplace_function", "rate_laplace_residual", "cbf_rate_probe",
           "GrowthBoundError"]
