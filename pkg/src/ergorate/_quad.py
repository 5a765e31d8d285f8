"""Adaptive quadrature helpers on subintervals of (0, inf).

Thin wrappers around QUADPACK (``scipy.integrate.quad``) that handle
complex integrands, breakpoint splitting and oscillatory tails.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

RTOL = 1e-10
ATOL = 1e-300
# QUADPACK uses 21 (finite) or 15 (infinite) nodes per subinterval.
LIMIT = 2000
MAX_EVALS = 10**6


class QuadratureError(RuntimeError):
    """Raised when an integral fails to converge."""


def _quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                f, a, b, epsabs=kw.pop("epsabs", ATOL), epsrel=kw.pop("epsrel", RTOL),
                limit=kw.pop("limit", LIMIT), **kw,
            )
        except integrate.IntegrationWarning as exc:
            # Retry silently; accept the result if the error estimate is tiny.
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                val, err = integrate.quad(f, a, b, epsabs=ATOL, epsrel=RTOL,
                                          limit=LIMIT, **kw)
            if not math.isfinite(val) or err > 1e-7 * max(abs(val), 1e-12):
                raise QuadratureError(f"quadrature on [{a}, {b}] failed: {exc}") from exc
    if not math.isfinite(val):
        raise QuadratureError(f"non-finite integral on [{a}, {b}]")
    return val


def _segments(a: float, b: float, points: Iterable[float]) -> list[tuple[float, float]]:
    pts = sorted({float(p) for p in points if a < p < b})
    edges = [a, *pts, b]
    return [(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def integrate_real(f: Callable[[float], float], a: float, b: float,
                   points: Sequence[float] = ()) -> float:
    """Integrate a real function over [a, b] (b may be inf), split at ``points``."""
    return math.fsum(_quad_segment(f, lo, hi) for lo, hi in _segments(a, b, points))


def _quad_segment(f, lo: float, hi: float) -> float:
    if math.isinf(hi) and lo > 1:
        # QAGI maps [lo, inf) with unit scale; rescale so that slowly
        # decaying tails starting far out are resolved
        return lo * _quad(lambda w: f(lo * w), 1.0, math.inf)
    return _quad(f, lo, hi)


def integrate_complex(f: Callable[[float], complex], a: float, b: float,
                      points: Sequence[float] = ()) -> complex:
    re = integrate_real(lambda s: f(s).real, a, b, points)
    im = integrate_real(lambda s: f(s).imag, a, b, points)
    return complex(re, im)


def integrate_exp_weighted(f: Callable[[float], float], z: complex, a: float, b: float,
                           points: Sequence[float] = ()) -> complex:
    """Return the integral of f(s) exp(-s z) over [a, b] for real f.

    The oscillating factor exp(-i s im z) is handled by QUADPACK's
    Fourier weights (QAWO on finite and QAWF on infinite intervals).
    """
    p, q = z.real, z.imag
    if q == 0.0:
        return complex(integrate_real(lambda s: f(s) * math.exp(-p * s), a, b, points), 0.0)

    def damped(s):
        return f(s) * math.exp(-p * s)

    if abs(q) <= p:
        # fewer than one radian of phase per e-fold of damping: no need for
        # Fourier weights, and QAWF's absolute stopping rule misjudges
        # slowly oscillating tails
        re = integrate_real(lambda s: damped(s) * math.cos(q * s), a, b, points)
        im = -integrate_real(lambda s: damped(s) * math.sin(q * s), a, b, points)
        return complex(re, im)

    if math.isinf(b):
        segs = _segments(a, b, points)
        re = im = 0.0
        for lo, hi in segs[:-1]:
            re += _quad(damped, lo, hi, weight="cos", wvar=q)
            im -= _quad(damped, lo, hi, weight="sin", wvar=q)
        lo = segs[-1][0]
        # QAWF takes an absolute tolerance only; scale it per weight by the
        # first period of the tail
        period = lo + 2 * math.pi / abs(q)
        for weight in ("cos", "sin"):
            head = abs(_quad(damped, lo, period, weight=weight, wvar=q))
            scale = max(head, abs(_quad(damped, lo, period)) * 1e-6)
            tol = max(RTOL * scale, 1e-300)
            val = _quad(damped, lo, np.inf, weight=weight, wvar=q, epsabs=tol)
            if weight == "cos":
                re += val
            else:
                im -= val
        return complex(re, im)
    re = im = 0.0
    for lo, hi in _segments(a, b, points):
        re += _quad(damped, lo, hi, weight="cos", wvar=q)
        im -= _quad(damped, lo, hi, weight="sin", wvar=q)
    return complex(re, im)
