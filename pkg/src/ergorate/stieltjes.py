"""Stieltjes functions, potentials and the logarithmic example.

A Stieltjes function is ``f(z) = a/z + b + int mu(ds)/(z+s)``; it is
holomorphic off the cut ``(-inf, 0]`` and satisfies
``im z * im f(z) <= 0``.  The principal branch of the logarithm is used
throughout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, NamedTuple

import numpy as np
import yaml

from ergorate._quad import QuadratureError
from ergorate.bernstein import (
    BernsteinFunction,
    ProbeVerdict,
    ZeroFunctionError,
    evaluate,
)
from ergorate.measure import INF, InverseLinear, MeasureError, RadonMeasure

SERIES_RADIUS = 1e-4
ROLE = "stieltjes"


class BranchCutError(ValueError):
    """Argument on the cut (-inf, 0]."""


def _check_cut(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0 and z.real <= 0:
        raise BranchCutError(f"z = {z} lies on the branch cut (-inf, 0]")
    return z


# --------------------------------------------------------------------------
# representation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StieltjesFunction:
    """``a_over_z / z + b + int mu_s(ds)/(z+s)``."""

    a_over_z: float = 0.0
    b: float = 0.0
    mu_s: RadonMeasure = field(default_factory=RadonMeasure)

    def __post_init__(self):
        a, b = float(self.a_over_z), float(self.b)
        if not (a >= 0 and b >= 0 and math.isfinite(a) and math.isfinite(b)):
            raise MeasureError("need finite a_over_z, b >= 0")
        object.__setattr__(self, "a_over_z", a)
        object.__setattr__(self, "b", b)
        try:
            mass = self.mu_s.integrate(lambda s: 1 / (1 + s), (1.0,))
        except QuadratureError:
            mass = INF
        if not math.isfinite(mass):
            raise MeasureError("Stieltjes measure violates int mu(ds)/(1+s) < inf")

    def __call__(self, z: complex) -> complex:
        return evaluate_stieltjes(self, z)

    def to_dict(self) -> dict[str, Any]:
        return {"role": ROLE, "a_over_z": self.a_over_z, "b": self.b, "measure": self.mu_s.to_dict()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StieltjesFunction":
        if not isinstance(data, dict) or data.get("role") != ROLE:
            raise MeasureError(f"expected a document with role: {ROLE}")
        unknown = set(data) - {"role", "a_over_z", "b", "measure"}
        if unknown:
            raise MeasureError(f"unknown keys: {sorted(unknown)}")
        return cls(float(data.get("a_over_z", 0.0)), float(data.get("b", 0.0)),
                   RadonMeasure.from_dict(data.get("measure")))

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def loads(cls, text: str) -> "StieltjesFunction":
        return cls.from_dict(yaml.safe_load(text))


def evaluate_stieltjes(f: StieltjesFunction, z: complex) -> complex:
    """Evaluate the representation by quadrature (atoms exactly)."""
    z = _check_cut(z)
    total = f.b + 0j
    if f.a_over_z:
        total += f.a_over_z / z
    pts = (abs(z), max(-z.real, 0.0), 1.0)
    total += f.mu_s.integrate_complex(lambda s: 1 / (z + s), [p for p in pts if p > 0])
    return complex(total)


def log_measure() -> RadonMeasure:
    """``dt/(1+t)``: the Stieltjes measure of ``log z/(z-1)``."""
    return RadonMeasure.of(InverseLinear(1.0, 1.0))


def log_stieltjes() -> StieltjesFunction:
    return StieltjesFunction(0.0, 0.0, log_measure())


def _log1p_ratio(w: complex) -> complex:
    """``log(1+w)/w`` with the removable singularity at w = 0."""
    if abs(w) < SERIES_RADIUS:
        return 1 - w / 2 + w * w / 3 - w**3 / 4 + w**4 / 5
    return cmath.log(1 + w) / w


def log_ratio(z: complex) -> complex:
    """``log z/(z-1)`` on the cut plane, equal to 1 at z = 1."""
    z = _check_cut(z)
    return _log1p_ratio(z - 1)


# --------------------------------------------------------------------------
# complete Bernstein -> Stieltjes
# --------------------------------------------------------------------------


def cbf_to_stieltjes(g: BernsteinFunction) -> Callable[[complex], complex]:
    """Evaluator of ``(g(z) - g(1/z))/(z-1)`` for a complete, sublinear g.

    Near ``z = 1`` (within ``1e-4``) the value is the mean over a small
    circle around the point, which is exact for holomorphic functions up to
    the quadrature error of the periodic trapezoid rule.
    """
    if not g.complete:
        raise ValueError("cbf_to_stieltjes needs a complete Bernstein function")
    if g.b > 0:
        raise ValueError("lim g(t)/t = 0 violated: drift b > 0")

    def raw(z: complex) -> complex:
        return (evaluate(g, z) - evaluate(g, 1 / z)) / (z - 1)

    def f(z: complex) -> complex:
        z = _check_cut(z)
        if z.real < 0:
            raise ValueError("evaluation needs re z >= 0 (both z and 1/z)")
        if abs(z - 1) < SERIES_RADIUS:
            rho = 0.05
            nodes = z + rho * np.exp(2j * np.pi * (np.arange(16) + 0.5) / 16)
            return complex(np.mean([raw(complex(w)) for w in nodes]))
        return raw(z)

    return f


# --------------------------------------------------------------------------
# checks
# --------------------------------------------------------------------------


class HerglotzVerdict(NamedTuple):
    passed: bool
    worst: float
    at: complex | None

    def __bool__(self) -> bool:
        return self.passed


def herglotz_check(f: Callable[[complex], complex], grid: Iterable[complex],
                   atol: float = 1e-10) -> HerglotzVerdict:
    """Pass iff ``im z * im f(z) <= atol`` on every grid point."""
    worst, at = -INF, None
    for z in grid:
        z = _check_cut(z)
        v = z.imag * complex(f(z)).imag
        if v > worst:
            worst, at = v, z
    return HerglotzVerdict(worst <= atol, worst, at)


def hirsch_moments(mu: RadonMeasure, t: float, n_max: int) -> np.ndarray:
    """``alpha_n = int s^n e^{-st} mu(ds)/n!`` for n = 0..n_max."""
    if not t > 0:
        raise ValueError("hirsch moments need t > 0")
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        fact = math.factorial(n)
        # s^n e^{-st} peaks at s = n/t
        pts = (n / t,) if n else ()
        out[n] = mu.integrate(lambda s, n=n: s**n * math.exp(-s * t) / fact, pts)
    return out


def hirsch_logconvexity_probe(mu: RadonMeasure, t: float, n_max: int, c: float = 0.0,
                              rtol: float = 1e-8) -> ProbeVerdict:
    """Check ``alpha_n^2 <= alpha_{n-1} alpha_{n+1} (1 + rtol)`` for 1 <= n < n_max.

    The sequence is ``(-1)^n f^(n)(t)/n!`` for ``f = c + L mu``, so the
    constant ``c`` enters only ``alpha_0``.
    """
    if n_max < 2:
        raise ValueError("need n_max >= 2")
    if not c >= 0:
        raise ValueError("constant must be >= 0")
    al = hirsch_moments(mu, t, n_max)
    al[0] += c
    if not np.all(np.isfinite(al)):
        raise MeasureError("divergent moment")
    for n in range(1, n_max):
        lhs, rhs = al[n] ** 2, al[n - 1] * al[n + 1]
        if lhs > rhs * (1 + rtol):
            return ProbeVerdict(False, n, (float(t), float(t)), float(lhs / rhs) if rhs else INF)
    return ProbeVerdict(True)


def potential_of(g: BernsteinFunction, z: complex) -> complex:
    """``1/g(z)``."""
    if g.is_zero:
        raise ZeroFunctionError("zero Bernstein function has no potential")
    val = evaluate(g, z)
    if val == 0:
        raise ZeroDivisionError(f"g vanishes at z = {z}")
    return 1 / val


__all__ = [
    "StieltjesFunction", "BranchCutError", "HerglotzVerdict", "evaluate_stieltjes", "log_ratio",
    "log_measure", "log_stieltjes", "cbf_to_stieltjes", "herglotz_check", "hirsch_moments",
    "hirsch_logconvexity_probe", "potential_of",
]
