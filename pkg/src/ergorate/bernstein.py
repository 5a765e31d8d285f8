"""Bernstein functions and their rate functions.

A Bernstein function is stored through its Levy triple ``(a, b, mu)``,

    g(z) = a + b z + int (1 - e^{-sz}) mu(ds),

and its rate function is

    r(t) = a/2 + b/t + int min(s/t, 1) mu(ds).

Functions whose Levy measure has no usable description can instead carry
a closed-form evaluator and a rate callable; every operation that needs
``mu`` itself then raises :class:`MeasureUnavailable`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import special

from ergorate._quad import integrate_real
from ergorate.measure import (
    DensityComponent,
    DerivedDensity,
    ExpDecay,
    LogKernel,
    MeasureError,
    PowerLaw,
    RadonMeasure,
    Uniform,
    one_minus_exp,
)

E = math.e
SPECIAL_BAND = (1 / (3 * E), 3 * E)


class MeasureUnavailable(MeasureError):
    """The operation needs a Levy measure the function does not carry."""


class ZeroFunctionError(ValueError):
    """Raised for operations that are undefined on g = 0."""


class RateShapeError(ValueError):
    """Samples of t r(t) that are not positive, nondecreasing and concave.

    ``where`` holds the offending grid point, pair or triple.
    """

    def __init__(self, message: str, where: tuple[float, ...]):
        super().__init__(f"{message} at t = {where}")
        self.where = where


# --------------------------------------------------------------------------
# Bernstein functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BernsteinFunction:
    """Levy triple ``(a, b, mu)`` plus catalog tags.

    Parameters
    ----------
    a, b : float
        Killing term ``g(0+)`` and drift ``lim g(t)/t``, both >= 0.
    mu : RadonMeasure or None
        Levy measure.  ``None`` means the measure is not available, in which
        case ``closed_form`` is required.
    special, complete : bool
        Class tags, set by the catalog.
    closed_form : callable, optional
        Evaluator used when ``mu`` is None.
    rate_fn : callable, optional
        Rate function used when ``mu`` is None.
    """

    a: float = 0.0
    b: float = 0.0
    mu: RadonMeasure | None = field(default_factory=RadonMeasure)
    name: str = ""
    special: bool = False
    complete: bool = False
    closed_form: Callable[[complex], complex] | None = field(default=None, compare=False, repr=False)
    rate_fn: Callable[[float], float] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (a >= 0 and b >= 0 and math.isfinite(a) and math.isfinite(b)):
            raise MeasureError(f"need finite a, b >= 0, got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.mu is None:
            if self.closed_form is None:
                raise MeasureError("a function without Levy measure needs a closed form")
        elif not math.isfinite(self.mu.levy_integral()):
            raise MeasureError("Levy measure violates int s/(1+s) mu(ds) < inf")
        if self.complete and not self.special:
            object.__setattr__(self, "special", True)

    @property
    def has_measure(self) -> bool:
        return self.mu is not None

    @property
    def measure(self) -> RadonMeasure:
        if self.mu is None:
            raise MeasureUnavailable(f"{self.name or 'function'}: Levy measure unavailable")
        return self.mu

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.mu is not None and self.mu.is_zero

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def rate(self, t: float) -> float:
        return rate(self, t)


def evaluate(g: BernsteinFunction, z: complex, method: str = "auto") -> complex:
    """``g(z)`` for ``re z >= 0``."""
    z = complex(z)
    if z.real < 0:
        raise ValueError("evaluate needs re z >= 0")
    if g.mu is None:
        return complex(g.closed_form(z))
    return g.a + g.b * z + g.mu.exp_integral(z, "one_minus_exp", method)


def rate(g: BernsteinFunction, t: float) -> float:
    """``r[g](t) = a/2 + b/t + int min(s/t, 1) mu(ds)``."""
    if not t > 0:
        raise ValueError("rate needs t > 0")
    if g.is_zero:
        raise ZeroFunctionError("zero Bernstein function has no rate")
    if g.mu is None:
        if g.rate_fn is None:
            raise MeasureUnavailable(f"{g.name or 'function'}: no rate available")
        return float(g.rate_fn(t))
    mu = g.mu
    return g.a / 2 + g.b / t + mu.truncated_first_moment(t) / t + mu.tail_mass(t)


@dataclass(frozen=True)
class RateFunction:
    """``r[g]`` together with its raw form ``f(t) = t r(t)``."""

    source: BernsteinFunction

    def __call__(self, t: float) -> float:
        return rate(self.source, t)

    def raw(self, t: float) -> float:
        return t * rate(self.source, t)

    def shape(self, grid: Sequence[float], rtol: float = 1e-7) -> "ShapeReport":
        t = np.asarray(grid, dtype=float)
        return check_raw_shape(t, np.array([self.raw(x) for x in t]), rtol)


# --------------------------------------------------------------------------
# shape of t r(t)
# --------------------------------------------------------------------------


class ShapeReport(NamedTuple):
    positive: bool
    nondecreasing: bool
    concave: bool
    where: tuple[float, ...] | None

    @property
    def ok(self) -> bool:
        return self.positive and self.nondecreasing and self.concave


def _slopes(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.diff(f) / np.diff(t)


def check_raw_shape(t: np.ndarray, f: np.ndarray, rtol: float = 1e-7) -> ShapeReport:
    """Divided-difference test of positivity, monotonicity and concavity."""
    t, f = np.asarray(t, float), np.asarray(f, float)
    if t.ndim != 1 or t.shape != f.shape or t.size < 2:
        raise ValueError("need matching 1-d grid and samples, length >= 2")
    if np.any(np.diff(t) <= 0) or t[0] <= 0:
        raise ValueError("grid must be positive and strictly increasing")
    bad = np.flatnonzero(~(f > 0))
    if bad.size:
        return ShapeReport(False, True, True, (float(t[bad[0]]),))
    s = _slopes(t, f)
    # rounding in f is amplified by 1/dt in the slopes
    noise = 8 * np.finfo(float).eps * (np.abs(f[:-1]) + np.abs(f[1:])) / np.diff(t)
    bad = np.flatnonzero(s < -(rtol * np.abs(s) + noise))
    if bad.size:
        k = bad[0]
        return ShapeReport(True, False, True, (float(t[k]), float(t[k + 1])))
    tol = rtol * (np.abs(s[:-1]) + np.abs(s[1:])) + noise[:-1] + noise[1:]
    bad = np.flatnonzero(s[1:] - s[:-1] > tol)
    if bad.size:
        k = bad[0]
        return ShapeReport(True, True, False, (float(t[k]), float(t[k + 1]), float(t[k + 2])))
    return ShapeReport(True, True, True, None)


# --------------------------------------------------------------------------
# Cesaro symbol and the Wiener norm
# --------------------------------------------------------------------------


def cesaro_symbol(t: float, z):
    """``Ce_t(z) = (1 - e^{-tz})/(tz)``, equal to 1 at z = 0.  Vectorized in z."""
    if not t > 0:
        raise ValueError("cesaro_symbol needs t > 0")
    w = t * np.asarray(z, dtype=complex)
    out = np.ones_like(w)
    small = np.abs(w) < 1e-3
    nz = ~small
    out[nz] = -np.expm1(-w[nz]) / w[nz]
    ws = w[small]
    out[small] = 1 - ws / 2 * (1 - ws / 3 * (1 - ws / 4 * (1 - ws / 5)))
    return out[()] if out.ndim == 0 else out


def wiener_norm_cesaro(g: BernsteinFunction, t: float) -> float:
    """Total variation of the measure behind ``t Ce_t g``, i.e. ``t ||Ce_t g||_W``.

    Computed from tail masses only,

        2b + int_0^t (a + mu(r, inf)) dr + int_t^inf mu(r - t, r] dr,

    without reference to :func:`rate`.
    """
    if not t > 0:
        raise ValueError("wiener_norm_cesaro needs t > 0")
    if g.is_zero:
        raise ZeroFunctionError("zero Bernstein function has no rate")
    mu = g.measure
    total = [2 * g.b, g.a * t]
    if mu.is_zero:
        return math.fsum(total)
    pts = set(mu.scale_points())
    pts |= {p + t for p in pts} | {t, 2 * t}
    pts = sorted(pts)
    total.append(integrate_real(mu.tail_mass, 0.0, t, pts))
    total.append(integrate_real(lambda r: mu.interval_mass(r - t, r), t, math.inf, pts))
    return math.fsum(total)


# --------------------------------------------------------------------------
# from t r(t) back to (a, b, mu)
# --------------------------------------------------------------------------


def _right_derivative(f: Callable[[float], float], t: float) -> float:
    """One-sided secants with h = t 1e-2 ... t 1e-6, Richardson-extrapolated."""
    f0 = f(t)
    d = [(f(t + h) - f0) / h for h in t * 10.0 ** -np.arange(2, 7)]
    rich = [(10 * d[k + 1] - d[k]) / 9 for k in range(len(d) - 1)]
    # keep the extrapolant whose neighbour agrees best
    k = int(np.argmin([abs(rich[k + 1] - rich[k]) for k in range(len(rich) - 1)]))
    return rich[k + 1]


def rate_to_bernstein(f, grid: Sequence[float], rtol: float = 1e-7,
                      name: str = "reconstructed") -> BernsteinFunction:
    """Rebuild ``(a, b, mu)`` from ``f(t) = t r(t)``.

    Parameters
    ----------
    f : callable or array_like
        Either ``t -> t r(t)`` or its samples on ``grid``.
    grid : sequence of float
        Strictly increasing positive sampling points.

    Returns
    -------
    BernsteinFunction
        ``a`` is twice the right derivative at the far end of the data,
        ``b`` the limit of ``f`` at 0 (clipped to keep ``mu`` positive), and
        ``mu`` has the step tail ``mu(r, inf) = D+f(r) - a/2`` of the
        piecewise-linear interpolant, i.e. atoms at the grid points.  On
        the grid, ``t r[g](t)`` reproduces ``f`` exactly.

    Raises
    ------
    RateShapeError
        If the samples are not positive, nondecreasing and concave.
    """
    t = np.asarray(grid, dtype=float)
    fn = f if callable(f) else None
    vals = np.array([fn(x) for x in t], float) if fn else np.asarray(f, float)
    rep = check_raw_shape(t, vals, rtol)
    if not rep.positive:
        raise RateShapeError("t r(t) must be strictly positive", rep.where)
    if not rep.nondecreasing:
        raise RateShapeError("t r(t) must be nondecreasing", rep.where)
    if not rep.concave:
        raise RateShapeError("t r(t) must be concave", rep.where)

    s = _slopes(t, vals) if t.size > 1 else np.zeros(0)
    s = np.minimum.accumulate(np.maximum(s, 0.0))  # remove rounding-level wiggles
    b_max = max(vals[0] - t[0] * s[0], 0.0)
    if fn is not None:
        # D+f is nonincreasing; probe far beyond the data for its limit
        far = max(min(_right_derivative(fn, t[-1] * 10.0**k) for k in (0, 3, 6)), 0.0)
        # a linear tail beyond the data keeps the last slope
        a = 2 * s[-1] if far >= s[-1] * (1 - 1e-6) else 2 * far
        b = min(max(fn(t[0] * 1e-10), 0.0), b_max)
    else:
        a, b = 2 * s[-1], b_max
    m = np.concatenate([[(vals[0] - b) / t[0]], s]) - a / 2
    m = np.maximum(m, 0.0)
    weights = np.append(m[:-1] - m[1:], m[-1])
    atoms = tuple((float(x), float(w)) for x, w in zip(t, weights) if w > 0)
    return BernsteinFunction(a, b, RadonMeasure(atoms=atoms), name=name)


# --------------------------------------------------------------------------
# g = g1 + z g2
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WDecomposition:
    """``g(z) = a + b z + c - (L nu)(z) + z (L gamma)(z)``.

    ``nu(ds) = s/(1+s) mu(ds)``, ``gamma`` has density
    ``r -> int_(r, inf) mu(ds)/(1+s)`` and both have total mass ``c``.
    """

    a: float
    b: float
    c: float
    nu: RadonMeasure
    gamma: RadonMeasure

    def g1(self, z: complex) -> complex:
        return self.a + self.c - self.nu.exp_integral(z, "exp")

    def g2(self, z: complex) -> complex:
        return self.b + self.gamma.exp_integral(z, "exp")

    def reconstruct(self, z: complex) -> complex:
        z = complex(z)
        return self.g1(z) + z * self.g2(z)


def _gamma_density_part(d: DensityComponent, r: float) -> float:
    """``int_(r, inf) d(s)/(1+s) ds`` in closed form where known."""
    if isinstance(d, ExpDecay):
        return d.c * math.exp(d.beta) * special.exp1(d.beta * (1 + r)) if d.beta < 500 else \
            integrate_real(lambda s: d.density(s) / (1 + s), r, math.inf)
    if isinstance(d, Uniform):
        lo = max(r, d.s0)
        if lo >= d.s1:
            return 0.0
        return d.c * (math.log((1 + d.s1) / (1 + lo)) if math.isfinite(d.s1) else math.inf)
    if isinstance(d, LogKernel):
        return d.c * (special.exp1(r) - E * special.exp1(1 + r))
    if isinstance(d, PowerLaw) and d.alpha > 0:
        # substitute u = 1/(1+s): int_0^x u^a (1-u)^(-1-a) du, x = 1/(1+r)
        x, al = 1 / (1 + r), d.alpha
        return d.c * x ** (1 + al) / (1 + al) * special.hyp2f1(1 + al, 1 + al, 2 + al, x)
    lo = max(r, d.lower)
    if lo >= d.upper:
        return 0.0
    return integrate_real(lambda s: d.density(s) / (1 + s), lo, d.upper, d.breakpoints())


def w_decompose(g: BernsteinFunction) -> WDecomposition:
    mu = g.measure
    nu_atoms = tuple((s, w * s / (1 + s)) for s, w in mu.atoms)
    nu_dens = tuple(
        DerivedDensity(lambda s, d=d: s / (1 + s) * d.density(s), d.lower, d.upper,
                       d.breakpoints(), label=f"nu[{d.family}]")
        for d in mu.densities
    )
    nu = RadonMeasure(nu_atoms, nu_dens)
    c = mu.levy_integral()

    gamma_parts: list[DensityComponent] = []
    if mu.atoms:
        locs = np.array([s for s, _ in mu.atoms])
        wts = np.array([w / (1 + s) for s, w in mu.atoms])

        def atom_part(r, locs=locs, wts=wts):
            return float(wts[locs > r].sum())

        gamma_parts.append(DerivedDensity(atom_part, 0.0, float(locs.max()), tuple(sorted(locs)),
                                          label="gamma[atoms]"))
    for d in mu.densities:
        gamma_parts.append(DerivedDensity(lambda r, d=d: _gamma_density_part(d, r), 0.0, d.upper,
                                          tuple(x for x in (d.lower, *d.breakpoints()) if x > 0),
                                          label=f"gamma[{d.family}]"))
    return WDecomposition(g.a, g.b, c, nu, RadonMeasure(densities=tuple(gamma_parts)))


# --------------------------------------------------------------------------
# estimates
# --------------------------------------------------------------------------


class SandwichBounds(NamedTuple):
    lower: float
    upper: float
    value_re: float
    value_abs: float

    def holds(self, slack: float = 1e-9) -> bool:
        tol = slack * max(self.upper, 1e-300)
        return (self.lower <= self.value_re + tol and self.value_re <= self.value_abs + tol
                and self.value_abs <= self.upper + tol)


def sandwich_bounds(g: BernsteinFunction, t: float, z: complex) -> SandwichBounds:
    """``(t x) e^{-t x} r(t) <= re g(z) <= |g(z)| <= max(2, t|z|) r(t)``, x = re z."""
    z = complex(z)
    if not z.real > 0:
        raise ValueError("sandwich_bounds needs re z > 0")
    r = rate(g, t)
    x = t * z.real
    val = evaluate(g, z)
    return SandwichBounds(x * math.exp(-x) * r, max(2.0, t * abs(z)) * r, val.real, abs(val))


def comparability_constants(alpha: float, beta: float, special: bool = False) -> tuple[float, float]:
    """``(c0, c1)`` with ``c0 r(t) <= |g(z)| <= c1 r(t)`` for ``alpha <= t|z| <= beta``.

    ``c0`` is the minimum of ``x e^{-x}`` over ``[alpha, beta]``, which sits
    at an endpoint since the function is unimodal; in the special case it
    is further divided by ``3e``.  ``c1 = max(2, beta)``.
    """
    if not (alpha > 0 and alpha <= beta):
        raise ValueError("need 0 < alpha <= beta")
    c0 = min(alpha * math.exp(-alpha), beta * math.exp(-beta))
    if special:
        c0 = 1 / (3 * E**2) if alpha == beta == 1 else c0 / (3 * E)
    return c0, max(2.0, float(beta))


def rate_bracket(g: BernsteinFunction, t: float) -> tuple[float, float]:
    """Interval containing ``r(t)`` obtained from ``|g(1/t)|`` alone (special g)."""
    if not g.special:
        raise ValueError("rate_bracket needs a special function")
    c0, c1 = comparability_constants(1.0, 1.0, special=True)
    v = abs(evaluate(g, 1 / t))
    return v / c1, v / c0


def special_estimate_check(g: BernsteinFunction, z: complex, slack: float = 0.0) -> tuple[float, bool]:
    """Ratio ``g(|z|)/|g(z)|`` and whether it lies in ``[1/(3e), 3e]``."""
    if not g.special:
        raise ValueError("special_estimate_check needs a function tagged special")
    z = complex(z)
    if z.real < 0:
        raise ValueError("need re z >= 0")
    if z == 0:
        if g.a == 0:
            raise ZeroDivisionError("g(0)/|g(0)| is 0/0 when a = 0")
        return 1.0, True
    num = evaluate(g, abs(z)).real
    den = abs(evaluate(g, z))
    ratio = num / den
    lo, hi = SPECIAL_BAND
    return ratio, lo * (1 - slack) <= ratio <= hi * (1 + slack)


# --------------------------------------------------------------------------
# divided-difference probes
# --------------------------------------------------------------------------


class ProbeVerdict(NamedTuple):
    passed: bool
    order: int | None = None
    window: tuple[float, float] | None = None
    value: float | None = None

    def __bool__(self) -> bool:
        return self.passed


def sign_probe(grid: Sequence[float], values: Sequence[float], n_max: int, sign0: int = 1,
               n_min: int = 0, atol: float = 1e-7, value_rtol: float = 0.0) -> ProbeVerdict:
    """Check ``sign0 (-1)^n [t_k..t_{k+n}] h >= -tol`` for ``n_min <= n <= n_max``.

    ``tol`` is ``atol`` plus the propagated rounding bound of the values
    (relative size ``value_rtol`` plus a few ulps).
    """
    t = np.asarray(grid, float)
    h = np.asarray(values, float)
    if t.ndim != 1 or t.shape != h.shape:
        raise ValueError("grid and values must be 1-d of equal length")
    if np.any(np.diff(t) <= 0):
        raise ValueError("grid must be strictly increasing")
    if t.size <= n_max:
        raise ValueError(f"grid of length {t.size} too short for order {n_max}")
    dd = h.copy()
    err = (4 * np.finfo(float).eps + value_rtol) * np.abs(h)
    for n in range(0, n_max + 1):
        if n > 0:
            span = t[n:] - t[:-n]
            dd = (dd[1:] - dd[:-1]) / span
            err = (err[1:] + err[:-1]) / span
        if n < n_min:
            continue
        signed = sign0 * (-1) ** n * dd
        bad = np.flatnonzero(signed < -(atol + err))
        if bad.size:
            k = bad[0]
            return ProbeVerdict(False, n, (float(t[k]), float(t[k + n])), float(dd[k]))
    return ProbeVerdict(True)


def cm_probe(h: Callable[[float], float], grid: Sequence[float], n_max: int,
             atol: float = 1e-7, value_rtol: float = 0.0) -> ProbeVerdict:
    """Necessary condition for complete monotonicity: ``(-1)^n [..]h >= 0``."""
    t = np.asarray(grid, float)
    if t.size <= n_max:
        raise ValueError(f"grid of length {t.size} too short for order {n_max}")
    return sign_probe(t, [h(x) for x in t], n_max, 1, 0, atol, value_rtol)


def bernstein_probe(h: Callable[[float], float], grid: Sequence[float], n_max: int,
                    atol: float = 1e-7, value_rtol: float = 0.0) -> ProbeVerdict:
    """Necessary condition for a Bernstein function: h >= 0 and h' completely monotone."""
    t = np.asarray(grid, float)
    if t.size <= n_max:
        raise ValueError(f"grid of length {t.size} too short for order {n_max}")
    vals = [h(x) for x in t]
    v = sign_probe(t, vals, 0, 1, 0, atol, value_rtol)
    if not v:
        return v
    return sign_probe(t, vals, n_max, -1, 1, atol, value_rtol)


__all__ = [
    "BernsteinFunction", "RateFunction", "WDecomposition", "SandwichBounds", "ShapeReport",
    "ProbeVerdict", "MeasureUnavailable", "ZeroFunctionError", "RateShapeError",
    "evaluate", "rate", "cesaro_symbol", "wiener_norm_cesaro", "rate_to_bernstein",
    "w_decompose", "sandwich_bounds", "comparability_constants", "rate_bracket",
    "special_estimate_check", "cm_probe", "bernstein_probe", "sign_probe", "check_raw_shape",
    "one_minus_exp",
]
