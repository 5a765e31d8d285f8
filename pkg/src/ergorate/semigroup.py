"""Finite-dimensional semigroup simulator.

The generator is ``A = V diag(lambda) V^{-1}`` with ``re lambda >= 0``, so
``T(s) = exp(-sA)`` is bounded by ``M = cond(V)`` (``M = 1`` when ``V`` is
the identity).  Vectors are complex numpy arrays; every operator norm is
the Euclidean one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ergorate._quad import integrate_real
from ergorate.bernstein import (
    BernsteinFunction,
    cesaro_symbol,
    evaluate,
    rate,
)
from ergorate.catalog import drift, frac_power, log_rate
from ergorate.measure import EXP, ExpE1, MeasureError, PowerLaw, RadonMeasure, Uniform

E = math.e


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalGenerator:
    """Diagonalizable generator with spectrum in the closed right half-plane."""

    eigenvalues: np.ndarray
    V: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=complex)).copy()
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("need a nonempty 1-d list of eigenvalues")
        if not np.all(np.isfinite(lam)):
            raise ValueError("eigenvalues must be finite")
        if np.any(lam.real < 0):
            raise ValueError("eigenvalues must satisfy re lambda >= 0")
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        if self.V is not None:
            V = np.asarray(self.V, dtype=complex).copy()
            if V.shape != (lam.size, lam.size):
                raise ValueError("V must be square of the generator dimension")
            Vinv = np.linalg.inv(V)
            V.setflags(write=False)
            Vinv.setflags(write=False)
            object.__setattr__(self, "V", V)
            object.__setattr__(self, "_Vinv", Vinv)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def M(self) -> float:
        """``sup ||T(s)||`` bound ``||V|| ||V^{-1}||``."""
        if self.V is None:
            return 1.0
        return float(np.linalg.cond(self.V))

    def apply_diag(self, d: np.ndarray, x: np.ndarray) -> np.ndarray:
        """``V diag(d) V^{-1} x``."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim,):
            raise ValueError(f"vector of length {self.dim} expected")
        if self.V is None:
            return d * x
        return self.V @ (d * (self._Vinv @ x))

    def matrix(self, d: np.ndarray) -> np.ndarray:
        if self.V is None:
            return np.diag(d)
        return self.V @ np.diag(d) @ self._Vinv

    def op_norm(self, d: np.ndarray) -> float:
        """``||V diag(d) V^{-1}||``; exact max |d| in the diagonal case."""
        if self.V is None:
            return float(np.max(np.abs(d)))
        return float(np.linalg.norm(self.matrix(d), 2))

    # -- constructors ------------------------------------------------------
    @classmethod
    def log_spaced(cls, n: int, lo: float, hi: float, rng: np.random.Generator | None = None,
                   phases: bool = True) -> "DiagonalGenerator":
        """Moduli log-spaced in [lo, hi]; random phases in (-pi/2, pi/2) if ``rng``."""
        mod = np.geomspace(lo, hi, n)
        if rng is not None and phases:
            theta = rng.uniform(-np.pi / 2, np.pi / 2, n)
            return cls(mod * np.exp(1j * theta))
        return cls(mod.astype(complex))

    @classmethod
    def accumulating(cls, n_max: int, rho: float = 1.0, base: float = 4.0,
                     phases: Sequence[float] | None = None) -> "DiagonalGenerator":
        """``z_n = rho base^{-n} e^{i theta_n}``, n = 1..n_max, accumulating at 0."""
        n = np.arange(1, n_max + 1)
        theta = np.zeros(n_max) if phases is None else np.asarray(phases, float)
        if np.any(np.abs(theta) > np.pi / 2):
            raise ValueError("phases must lie in [-pi/2, pi/2]")
        return cls(rho * base ** (-n.astype(float)) * np.exp(1j * theta))

    @classmethod
    def similar(cls, eigenvalues, rng: np.random.Generator, spread: float = 0.3) -> "DiagonalGenerator":
        """Conjugate by ``V = I + spread G`` with G Gaussian, giving M > 1."""
        lam = np.asarray(eigenvalues, dtype=complex)
        n = lam.size
        V = np.eye(n) + spread * rng.standard_normal((n, n)) / math.sqrt(n)
        return cls(lam, V)


def as_vector(x, dim: int) -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.shape != (dim,) or not np.all(np.isfinite(v)):
        raise ValueError(f"need a finite vector of length {dim}")
    return v


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


# --------------------------------------------------------------------------
# semigroup, Cesaro means, functional calculus
# --------------------------------------------------------------------------


def semigroup_apply(gen: DiagonalGenerator, s: float, x) -> np.ndarray:
    """``T(s) x``."""
    if not s >= 0:
        raise ValueError("semigroup_apply needs s >= 0")
    return gen.apply_diag(np.exp(-s * gen.eigenvalues), x)


def cesaro_mean(gen: DiagonalGenerator, t: float, x) -> np.ndarray:
    """``Ce_t(A) x = (1/t) int_0^t T(s) x ds`` via the closed-form symbol."""
    return gen.apply_diag(np.asarray(cesaro_symbol(t, gen.eigenvalues)), x)


def bernstein_symbols(gen: DiagonalGenerator, g: BernsteinFunction, method: str = "quad") -> np.ndarray:
    """``g(lambda_i)``; ``method="quad"`` integrates the Phillips kernel per eigenvalue."""
    lam = gen.eigenvalues
    if method == "spectral":
        return np.array([evaluate(g, z) for z in lam])
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    mu = g.measure
    jumps = np.array([mu.exp_integral(z, "one_minus_exp", "quad") for z in lam])
    return g.a + g.b * lam + jumps


def phillips_apply(gen: DiagonalGenerator, g: BernsteinFunction, x, method: str = "quad") -> np.ndarray:
    """``g(A)x = a x + b A x + int (I - T(s)) x mu(ds)``.

    ``method="quad"`` evaluates the integral by quadrature per spectral
    coordinate; ``method="spectral"`` applies ``diag(g(lambda_i))`` using
    closed forms where the measure has them.
    """
    return gen.apply_diag(bernstein_symbols(gen, g, method), x)


class RateBoundReport(NamedTuple):
    max_ratio: float
    passed: bool
    ratios: np.ndarray


def rate_bound_check(gen: DiagonalGenerator, g: BernsteinFunction, x, t_grid: Sequence[float],
                     method: str = "quad", slack: float = 1e-9) -> RateBoundReport:
    """``||Ce_t(A) g(A) x|| <= 2 M r(t) ||x||`` on ``t_grid``."""
    x = as_vector(x, gen.dim)
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ValueError("rate_bound_check needs x != 0")
    t = np.asarray(t_grid, float)
    if np.any(t <= 0):
        raise ValueError("t-grid must be positive")
    y = phillips_apply(gen, g, x, method)
    M = gen.M
    ratios = np.array([np.linalg.norm(cesaro_mean(gen, ti, y)) / (2 * M * rate(g, ti) * nx) for ti in t])
    mx = float(ratios.max())
    return RateBoundReport(mx, mx <= 1 + slack, ratios)


class ProfileRow(NamedTuple):
    t: float
    norm: float
    rate: float
    ratio: float
    bound: float


def decay_profile(gen: DiagonalGenerator, g: BernsteinFunction, x, t_grid: Sequence[float],
                  method: str = "quad") -> list[ProfileRow]:
    """Rows ``(t, ||Ce_t y||, r(t), ||Ce_t y||/bound, bound)`` with y = g(A)x, bound = 2 M r(t) ||x||."""
    x = as_vector(x, gen.dim)
    lam = gen.eigenvalues
    if np.any((lam.real == 0) & (lam != 0)):
        raise ValueError("decay_profile needs re lambda > 0 or lambda = 0")
    y = phillips_apply(gen, g, x, method)
    nx, M = np.linalg.norm(x), gen.M
    rows = []
    for t in np.asarray(t_grid, float):
        r = rate(g, t)
        nrm = float(np.linalg.norm(cesaro_mean(gen, t, y)))
        bound = 2 * M * r * nx
        rows.append(ProfileRow(float(t), nrm, r, nrm / bound, bound))
    return rows


class SpectrumVerdict(NamedTuple):
    passed: bool
    max_distance: float


def spectral_inclusion_check(gen: DiagonalGenerator, h: Callable[[complex], complex],
                             rtol: float = 1e-12) -> SpectrumVerdict:
    """Each ``h(lambda_i)`` is an eigenvalue of the computed matrix ``h(A)``."""
    vals = np.array([complex(h(z)) for z in gen.eigenvalues])
    spec = np.linalg.eigvals(gen.matrix(vals))
    dist = max(float(np.min(np.abs(spec - v))) for v in vals)
    scale = 1 + float(np.max(np.abs(vals)))
    cond = 1.0 if gen.V is None else gen.M
    return SpectrumVerdict(dist <= rtol * scale * cond * gen.dim, dist)


# --------------------------------------------------------------------------
# optimality
# --------------------------------------------------------------------------


def delta_constant(n_grid: int = 10_000) -> float:
    """``min |1 - exp(-e^{i theta})|`` over a grid of ``theta`` in [-pi/2, pi/2]."""
    theta = np.linspace(-np.pi / 2, np.pi / 2, n_grid + 1)
    return float(np.min(np.abs(-np.expm1(-np.exp(1j * theta)))))


class OptimalityRow(NamedTuple):
    n: int
    t: float
    lower_bound: float
    norm: float
    ratio: float


class OptimalityReport(NamedTuple):
    rows: list[OptimalityRow]
    delta: float
    growth: float
    diverges: bool
    lower_bound_holds: bool


def optimality_probe(gen: DiagonalGenerator, g: BernsteinFunction, eps: Callable[[float], float],
                     n_max: int | None = None, factor: float = 100.0,
                     slack: float = 1e-9) -> OptimalityReport:
    """Track ``||g(A) Ce_{t_n}(A)|| / (eps(t_n) r(t_n))`` along ``t_n = 1/|z_n|``.

    ``z_n`` are the eigenvalues ordered by decreasing modulus.  Divergence
    is reported when the last ratio exceeds the first by ``factor``.
    """
    if not g.special:
        raise ValueError("optimality_probe needs a function tagged special")
    lam = gen.eigenvalues
    if np.any(lam == 0):
        raise ValueError("eigenvalues must be nonzero")
    order = np.argsort(-np.abs(lam), kind="stable")
    z = lam[order][: n_max or lam.size]
    gl = np.array([evaluate(g, w) for w in lam])
    delta = delta_constant()
    c = delta / (3 * E**2)
    rows = []
    for n, zn in enumerate(z, start=1):
        t = 1 / abs(zn)
        r = rate(g, t)
        norm = gen.op_norm(gl * np.asarray(cesaro_symbol(t, lam)))
        rows.append(OptimalityRow(n, t, c * r, norm, norm / (eps(t) * r)))
    growth = rows[-1].ratio / rows[0].ratio
    holds = all(row.norm >= row.lower_bound * (1 - slack) for row in rows)
    return OptimalityReport(rows, delta, growth, growth >= factor, holds)


# --------------------------------------------------------------------------
# potentials and the Abel limit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialPair:
    """Potential ``f = L mu`` and the Bernstein function ``g = 1/f``."""

    name: str
    mu: RadonMeasure
    g: BernsteinFunction


def potential_catalog() -> dict[str, PotentialPair]:
    return {
        "inverse": PotentialPair("inverse", RadonMeasure.of(Uniform(1.0, 0.0, math.inf)), drift()),
        "inverse_sqrt": PotentialPair("inverse_sqrt",
                                      RadonMeasure.of(PowerLaw(1 / math.sqrt(math.pi), -0.5)),
                                      frac_power(0.5)),
        "log_ratio": PotentialPair("log_ratio", RadonMeasure.of(ExpE1(1.0)), log_rate()),
    }


def _neville_at_zero(h: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Polynomial extrapolation of samples ``v[k]`` at nodes ``h[k]`` to 0."""
    p = [np.asarray(x, dtype=complex) for x in v]
    n = len(h)
    for m in range(1, n):
        p = [(h[k] * p[k + 1] - h[k + m] * p[k]) / (h[k] - h[k + m]) for k in range(n - m)]
    return p[0]


class AbelResult(NamedTuple):
    y: np.ndarray
    residual: float


def abel_transform(gen: DiagonalGenerator, mu: RadonMeasure, x, g: BernsteinFunction | None = None,
                   alphas: Sequence[float] | None = None) -> AbelResult:
    """Abel limit ``y = lim_{alpha -> 0} int e^{-alpha s} T(s) x mu(ds)``.

    Each damped integral is computed by quadrature, coordinatewise, and the
    limit is taken by polynomial extrapolation in ``alpha``.  By default the
    damping sequence is ``1e-2 2^{-k} |lambda_i|``, k = 0..5.  The residual is
    ``||g(A) y - x|| / ||x||`` with ``g = 1/(L mu)`` applied through the
    Phillips formula when ``g`` carries a Levy measure.
    """
    x = as_vector(x, gen.dim)
    lam = gen.eigenvalues
    if np.any(lam.real <= 0) and not math.isfinite(mu.total_mass()):
        raise MeasureError("Abel limit diverges: re lambda = 0 with an infinite-mass measure")
    al = np.asarray(alphas if alphas is not None else 1e-2 * 0.5 ** np.arange(6), float)
    if np.any(al <= 0) or np.any(np.diff(al) >= 0):
        raise ValueError("alphas must be positive and decreasing")
    f_lim = np.empty(lam.size, dtype=complex)
    for i, z in enumerate(lam):
        # damping measured in units of |lambda_i| keeps the extrapolation scale-free
        h = al * max(abs(z), 1e-300) if alphas is None else al
        f_lim[i] = _neville_at_zero(h, [mu.exp_integral(z + a, EXP, "quad") for a in h])
    y = gen.apply_diag(f_lim, x)
    if g is None:
        g_sym = 1 / np.array([mu.exp_integral(z, EXP) for z in lam])
    elif g.has_measure:
        g_sym = bernstein_symbols(gen, g, "quad")
    else:
        g_sym = bernstein_symbols(gen, g, "spectral")
    res = float(np.linalg.norm(gen.apply_diag(g_sym, y) - x) / np.linalg.norm(x))
    return AbelResult(y, res)


# --------------------------------------------------------------------------
# logarithmic rates
# --------------------------------------------------------------------------


class GeneralRateReport(NamedTuple):
    constant: float
    ratios: np.ndarray
    passed: bool


_GENERAL_PAIRS = {("log", 1.0): np.log}


def general_rate_check(gen: DiagonalGenerator, f: str, lam0: complex, x, t_grid: Sequence[float],
                       c_max: float = 10.0) -> GeneralRateReport:
    """Measure ``c_t = ||Ce_t x|| |f(1/t)| / (||x|| + ||f(A)x||)`` over the grid.

    Supported pair: ``f = log`` with ``lam0 = 1``, for which
    ``(z - 1)/log z`` is a complete Bernstein function.
    """
    key = (f, complex(lam0).real if complex(lam0).imag == 0 else complex(lam0))
    if key not in _GENERAL_PAIRS:
        raise ValueError(f"unsupported pair f={f!r}, lambda0={lam0!r}; supported: log with 1")
    fn = _GENERAL_PAIRS[key]
    x = as_vector(x, gen.dim)
    lam = gen.eigenvalues
    if np.any(lam == 0):
        raise ValueError("f(A) undefined: log undefined at 0")
    fx = gen.apply_diag(fn(lam), x)
    denom = np.linalg.norm(x) + np.linalg.norm(fx)
    t = np.asarray(t_grid, float)
    ratios = np.array([np.linalg.norm(cesaro_mean(gen, ti, x)) * abs(fn(1 / ti)) / denom for ti in t])
    c = float(ratios.max()) / gen.M
    return GeneralRateReport(c, ratios, c <= c_max)


def log_resolvent_apply(gen: DiagonalGenerator, lam: complex, x) -> np.ndarray:
    """``(lam - log A)^{-1} x`` for ``|im lam| > pi``."""
    lam = complex(lam)
    if not abs(lam.imag) > math.pi:
        raise ValueError("need |im lambda| > pi")
    ev = gen.eigenvalues
    if np.any(ev == 0):
        raise ValueError("log undefined at 0")
    return gen.apply_diag(1 / (lam - np.log(ev)), x)


def log_resolvent_quad(lam: complex, z: float) -> complex:
    """``-int_0^inf dt / (((lam - log t)^2 + pi^2)(t + z))`` for real ``z > 0``.

    With ``t = e^u`` the integrand is smooth and decays like ``u^{-2}``.
    """
    lam = complex(lam)
    if not z > 0:
        raise ValueError("quadrature cross-check needs real z > 0")

    def k(u: float) -> complex:
        w = (lam - u) ** 2 + math.pi**2
        # e^u/(e^u + z) written without overflow
        frac = 1 / (1 + z * math.exp(-u)) if u > 0 else math.exp(u) / (math.exp(u) + z)
        return -frac / w

    pts = sorted({0.0, math.log(z), lam.real})
    re = integrate_real(lambda u: k(u).real, -math.inf, math.inf, pts)
    im = integrate_real(lambda u: k(u).imag, -math.inf, math.inf, pts)
    return complex(re, im)


def log_kernel_mass(lam: complex) -> float:
    """``int_0^inf dt / (t |(lam - log t)^2 + pi^2|)``, finite for |im lam| > pi."""
    lam = complex(lam)
    return integrate_real(lambda u: 1 / abs((lam - u) ** 2 + math.pi**2), -math.inf, math.inf,
                          (lam.real,))


__all__ = [
    "DiagonalGenerator", "as_vector", "random_unit_vector", "semigroup_apply", "cesaro_mean",
    "bernstein_symbols", "phillips_apply", "rate_bound_check", "RateBoundReport", "decay_profile",
    "ProfileRow", "spectral_inclusion_check", "SpectrumVerdict", "delta_constant",
    "optimality_probe", "OptimalityReport", "OptimalityRow", "PotentialPair", "potential_catalog",
    "abel_transform", "AbelResult", "general_rate_check", "GeneralRateReport",
    "log_resolvent_apply", "log_resolvent_quad", "log_kernel_mass",
]
