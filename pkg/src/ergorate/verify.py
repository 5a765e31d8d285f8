"""Verification suites.

Each suite returns a list of :class:`Check` records ``(name, measured,
bound, passed)``.  Identity checks use the relative tolerance from the
``ERGO_RATE_TOL`` environment variable (default ``1e-6``); inequality
checks allow ``1e-9`` relative slack.
"""

from __future__ import annotations

import math
import os
from typing import Callable, NamedTuple

import numpy as np

from ergorate import catalog
from ergorate.bernstein import (
    RateShapeError,
    comparability_constants,
    evaluate,
    rate,
    rate_to_bernstein,
    sandwich_bounds,
    special_estimate_check,
    wiener_norm_cesaro,
    SPECIAL_BAND,
)
from ergorate.laplace import cbf_rate_probe, rate_laplace_residual
from ergorate.semigroup import (
    DiagonalGenerator,
    abel_transform,
    bernstein_symbols,
    general_rate_check,
    optimality_probe,
    potential_catalog,
    random_unit_vector,
    rate_bound_check,
)
from ergorate.stieltjes import cbf_to_stieltjes, herglotz_check, log_ratio, log_stieltjes

SLACK = 1e-9
DEFAULT_TOL = 1e-6


class Check(NamedTuple):
    name: str
    measured: float
    bound: float
    passed: bool


def tolerance() -> float:
    raw = os.environ.get("ERGO_RATE_TOL")
    if raw is None or raw == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"ERGO_RATE_TOL must be a number, got {raw!r}") from None
    if not tol > 0:
        raise ValueError("ERGO_RATE_TOL must be positive")
    return tol


def _le(name: str, measured: float, bound: float) -> Check:
    return Check(name, float(measured), float(bound), bool(measured <= bound))


# -- grids shared by suites and tests -----------------------------------------

def half_plane_grid(n: int = 100) -> np.ndarray:
    """``n`` points of the closed right half-plane: 10 moduli x 10 angles."""
    k = int(round(math.sqrt(n)))
    mod = np.geomspace(1e-3, 1e3, k)
    ang = np.linspace(-np.pi / 2, np.pi / 2, n // k)
    return (mod[:, None] * np.exp(1j * ang[None, :])).ravel()


def cut_plane_grid(n: int = 50) -> np.ndarray:
    """``n`` points off (-inf, 0], including both sides near the cut."""
    mod = np.geomspace(1e-2, 1e2, n // 5)
    ang = np.array([-3.0, -1.5, 0.0, 1.5, 3.0])
    return (mod[:, None] * np.exp(1j * ang[None, :])).ravel()


def random_draws(rng: np.random.Generator, n: int):
    """Random ``(g, t, z)`` with re z > 0 over the full catalog."""
    cat = catalog.default_catalog()
    for _ in range(n):
        g = cat[rng.integers(len(cat))]
        t = 10 ** rng.uniform(-2, 2)
        z = 10 ** rng.uniform(-3, 3) * np.exp(1j * rng.uniform(-0.49, 0.49) * np.pi)
        yield g, float(t), complex(z)


def sweep_generators(rng: np.random.Generator, count: int = 20, dim: int = 50):
    for _ in range(count):
        yield DiagonalGenerator.log_spaced(dim, 1e-3, 1.0, rng), random_unit_vector(dim, rng)


# -- suites -------------------------------------------------------------------

def suite_wiener(seed: int = 0) -> list[Check]:
    tol = tolerance()
    out = []
    for g in catalog.measure_catalog():
        for t in (0.1, 1.0, 10.0, 100.0):
            two_tr = 2 * t * rate(g, t)
            err = abs(wiener_norm_cesaro(g, t) - two_tr) / (1 + two_tr)
            out.append(_le(f"wiener[{g.name},t={t:g}]", err, tol))
    return out


def suite_sandwich(seed: int = 0, draws: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst, count = -math.inf, 0
    for g, t, z in random_draws(rng, draws):
        sb = sandwich_bounds(g, t, z)
        scale = max(sb.upper, 1e-300)
        gap = max(sb.lower - sb.value_re, sb.value_re - sb.value_abs, sb.value_abs - sb.upper) / scale
        worst = max(worst, gap)
        count += not sb.holds(SLACK)
    return [_le(f"sandwich[{draws} draws,worst relative gap]", worst, SLACK),
            _le("sandwich[violations]", count, 0)]


def suite_special(seed: int = 0) -> list[Check]:
    lo, hi = SPECIAL_BAND
    grid = half_plane_grid(100)
    out = []
    for g in catalog.special_catalog():
        ratios = [special_estimate_check(g, z)[0] for z in grid]
        out.append(Check(f"special[{g.name},min ratio]", min(ratios), lo, min(ratios) >= lo * (1 - SLACK)))
        out.append(_le(f"special[{g.name},max ratio]", max(ratios), hi * (1 + SLACK)))
    return out


def suite_comparability(seed: int = 0) -> list[Check]:
    c0, c1 = comparability_constants(1, 1, special=True)
    out = [Check("comparability[c0 == 1/(3e^2)]", c0, 1 / (3 * math.e**2), c0 == 1 / (3 * math.e**2)),
           Check("comparability[c1 == 2]", c1, 2.0, c1 == 2.0)]
    for g in catalog.special_catalog():
        for t in (1.0, 10.0, 1000.0):
            r, v = rate(g, t), abs(evaluate(g, 1 / t))
            out.append(Check(f"comparability[{g.name},t={t:g},lower]", v, c0 * r, c0 * r <= v * (1 + SLACK)))
            out.append(_le(f"comparability[{g.name},t={t:g},upper]", v, c1 * r * (1 + SLACK)))
    return out


def suite_roundtrip(seed: int = 0) -> list[Check]:
    tol = tolerance()
    grid = np.unique(np.concatenate([np.geomspace(0.01, 100, 41), [1.0]]))
    out = []
    for g in (catalog.atom(1.0), catalog.drift(), catalog.constant(1.0), catalog.frac_power(0.5)):
        g2 = rate_to_bernstein(lambda t, g=g: t * rate(g, t), grid)
        err = max(abs(rate(g2, t) - rate(g, t)) / rate(g, t) for t in grid)
        out.append(_le(f"roundtrip[{g.name}]", err, tol))
    try:
        rate_to_bernstein(lambda t: t * t, grid)
        rejected = False
    except RateShapeError:
        rejected = True
    out.append(Check("roundtrip[reject t^2]", float(rejected), 1.0, rejected))
    return out


def suite_laplace(seed: int = 0) -> list[Check]:
    out = []
    for g in catalog.default_catalog():
        worst = max(rate_laplace_residual(g, z) for z in (0.5, 1.0, 2.0, 1 + 1j))
        out.append(_le(f"laplace[{g.name},residual]", worst, 1e-5))
    for g in catalog.complete_catalog():
        v = cbf_rate_probe(g)
        out.append(Check(f"laplace[{g.name},t r(t) Bernstein]", float(v.passed), 1.0, v.passed))
    v = cbf_rate_probe(catalog.atom(1.0))
    out.append(Check("laplace[atom:1,t r(t) rejected]", float(not v.passed), 1.0, not v.passed))
    return out


def suite_semigroup(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    t_grid = np.geomspace(0.1, 1e4, 20)
    worst_ratio, worst_phillips = 0.0, 0.0
    for gen, x in sweep_generators(rng):
        for g in catalog.default_catalog():
            method = "quad" if g.has_measure else "spectral"
            worst_ratio = max(worst_ratio, rate_bound_check(gen, g, x, t_grid, method).max_ratio)
            if g.has_measure:
                q = bernstein_symbols(gen, g, "quad")
                s = bernstein_symbols(gen, g, "spectral")
                worst_phillips = max(worst_phillips, float(np.max(np.abs(q - s) / np.maximum(np.abs(s), 1e-300))))
    return [_le("semigroup[max ||Ce_t y||/(2M r ||x||)]", worst_ratio, 1 + SLACK),
            _le("semigroup[phillips quad vs spectral]", worst_phillips, 1e-7)]


def suite_optimality(seed: int = 0) -> list[Check]:
    gen = DiagonalGenerator.accumulating(10)
    rep = optimality_probe(gen, catalog.frac_power(0.5), lambda t: 1 / math.log(2 + t))
    worst = min(row.norm / row.lower_bound for row in rep.rows)
    return [Check("optimality[growth n=1..10]", rep.growth, 100.0, rep.diverges),
            Check("optimality[min norm/lower bound]", worst, 1.0, rep.lower_bound_holds)]


def suite_abel(seed: int = 0) -> list[Check]:
    gens = [DiagonalGenerator([2.0]), DiagonalGenerator([4.0]),
            DiagonalGenerator.log_spaced(8, 1e-2, 10.0, np.random.default_rng(seed))]
    out = []
    for name, pair in potential_catalog().items():
        worst = 0.0
        for gen in gens:
            worst = max(worst, abel_transform(gen, pair.mu, np.ones(gen.dim), pair.g).residual)
        out.append(_le(f"abel[{name}]", worst, 1e-6))
    return out


def suite_stieltjes(seed: int = 0) -> list[Check]:
    grid = cut_plane_grid(50)
    f = log_stieltjes()
    err = max(abs(f(z) - log_ratio(z)) / abs(log_ratio(z)) for z in grid)
    h = herglotz_check(log_ratio, grid)
    s = cbf_to_stieltjes(catalog.log1p())
    right = [z for z in grid if z.real > 0] + [1.0, 1 + 5e-5j]
    err2 = max(abs(s(z) - log_ratio(z)) / abs(log_ratio(z)) for z in right)
    return [_le("stieltjes[log example quadrature]", err, 1e-7),
            _le("stieltjes[herglotz im z im f]", h.worst, 1e-10),
            _le("stieltjes[cbf_to_stieltjes(log1p)]", err2, 1e-7)]


def suite_lograte(seed: int = 0) -> list[Check]:
    gen = DiagonalGenerator(np.geomspace(1e-4, 1.0, 30))
    x = random_unit_vector(30, np.random.default_rng(seed))
    rep = general_rate_check(gen, "log", 1.0, x, np.geomspace(10, 1e4, 40))
    return [_le("lograte[constant c]", rep.constant, 10.0)]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "wiener": suite_wiener,
    "sandwich": suite_sandwich,
    "special": suite_special,
    "roundtrip": suite_roundtrip,
    "laplace": suite_laplace,
    "semigroup": suite_semigroup,
    "optimality": suite_optimality,
    "abel": suite_abel,
    "comparability": suite_comparability,
    "stieltjes": suite_stieltjes,
    "lograte": suite_lograte,
}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed=seed)


__all__ = ["Check", "SUITES", "run_suite", "tolerance", "half_plane_grid", "cut_plane_grid",
           "random_draws", "sweep_generators"]
