"""Named Bernstein functions.

Each entry is addressable by a short spec string such as ``"frac_power:0.5"``
or ``"atom:1"``, or by a mapping ``{"family": "frac_power", "alpha": 0.5}``.

=============  ==========================  =====================
family         g(z)                        Levy measure
=============  ==========================  =====================
drift          b z                         none
constant       a                           none
frac_power     z^alpha                     power_law
atom           w (1 - e^{-sz})             atom at s
log1p          log(1 + z)                  log_kernel
z_over_1pz     z/(1 + z)                   exp_decay(1, 1)
log_rate       (z - 1)/log z               not available
triple         a + b z + int (...) mu      user supplied
=============  ==========================  =====================
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Any, Mapping

from ergorate._quad import integrate_real
from ergorate.bernstein import BernsteinFunction
from ergorate.measure import ExpDecay, LogKernel, MeasureError, PowerLaw, RadonMeasure
from ergorate.stieltjes import _log1p_ratio


class CatalogError(KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "catalog error"


def drift(b: float = 1.0) -> BernsteinFunction:
    return BernsteinFunction(0.0, b, name="drift" if b == 1 else f"drift:{b:g}",
                             special=True, complete=True)


def constant(a: float = 1.0) -> BernsteinFunction:
    return BernsteinFunction(a, 0.0, name=f"constant:{a:g}", special=True, complete=True)


def frac_power(alpha: float) -> BernsteinFunction:
    """``z^alpha`` with Levy density ``alpha/Gamma(1-alpha) s^{-1-alpha}``."""
    if not 0 < alpha < 1:
        raise MeasureError("frac_power needs 0 < alpha < 1")
    mu = RadonMeasure.of(PowerLaw(alpha / math.gamma(1 - alpha), alpha))
    return BernsteinFunction(0.0, 0.0, mu, name=f"frac_power:{alpha:g}", special=True, complete=True)


def atom(s: float = 1.0, w: float = 1.0) -> BernsteinFunction:
    """``w (1 - e^{-sz})``; neither special nor complete."""
    name = f"atom:{s:g}" if w == 1 else f"atom:{s:g}:{w:g}"
    return BernsteinFunction(0.0, 0.0, RadonMeasure.atom(s, w), name=name)


def log1p() -> BernsteinFunction:
    return BernsteinFunction(0.0, 0.0, RadonMeasure.of(LogKernel(1.0)), name="log1p",
                             special=True, complete=True)


def z_over_1pz() -> BernsteinFunction:
    return BernsteinFunction(0.0, 0.0, RadonMeasure.of(ExpDecay(1.0, 1.0)), name="z_over_1pz",
                             special=True, complete=True)


# -- (z - 1)/log z ---------------------------------------------------------
#
# No closed form of the Levy measure is used.  As a complete Bernstein
# function it has the representation g(z) = int z/(z + tau) rho(dtau) with
# rho(dtau) = (1 + tau)/(tau (pi^2 + log^2 tau)) dtau, read off from the
# boundary values of g on the negative axis.  Integrating min(s/t, 1)
# against the Levy density int tau e^{-s tau} rho(dtau) gives
# r(t) = int Ce_t(tau) rho(dtau); with tau = e^u this is a smooth integral
# over the real line.


def log_rate_value(z: complex) -> complex:
    z = complex(z)
    if z == 0:
        return 0j
    if z.imag == 0 and z.real < 0:
        raise ValueError("(z-1)/log z needs z off (-inf, 0)")
    return 1 / _log1p_ratio(z - 1)


def _log_rate_integrand(u: float, t: float) -> float:
    weight = 1 / (math.pi**2 + u * u)
    if u <= 0:
        e = math.exp(u)
        x = t * e
        ce = -math.expm1(-x) / x if x > 1e-300 else 1.0
        return (1 + e) * weight * ce
    # (1 + e^u) Ce_t(e^u) = (1 + e^{-u}) (1 - exp(-t e^u))/t
    x = t * math.exp(u) if u < 700 else math.inf
    return (1 + math.exp(-u)) * weight * -math.expm1(-x) / t


@lru_cache(maxsize=4096)
def log_rate_rate(t: float) -> float:
    if not t > 0:
        raise ValueError("rate needs t > 0")
    t = float(t)
    pts = sorted({0.0, -math.log(t)})
    return integrate_real(lambda u: _log_rate_integrand(u, t), -math.inf, math.inf, pts)


def log_rate() -> BernsteinFunction:
    return BernsteinFunction(0.0, 0.0, None, name="log_rate", special=True, complete=True,
                             closed_form=log_rate_value, rate_fn=log_rate_rate)


# -- lookup ------------------------------------------------------------------

_FACTORIES = {
    "drift": (drift, ("b",)),
    "z": (drift, ("b",)),
    "constant": (constant, ("a",)),
    "frac_power": (frac_power, ("alpha",)),
    "atom": (atom, ("s", "w")),
    "log1p": (log1p, ()),
    "z_over_1pz": (z_over_1pz, ()),
    "log_rate": (log_rate, ()),
}

FAMILIES = tuple(k for k in _FACTORIES if k != "z") + ("triple",)


def from_spec(spec: str | Mapping[str, Any]) -> BernsteinFunction:
    """Build a catalog function from ``"family[:p1[:p2]]"`` or a mapping."""
    if isinstance(spec, str):
        family, *raw = spec.strip().split(":")
        if family not in _FACTORIES:
            raise CatalogError(f"unknown function {family!r}; known: {', '.join(FAMILIES)}")
        factory, names = _FACTORIES[family]
        if len(raw) > len(names):
            raise CatalogError(f"{family} takes at most {len(names)} parameter(s)")
        try:
            args = [float(x) for x in raw]
        except ValueError:
            raise CatalogError(f"non-numeric parameter in {spec!r}") from None
        return factory(*args)
    if not isinstance(spec, Mapping) or "family" not in spec:
        raise CatalogError("function spec needs a 'family' key")
    family = spec["family"]
    params = {k: v for k, v in spec.items() if k != "family"}
    if family == "triple":
        unknown = set(params) - {"a", "b", "measure", "name"}
        if unknown:
            raise CatalogError(f"triple: unknown keys {sorted(unknown)}")
        return BernsteinFunction(float(params.get("a", 0.0)), float(params.get("b", 0.0)),
                                 RadonMeasure.from_dict(params.get("measure")),
                                 name=str(params.get("name", "triple")))
    if family not in _FACTORIES:
        raise CatalogError(f"unknown function {family!r}; known: {', '.join(FAMILIES)}")
    factory, names = _FACTORIES[family]
    unknown = set(params) - set(names)
    if unknown:
        raise CatalogError(f"{family}: unknown parameter(s) {sorted(unknown)}")
    try:
        return factory(**{k: float(v) for k, v in params.items()})
    except (TypeError, ValueError) as exc:
        raise CatalogError(f"{family}: {exc}") from None


def default_catalog() -> tuple[BernsteinFunction, ...]:
    """One representative of each family."""
    return (drift(), constant(1.0), frac_power(0.5), atom(1.0), log1p(), z_over_1pz(), log_rate())


def measure_catalog() -> tuple[BernsteinFunction, ...]:
    """Catalog members with an explicit Levy triple."""
    return tuple(g for g in default_catalog() if g.has_measure)


def special_catalog() -> tuple[BernsteinFunction, ...]:
    return tuple(g for g in default_catalog() if g.special)


def complete_catalog() -> tuple[BernsteinFunction, ...]:
    return tuple(g for g in default_catalog() if g.complete)


__all__ = [
    "CatalogError", "drift", "constant", "frac_power", "atom", "log1p", "z_over_1pz",
    "log_rate", "log_rate_value", "log_rate_rate", "from_spec", "default_catalog",
    "measure_catalog", "special_catalog", "complete_catalog", "FAMILIES",
]
