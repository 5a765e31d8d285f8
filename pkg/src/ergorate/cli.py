"""Command-line front end.

Subcommands
-----------
eval      values of a catalog function at points
rate      r(t) and t r(t) on a t-grid
laplace   Laplace transform of t r(t) against (g(z) - a/2)/z^2
verify    run a verification suite
simulate  run a semigroup experiment described by a YAML file

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import math
import sys
from typing import Any, Callable, Iterable, Sequence

import numpy as np
import yaml

from ergorate import catalog
from ergorate.bernstein import (
    BernsteinFunction,
    MeasureUnavailable,
    ZeroFunctionError,
    check_raw_shape,
    evaluate,
    rate,
    rate_bracket,
)
from ergorate.laplace import laplace_function
from ergorate.measure import MeasureError
from ergorate.semigroup import (
    DiagonalGenerator,
    decay_profile,
    optimality_probe,
    random_unit_vector,
)
from ergorate.stieltjes import BranchCutError, log_ratio
from ergorate.verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    """Malformed command-line value or experiment file."""


# --------------------------------------------------------------------------
# parsing helpers
# --------------------------------------------------------------------------


def parse_points(text: str) -> list[complex]:
    """Comma-separated reals or Python complex literals, e.g. ``1,2+1j``."""
    try:
        return [complex(p.replace(" ", "")) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"--points: cannot parse {text!r}") from None


def parse_grid(spec: Any, where: str = "--t-grid") -> np.ndarray:
    """``"1,10,100"``, ``"geom:lo:hi:n"``, a list, or ``{geom: [lo, hi, n]}``."""
    try:
        if isinstance(spec, str) and spec.startswith("geom:"):
            lo, hi, n = spec[5:].split(":")
            grid = np.geomspace(float(lo), float(hi), int(n))
        elif isinstance(spec, str):
            grid = np.array([float(p) for p in spec.split(",") if p.strip()])
        elif isinstance(spec, dict) and set(spec) == {"geom"}:
            lo, hi, n = spec["geom"]
            grid = np.geomspace(float(lo), float(hi), int(n))
        elif isinstance(spec, (list, tuple)):
            grid = np.array([float(p) for p in spec])
        else:
            raise ValueError
    except (ValueError, TypeError):
        raise ConfigError(f"{where}: expected a list, 'a,b,c' or 'geom:lo:hi:n', got {spec!r}") from None
    if grid.size == 0 or np.any(~(grid > 0)) or np.any(~np.isfinite(grid)):
        raise ConfigError(f"{where}: grid must be a nonempty list of positive numbers")
    return grid


def resolve_function(spec: Any) -> Callable[[complex], complex] | BernsteinFunction:
    """A catalog Bernstein function, or the Stieltjes example ``log_ratio``."""
    if spec == "log_ratio":
        return log_ratio
    try:
        return catalog.from_spec(spec)
    except (catalog.CatalogError, MeasureError) as exc:
        raise ConfigError(f"function: {exc}") from None


def resolve_bernstein(spec: Any) -> BernsteinFunction:
    fn = resolve_function(spec)
    if not isinstance(fn, BernsteinFunction):
        raise ConfigError(f"function: {spec!r} is not a Bernstein function")
    return fn


def load_config(path: str) -> dict[str, Any]:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ConfigError(f"{path}:{mark.line + 1}:{mark.column + 1}: {exc.problem}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def fmt(x: float) -> str:
    return "%.17g" % x


class Table:
    """CSV writer with ``#`` comment rows."""

    def __init__(self, stream, header: Sequence[str]):
        self.stream = stream
        self.writer = csv.writer(stream, lineterminator="\n")
        self.writer.writerow(header)

    def row(self, values: Iterable[Any]) -> None:
        self.writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in values])

    def comment(self, text: str) -> None:
        self.stream.write(f"# {text}\n")


@contextlib.contextmanager
def output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_eval(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    fn = resolve_function(args.fn or cfg.get("bernstein") or cfg.get("function"))
    pts = parse_points(args.points) if args.points else [complex(p) for p in cfg.get("points", [])]
    if not pts:
        raise ConfigError("eval: no points given")
    with output(args.out) as fh:
        tab = Table(fh, ["z_re", "z_im", "value_re", "value_im"])
        for z in pts:
            v = evaluate(fn, z) if isinstance(fn, BernsteinFunction) else fn(z)
            tab.row([z.real, z.imag, v.real, v.imag])
    return EXIT_OK


def cmd_rate(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    g = resolve_bernstein(args.fn or cfg.get("bernstein") or cfg.get("function"))
    grid = parse_grid(args.t_grid or cfg.get("t_grid") or "geom:0.1:1000:9")
    vals = np.array([rate(g, t) for t in grid])
    with output(args.out) as fh:
        tab = Table(fh, ["t", "rate", "t_rate"])
        for t, r in zip(grid, vals):
            tab.row([t, r, t * r])
        if grid.size >= 2:
            shape = check_raw_shape(grid, grid * vals)
            tab.comment(f"t_rate positive, nondecreasing and concave: {'pass' if shape.ok else 'FAIL'}")
        if not g.has_measure and g.special:
            tab.comment("rate from the mixture integral; bracket |g(1/t)|/c1 <= r(t) <= |g(1/t)|/c0:")
            for t, r in zip(grid, vals):
                lo, hi = rate_bracket(g, t)
                tab.comment(f"t={fmt(t)} lower={fmt(lo)} upper={fmt(hi)} inside={lo <= r <= hi}")
    return EXIT_OK


def cmd_laplace(args) -> int:
    g = resolve_bernstein(args.fn)
    pts = parse_points(args.points or "0.5,1,2,1+1j")
    with output(args.out) as fh:
        tab = Table(fh, ["z_re", "z_im", "transform_re", "transform_im", "identity_re", "identity_im",
                         "residual"])
        growth = rate(g, 1.0)
        for z in pts:
            if not z.real > 0:
                raise ConfigError(f"laplace: need re z > 0, got {z}")
            lhs = laplace_function(lambda t: t * rate(g, t), z, growth, [1.0])
            rhs = (evaluate(g, z) - g.a / 2) / z**2
            tab.row([z.real, z.imag, lhs.real, lhs.imag, rhs.real, rhs.imag, abs(lhs - rhs) / abs(rhs)])
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    checks = run_suite(args.suite, seed=args.seed)
    with output(args.out) as fh:
        tab = Table(fh, ["name", "measured", "bound", "pass"])
        for c in checks:
            tab.row([c.name, float(c.measured), float(c.bound), "pass" if c.passed else "FAIL"])
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# -- simulate -------------------------------------------------------------------

_EXPERIMENTS = ("rate_bound", "optimality")
_TOP_KEYS = {"experiment", "generator", "function", "bernstein", "t_grid", "epsilon", "seed", "x", "n_max"}


def _field(cfg: dict, key: str, kind, where: str, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"{where}.{key}: missing")
        return default
    try:
        return kind(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {cfg[key]!r}") from None


def build_generator(spec: Any, rng: np.random.Generator) -> DiagonalGenerator:
    if not isinstance(spec, dict):
        raise ConfigError("generator: expected a mapping")
    kind = spec.get("kind", "explicit")
    try:
        if kind == "explicit":
            ev = spec.get("eigenvalues")
            if not isinstance(ev, list) or not ev:
                raise ConfigError("generator.eigenvalues: need a nonempty list")
            try:
                lam = [complex(str(v).replace(" ", "")) for v in ev]
            except ValueError:
                raise ConfigError("generator.eigenvalues: entries must be numbers") from None
            return DiagonalGenerator(lam)
        if kind == "log_spaced":
            n = _field(spec, "n", int, "generator")
            if n < 1:
                raise ConfigError("generator.n: must be >= 1")
            lo = _field(spec, "lo", float, "generator")
            hi = _field(spec, "hi", float, "generator")
            phases = bool(spec.get("phases", False))
            return DiagonalGenerator.log_spaced(n, lo, hi, rng if phases else None)
        if kind == "accumulating":
            n = _field(spec, "n", int, "generator")
            if n < 1:
                raise ConfigError("generator.n: must be >= 1")
            return DiagonalGenerator.accumulating(n, _field(spec, "rho", float, "generator", 1.0),
                                                  _field(spec, "base", float, "generator", 4.0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"generator: {exc}") from None
    raise ConfigError(f"generator.kind: unknown {kind!r} (explicit, log_spaced, accumulating)")


def build_epsilon(spec: Any) -> Callable[[float], float]:
    if spec in (None, "log"):
        return lambda t: 1 / math.log(2 + t)
    if isinstance(spec, str) and spec.startswith("power:"):
        try:
            p = float(spec[6:])
        except ValueError:
            raise ConfigError(f"epsilon: bad exponent in {spec!r}") from None
        if not p > 0:
            raise ConfigError("epsilon: exponent must be > 0")
        return lambda t: (1 + t) ** (-p)
    raise ConfigError(f"epsilon: expected 'log' or 'power:p', got {spec!r}")


def cmd_simulate(args) -> int:
    if not args.config:
        raise ConfigError("simulate: --config is required")
    cfg = load_config(args.config)
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)}")
    exp = cfg.get("experiment", "rate_bound")
    if exp not in _EXPERIMENTS:
        raise ConfigError(f"experiment: unknown {exp!r} ({', '.join(_EXPERIMENTS)})")
    seed = args.seed if args.seed is not None else _field(cfg, "seed", int, "config", 0)
    rng = np.random.default_rng(seed)
    gen = build_generator(cfg.get("generator"), rng)
    fspec = cfg.get("function", cfg.get("bernstein"))
    if fspec is None:
        raise ConfigError("function: missing")
    g = resolve_bernstein(fspec)

    with output(args.out) as fh:
        tab = Table(fh, ["t", "norm", "rate", "ratio", "bound"])
        if exp == "rate_bound":
            grid = parse_grid(cfg.get("t_grid", "geom:0.1:10000:20"), "t_grid")
            xs = cfg.get("x", "random")
            if xs == "random":
                x = random_unit_vector(gen.dim, rng)
            elif xs == "ones":
                x = np.ones(gen.dim) / math.sqrt(gen.dim)
            else:
                raise ConfigError("x: expected 'random' or 'ones'")
            method = "quad" if g.has_measure else "spectral"
            rows = decay_profile(gen, g, x, grid, method)
            for row in rows:
                tab.row([row.t, row.norm, row.rate, row.ratio, row.bound])
            worst = max(row.ratio for row in rows)
            ok = worst <= 1 + 1e-9
            tab.comment(f"ratio = norm/bound, bound = 2 M r(t) ||x||, M = {fmt(gen.M)}")
            tab.comment(f"max ratio {fmt(worst)}: {'pass' if ok else 'FAIL'}")
            return EXIT_OK if ok else EXIT_FAIL
        eps = build_epsilon(cfg.get("epsilon"))
        n_max = _field(cfg, "n_max", int, "config", gen.dim)
        try:
            rep = optimality_probe(gen, g, eps, n_max)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for row in rep.rows:
            tab.row([row.t, row.norm, rate(g, row.t), row.ratio, row.lower_bound])
        tab.comment(f"ratio = norm/(eps(t) r(t)); bound = delta/(3e^2) r(t), delta = {fmt(rep.delta)}")
        tab.comment(f"growth {fmt(rep.growth)}: {'diverges' if rep.diverges else 'no divergence'} "
                    f"(threshold 100)")
        tab.comment(f"lower bound: {'pass' if rep.lower_bound_holds else 'FAIL'}")
        return EXIT_OK if rep.lower_bound_holds else EXIT_FAIL


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergorate", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fn=True, points=False, grid=False):
        if fn:
            p.add_argument("--fn", help="catalog function, e.g. frac_power:0.5, atom:1, log_rate")
        if points:
            p.add_argument("--points", help="comma-separated points, e.g. 1,4,2+1j")
        if grid:
            p.add_argument("--t-grid", help="comma list or geom:lo:hi:n")
        p.add_argument("--config", help="YAML file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", help="output CSV (default stdout)")

    common(sub.add_parser("eval", help="evaluate a function"), points=True)
    common(sub.add_parser("rate", help="rate function table"), grid=True)
    common(sub.add_parser("laplace", help="Laplace identity table"), points=True)
    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", help=", ".join(SUITES))
    common(p, fn=False)
    common(sub.add_parser("simulate", help="run an experiment file"), fn=False)
    return parser


COMMANDS = {"eval": cmd_eval, "rate": cmd_rate, "laplace": cmd_laplace, "verify": cmd_verify,
            "simulate": cmd_simulate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "verify" and args.seed is None:
        args.seed = 0
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, BranchCutError, ZeroFunctionError, MeasureUnavailable) as exc:
        print(f"ergorate {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"ergorate {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
