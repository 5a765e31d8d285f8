import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergorate import catalog
from ergorate.bernstein import BernsteinFunction, cesaro_symbol, evaluate, rate
from ergorate.measure import MeasureError, RadonMeasure, Uniform
from ergorate.semigroup import (
    DiagonalGenerator,
    abel_transform,
    bernstein_symbols,
    cesaro_mean,
    decay_profile,
    delta_constant,
    general_rate_check,
    log_kernel_mass,
    log_resolvent_apply,
    log_resolvent_quad,
    optimality_probe,
    phillips_apply,
    potential_catalog,
    random_unit_vector,
    rate_bound_check,
    semigroup_apply,
    spectral_inclusion_check,
)

E = math.e
LOG_KERNEL_MASS_4I = 0.98410079590611895  # mpmath, 30 digits
DELTA = 1 - math.exp(-1)


def rng(seed=0):
    return np.random.default_rng(seed)


def eps_log(t):
    return 1 / math.log(2 + t)


class TestGenerator:
    def test_rejects_left_half_plane(self):
        with pytest.raises(ValueError):
            DiagonalGenerator([1.0, -0.1])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DiagonalGenerator([])

    def test_plain_bound(self):
        assert DiagonalGenerator([1.0, 2j]).M == 1.0

    def test_similar_bound(self):
        gen = DiagonalGenerator.similar([0.5, 1.0, 2.0 + 1j], rng())
        assert gen.M > 1
        for s in (0.0, 0.3, 5.0, 100.0):
            T = gen.matrix(np.exp(-s * gen.eigenvalues))
            assert np.linalg.norm(T, 2) <= gen.M * (1 + 1e-12)

    def test_accumulating(self):
        gen = DiagonalGenerator.accumulating(5)
        assert np.allclose(gen.eigenvalues, 4.0 ** -np.arange(1, 6))

    def test_immutable(self):
        gen = DiagonalGenerator([1.0])
        with pytest.raises(ValueError):
            gen.eigenvalues[0] = 2.0


class TestSemigroup:
    def test_identity_at_zero(self):
        gen = DiagonalGenerator.log_spaced(5, 1e-2, 1, rng())
        x = random_unit_vector(5, rng(1))
        assert np.array_equal(semigroup_apply(gen, 0.0, x), x)

    def test_exponential(self):
        assert semigroup_apply(DiagonalGenerator([1.0]), 1.0, [1.0])[0] == pytest.approx(math.exp(-1))

    def test_unitary(self):
        y = semigroup_apply(DiagonalGenerator([1j]), math.pi, [1.0])
        assert y[0] == pytest.approx(-1.0, abs=1e-15)

    @given(st.floats(0, 50), st.floats(0, 50))
    @settings(max_examples=50)
    def test_semigroup_law(self, s, u):
        gen = DiagonalGenerator.similar([0.1, 1 + 1j, 2j], rng())
        x = np.array([1.0, -1j, 0.5])
        lhs = semigroup_apply(gen, s + u, x)
        rhs = semigroup_apply(gen, s, semigroup_apply(gen, u, x))
        assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-12)

    def test_negative_time(self):
        with pytest.raises(ValueError):
            semigroup_apply(DiagonalGenerator([1.0]), -1.0, [1.0])


class TestCesaroMean:
    def test_fixed_point(self):
        gen = DiagonalGenerator([0.0, 1.0])
        assert cesaro_mean(gen, 7.0, [1.0, 0.0])[0] == 1.0

    def test_closed_form(self):
        assert cesaro_mean(DiagonalGenerator([1.0]), 1.0, [1.0])[0] == pytest.approx(1 - math.exp(-1))

    @pytest.mark.parametrize("t", [1e2, 1e4, 1e6])
    def test_range_decay(self, t):
        v = abs(cesaro_mean(DiagonalGenerator([1.0]), t, [1.0])[0])
        assert v * t == pytest.approx(1.0, rel=1e-6)

    def test_matches_time_average(self):
        gen = DiagonalGenerator([0.3 + 2j, 1.5])
        x = np.array([1.0, 1.0])
        s = np.linspace(0, 2.0, 20001)
        path = np.array([semigroup_apply(gen, si, x) for si in s])
        avg = np.trapezoid(path, s, axis=0) / 2.0
        assert np.allclose(cesaro_mean(gen, 2.0, x), avg, rtol=1e-7)


class TestPhillips:
    def test_drift(self):
        gen = DiagonalGenerator([0.5, 2 + 1j])
        x = np.array([1.0, 2.0])
        assert np.allclose(phillips_apply(gen, catalog.drift(), x), gen.eigenvalues * x)

    def test_killing(self):
        gen = DiagonalGenerator([0.5, 2 + 1j])
        x = np.array([1.0, 2.0])
        assert np.allclose(phillips_apply(gen, catalog.constant(1.0), x), x)

    def test_sqrt(self):
        y = phillips_apply(DiagonalGenerator([4.0]), catalog.frac_power(0.5), [1.0])
        assert y[0] == pytest.approx(2.0, rel=1e-8)

    @pytest.mark.parametrize("g", catalog.measure_catalog(), ids=lambda g: g.name)
    def test_quad_matches_spectral(self, g):
        gen = DiagonalGenerator.log_spaced(12, 1e-3, 1.0, rng(3))
        q = bernstein_symbols(gen, g, "quad")
        s = bernstein_symbols(gen, g, "spectral")
        assert np.allclose(q, s, rtol=1e-7, atol=0)

    def test_similar_generator(self):
        gen = DiagonalGenerator.similar([0.5, 1.0, 3.0], rng(2))
        x = np.array([1.0, 0.0, -1.0])
        A = gen.matrix(gen.eigenvalues)
        assert np.allclose(phillips_apply(gen, catalog.drift(), x), A @ x)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            bernstein_symbols(DiagonalGenerator([1.0]), catalog.drift(), "cheb")


class TestRateBound:
    def test_drift(self):
        gen = DiagonalGenerator.log_spaced(10, 1e-3, 1.0, rng())
        rep = rate_bound_check(gen, catalog.drift(), random_unit_vector(10, rng(1)), [1, 10, 100])
        assert rep.passed and rep.max_ratio <= 1

    def test_sqrt_sweep(self):
        gen = DiagonalGenerator.log_spaced(50, 1e-3, 1.0, rng())
        rep = rate_bound_check(gen, catalog.frac_power(0.5), random_unit_vector(50, rng(1)),
                               np.geomspace(0.1, 1e4, 20))
        assert rep.passed and rep.max_ratio < 1

    def test_isometric_orbit(self):
        rep = rate_bound_check(DiagonalGenerator([1j]), catalog.atom(1.0), [1.0], [1, 10, 100])
        assert rep.passed

    @pytest.mark.parametrize("g", catalog.default_catalog(), ids=lambda g: g.name)
    def test_non_normal(self, g):
        gen = DiagonalGenerator.similar(np.geomspace(1e-3, 1, 8) * np.exp(0.7j), rng(5))
        method = "quad" if g.has_measure else "spectral"
        rep = rate_bound_check(gen, g, random_unit_vector(8, rng(6)), np.geomspace(0.1, 1e4, 12), method)
        assert rep.passed

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            rate_bound_check(DiagonalGenerator([1.0]), catalog.drift(), [0.0], [1.0])


class TestDecayProfile:
    def test_invertible_generator(self):
        rows = decay_profile(DiagonalGenerator([1.0]), catalog.frac_power(0.5), [1.0], np.geomspace(1, 1e4, 9))
        # ratio = |Ce_t(1)| / (2 r(t)), which decays like t^{-1/2}
        ratios = [r.ratio for r in rows]
        assert all(b < a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] == pytest.approx(math.gamma(1.5) / 2 * 1e-2, rel=1e-3)

    def test_drift_ratio_constant(self):
        # ||Ce_t A x|| = |1 - e^{-t}|/t and r(t) = 1/t
        rows = decay_profile(DiagonalGenerator([1.0]), catalog.drift(), [1.0], [10.0, 100.0, 1000.0])
        assert [r.ratio for r in rows] == pytest.approx([0.5, 0.5, 0.5], rel=1e-4)

    def test_decreases_past_saturation(self):
        gen = DiagonalGenerator.log_spaced(20, 1e-6, 1.0)
        rows = decay_profile(gen, catalog.frac_power(0.5), np.ones(20) / math.sqrt(20),
                             np.geomspace(1e6, 1e10, 9))
        ratios = [r.ratio for r in rows]
        assert all(b < a for a, b in zip(ratios, ratios[1:]))

    def test_bounded(self):
        gen = DiagonalGenerator.log_spaced(20, 1e-6, 1.0)
        rows = decay_profile(gen, catalog.frac_power(0.5), np.ones(20) / math.sqrt(20), np.geomspace(1, 1e4, 9))
        assert max(r.ratio for r in rows) <= 1

    def test_imaginary_spectrum_rejected(self):
        with pytest.raises(ValueError):
            decay_profile(DiagonalGenerator([1j]), catalog.drift(), [1.0], [1.0])


class TestSpectralInclusion:
    def test_cesaro_at_zero(self):
        assert spectral_inclusion_check(DiagonalGenerator([0.0]), lambda z: cesaro_symbol(1.0, z))

    def test_product(self):
        g = catalog.atom(1.0)
        h = lambda z: cesaro_symbol(1.0, z) * evaluate(g, z)  # noqa: E731
        assert spectral_inclusion_check(DiagonalGenerator([1j, 2.0]), h)

    def test_resolvent(self):
        v = spectral_inclusion_check(DiagonalGenerator([1.0]), lambda z: 1 / (1 + z))
        assert v and v.max_distance == 0

    def test_non_normal(self):
        gen = DiagonalGenerator.similar([0.5, 1 + 1j, 3.0], rng(4))
        assert spectral_inclusion_check(gen, lambda z: cesaro_symbol(2.0, z) * np.sqrt(z))


class TestOptimality:
    def test_delta(self):
        assert delta_constant(10_000) == pytest.approx(DELTA, rel=1e-12)
        assert abs(-np.expm1(-1j)) == pytest.approx(2 * math.sin(0.5))

    def test_lower_bound_holds(self):
        rep = optimality_probe(DiagonalGenerator.accumulating(10), catalog.frac_power(0.5), eps_log)
        assert rep.lower_bound_holds
        assert [r.n for r in rep.rows] == list(range(1, 11))

    def test_ratio_increasing(self):
        rep = optimality_probe(DiagonalGenerator.accumulating(10), catalog.frac_power(0.5), eps_log)
        ratios = [r.ratio for r in rep.rows]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_ratio_tracks_inverse_epsilon(self):
        # the normalized norm is pinned, so ratio_n grows like log(2 + t_n)
        rep = optimality_probe(DiagonalGenerator.accumulating(10), catalog.frac_power(0.5), eps_log)
        pinned = [r.norm / rate(catalog.frac_power(0.5), r.t) for r in rep.rows]
        assert max(pinned) / min(pinned) < 1.1
        assert rep.growth == pytest.approx(math.log(2 + 4**10) / math.log(6), rel=0.1)

    def test_no_accumulation(self):
        rep = optimality_probe(DiagonalGenerator([0.25]), catalog.frac_power(0.5), eps_log)
        assert not rep.diverges and rep.growth == 1.0

    def test_bounded_spectrum(self):
        gen = DiagonalGenerator(1 + 4.0 ** -np.arange(1, 11))
        rep = optimality_probe(gen, catalog.frac_power(0.5), eps_log)
        assert not rep.diverges

    def test_needs_special(self):
        with pytest.raises(ValueError):
            optimality_probe(DiagonalGenerator([0.5]), catalog.atom(1.0), eps_log)


class TestAbel:
    def test_inverse(self):
        res = abel_transform(DiagonalGenerator([2.0]), potential_catalog()["inverse"].mu, [1.0], catalog.drift())
        assert res.y[0] == pytest.approx(0.5, rel=1e-8) and res.residual <= 1e-6

    def test_inverse_sqrt(self):
        pair = potential_catalog()["inverse_sqrt"]
        res = abel_transform(DiagonalGenerator([4.0]), pair.mu, [1.0], pair.g)
        assert res.y[0] == pytest.approx(0.5, rel=1e-8) and res.residual <= 1e-6

    def test_log_ratio(self):
        pair = potential_catalog()["log_ratio"]
        res = abel_transform(DiagonalGenerator([2.0]), pair.mu, [1.0], pair.g)
        assert res.y[0] == pytest.approx(math.log(2), rel=1e-7) and res.residual <= 1e-7

    @pytest.mark.parametrize("name", sorted(potential_catalog()))
    def test_spread_spectrum(self, name):
        pair = potential_catalog()[name]
        gen = DiagonalGenerator.log_spaced(8, 1e-2, 10.0, rng())
        assert abel_transform(gen, pair.mu, np.ones(8), pair.g).residual <= 1e-6

    def test_boundary_rejected(self):
        with pytest.raises(MeasureError):
            abel_transform(DiagonalGenerator([1j]), RadonMeasure.of(Uniform(1.0, 0.0, math.inf)), [1.0])

    def test_bad_alphas(self):
        with pytest.raises(ValueError):
            abel_transform(DiagonalGenerator([1.0]), potential_catalog()["inverse"].mu, [1.0],
                           alphas=[0.1, 0.2])


class TestGeneralRate:
    def test_log(self):
        gen = DiagonalGenerator(np.geomspace(1e-4, 1.0, 30))
        rep = general_rate_check(gen, "log", 1.0, random_unit_vector(30, rng()), np.geomspace(10, 1e4, 40))
        assert rep.passed and rep.constant <= 10

    def test_dim_one(self):
        rep = general_rate_check(DiagonalGenerator([1.0]), "log", 1, [1.0], np.geomspace(10, 1e6, 10))
        expected = [abs(cesaro_symbol(t, 1.0)) * math.log(t) for t in np.geomspace(10, 1e6, 10)]
        assert rep.ratios == pytest.approx(expected, rel=1e-12)

    def test_unsupported(self):
        with pytest.raises(ValueError, match="unsupported"):
            general_rate_check(DiagonalGenerator([1.0]), "inverse_sqrt", 0, [1.0], [10.0])

    def test_zero_eigenvalue(self):
        with pytest.raises(ValueError):
            general_rate_check(DiagonalGenerator([0.0, 1.0]), "log", 1, [1.0, 1.0], [10.0])


class TestLogResolvent:
    def test_unit_eigenvalue(self):
        y = log_resolvent_apply(DiagonalGenerator([1.0]), 2j * math.pi, [1.0])
        assert y[0] == pytest.approx(-1j / (2 * math.pi))

    def test_e(self):
        y = log_resolvent_apply(DiagonalGenerator([E]), 4j, [1.0])
        assert y[0] == pytest.approx((-1 - 4j) / 17)

    @pytest.mark.parametrize("lam,z", [(4j, E), (2j * math.pi, 1.0), (1 - 5j, 0.3), (2 + 4j, 20.0)])
    def test_quadrature_representation(self, lam, z):
        assert log_resolvent_quad(lam, z) == pytest.approx(1 / (lam - math.log(z)), rel=1e-9)

    def test_kernel_mass(self):
        assert log_kernel_mass(4j) == pytest.approx(LOG_KERNEL_MASS_4I, rel=1e-10)

    def test_strip_rejected(self):
        with pytest.raises(ValueError):
            log_resolvent_apply(DiagonalGenerator([1.0]), 3j, [1.0])


def test_zero_function_symbols():
    gen = DiagonalGenerator([1.0])
    assert np.all(bernstein_symbols(gen, BernsteinFunction(), "quad") == 0)
