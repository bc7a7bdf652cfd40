import math

import numpy as np
from django.test import SimpleTestCase, override_settings
from django.conf import settings as django_settings
from scipy.integrate import cumulative_trapezoid, trapezoid

from .exact_series import ONE, ZERO, RationalPoly
from .exceptions import ConfigurationError, DomainError, OverflowGuardError
from .quad_engine import QuadConfig, nested_integrals, nested_J, weighted_integral

HALF_SQRT_PI = math.sqrt(math.pi) / 2
QUADRATIC = RationalPoly.from_powers({2: 1})
QUARTIC = RationalPoly.from_powers({4: 1})


def brute_force_J(source: RationalPoly, x_cut: float, step: float = 1e-4) -> float:
    y = np.linspace(0.0, x_cut, int(round(x_cut / step)) + 1)
    values = np.array([source(value) for value in y])
    inner = cumulative_trapezoid(np.exp(-y * y) * values, y, initial=0.0)
    return float(trapezoid(np.exp(y * y) * inner, y))


class QuadConfigTests(SimpleTestCase):
    def test_defaults(self):
        cfg = QuadConfig()
        assert cfg.rtol == 1e-10 and cfg.atol == 1e-14 and cfg.x_max == 25.0

    def test_invalid_values(self):
        with self.assertRaises(ConfigurationError):
            QuadConfig(rtol=0.0)
        with self.assertRaises(ConfigurationError):
            QuadConfig(atol=-1.0)
        with self.assertRaises(ConfigurationError):
            QuadConfig(x_max=30.0)

    def test_from_settings(self):
        cfg = QuadConfig.from_settings()
        assert cfg.rtol == django_settings.PERTLAB["QUAD_RTOL"]
        assert QuadConfig.from_settings(rtol=1e-8, atol=None).rtol == 1e-8

    def test_from_overridden_settings(self):
        with override_settings(PERTLAB={**django_settings.PERTLAB, "QUAD_RTOL": 1e-9}):
            assert QuadConfig.from_settings().rtol == 1e-9


class NestedIntegralTests(SimpleTestCase):
    cfg = QuadConfig()

    def test_zero_source(self):
        result = nested_J(ZERO, 3.0, 0.0, self.cfg)
        assert result.inner == 0 and result.outer == 0

    def test_small_cutoff_expansion(self):
        x_cut = 0.1
        result = nested_J(ONE, x_cut, 0.0, self.cfg)
        assert abs(result.outer.real - (x_cut ** 2 / 2 + x_cut ** 4 / 6)) <= 1e-7

    def test_against_trapezoid(self):
        for source in (ONE, QUADRATIC, QUARTIC):
            for x_cut in (1.0, 2.0, 3.0):
                with self.subTest(source=str(source), x_cut=x_cut):
                    expected = brute_force_J(source, x_cut)
                    value = nested_J(source, x_cut, 0.0, self.cfg).outer.real
                    assert abs(value - expected) <= 1e-7 * abs(expected)

    def test_laplace_asymptotics(self):
        x_cut = 6.0
        value = nested_J(ONE, x_cut, 0.0, self.cfg).outer.real
        scaled = value * 2 * x_cut * math.exp(-x_cut * x_cut)
        assert abs(scaled - HALF_SQRT_PI) <= 0.02 * HALF_SQRT_PI

    def test_real_weight_gives_real_results(self):
        result = nested_J(QUARTIC, 5.0, 0.0, self.cfg)
        assert result.inner.imag == 0.0 and result.outer.imag == 0.0
        assert isinstance(result.tolerance_met, bool)

    def test_default_tolerance_is_met_quietly(self):
        for sigma in (0.0, 1e-9):
            with self.subTest(sigma=sigma):
                with self.assertNoLogs("pertlab_app.quad_engine", level="WARNING"):
                    result = nested_J(QUARTIC, 5.0, sigma, self.cfg)
                assert result.tolerance_met is True
                assert result.error <= result.steps * (self.cfg.rtol * abs(result.outer) + self.cfg.atol)

    def test_growth(self):
        values = [nested_J(ONE, x_cut, 0.0, self.cfg).outer.real for x_cut in (4.0, 4.5, 5.0)]
        assert values[0] < values[1] < values[2]
        assert values[2] / values[0] > math.exp(25.0 - 16.0) / 10

    def test_tolerance_refinement(self):
        coarse = nested_J(QUARTIC, 5.0, 0.0, QuadConfig(rtol=1e-8)).outer.real
        fine = nested_J(QUARTIC, 5.0, 0.0, QuadConfig(rtol=5e-9)).outer.real
        assert abs(coarse - fine) <= 10 * 1e-8 * abs(fine)

    def test_shared_pass_matches_single_sources(self):
        together = nested_integrals([QUARTIC, ONE], 5.0, 0.0, self.cfg)
        for source, result in zip((QUARTIC, ONE), together):
            alone = nested_J(source, 5.0, 0.0, self.cfg)
            assert abs(result.outer - alone.outer) <= 1e-8 * abs(alone.outer)
        assert together[0].steps == together[1].steps

    def test_conjugation_symmetry(self):
        plus = nested_J(QUARTIC, 5.0, 0.1, self.cfg).outer
        minus = nested_J(QUARTIC, 5.0, -0.1, self.cfg).outer
        assert abs(minus - plus.conjugate()) <= 1e-12 * abs(plus)

    def test_empty_source_list(self):
        assert nested_integrals([], 3.0, 0.0, self.cfg) == []

    def test_cutoff_guards(self):
        with self.assertRaises(OverflowGuardError):
            nested_J(ONE, 26.0, 0.0, self.cfg)
        with self.assertRaises(DomainError):
            nested_J(ONE, 0.0, 0.0, self.cfg)
        with self.assertRaises(DomainError):
            nested_J(ONE, -1.0, 0.1, self.cfg)
        with self.assertRaises(ConfigurationError):
            nested_J(ONE, 3.0, math.nan, self.cfg)


class WeightedIntegralTests(SimpleTestCase):
    cfg = QuadConfig()

    def test_gaussian_integral(self):
        value = weighted_integral(ONE, 8.0, 0.0, self.cfg)
        assert abs(value.real - HALF_SQRT_PI) <= 1e-9
        assert value.imag == 0.0

    def test_quartic_moment(self):
        value = weighted_integral(QUARTIC, 8.0, 0.0, self.cfg)
        assert abs(value.real - 0.75 * HALF_SQRT_PI) <= 1e-9

    def test_continuity_in_sigma(self):
        at_zero = weighted_integral(QUARTIC, 3.0, 0.0, self.cfg)
        small = weighted_integral(QUARTIC, 3.0, 1e-9, self.cfg)
        assert abs(small - at_zero) <= 1e-7
