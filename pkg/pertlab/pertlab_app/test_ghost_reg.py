import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from .exact_series import ONE, RationalPoly, build_series
from .exceptions import ConfigurationError, DegenerateGridError
from .ghost_reg import (
    LINEAR, QUADRATIC, RESIDUE, ExtrapolationResult, SigmaSweepRow, dominant_term_split, ghost_energy,
    ibp_identity_check, pointwise_identity_residual, sigma_extrapolate, sigma_sweep,
)
from .model_factories import SigmaSweepRowFactory
from .quad_engine import QuadConfig, weighted_integral
from .sc_method import sc_energy

HALF_SQRT_PI = math.sqrt(math.pi) / 2
DEFAULT_SIGMAS = [1e-8, 1e-9, 1e-10, 1e-11, 1e-12]
COARSE_SIGMAS = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]


class GhostTestCase(SimpleTestCase):
    cfg = QuadConfig()

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.quartic = build_series(RationalPoly.from_powers({4: 1}), 3)
        cls.harmonic = build_series(RationalPoly.from_powers({2: 1}), 3)


class GhostEnergyTests(GhostTestCase):
    def test_first_order_quartic(self):
        row = ghost_energy(1, 1e-9, 6.0, self.quartic, self.cfg)
        assert abs(row.ratio.real - 0.75) <= 1e-5
        assert row.im_abs <= 1e-5
        assert row.ratio == row.numerator / row.denominator

    def test_first_order_harmonic(self):
        row = ghost_energy(1, 1e-9, 6.0, self.harmonic, self.cfg)
        assert abs(row.ratio.real - 0.5) <= 1e-5

    def test_sigma_must_be_positive(self):
        with self.assertRaises(ConfigurationError):
            ghost_energy(1, 0.0, 6.0, self.quartic, self.cfg)
        with self.assertRaises(ConfigurationError):
            ghost_energy(1, -1e-3, 6.0, self.quartic, self.cfg)

    def test_approaches_parametric_ratio(self):
        reference = sc_energy(1, 4.0, self.quartic, self.cfg).ratio
        gaps = [abs(ghost_energy(1, sigma, 4.0, self.quartic, self.cfg).ratio - reference)
                for sigma in (1e-8, 1e-9, 1e-10)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_imaginary_part_vanishes(self):
        parts = [ghost_energy(1, sigma, 6.0, self.quartic, self.cfg).im_abs for sigma in (1e-8, 1e-9, 1e-10)]
        assert parts[0] > parts[1] > parts[2]

    def test_sweep_sorted_descending(self):
        rows = sigma_sweep(1, [1e-10, 1e-8, 1e-9, 1e-8], 6.0, self.quartic, self.cfg)
        assert [row.sigma for row in rows] == [1e-8, 1e-9, 1e-10]


class ExtrapolationTests(GhostTestCase):
    def test_default_grid_matches_oracle(self):
        for series in (self.quartic, self.harmonic):
            for n in (1, 2, 3):
                rows = sigma_sweep(n, DEFAULT_SIGMAS, 6.0, series, self.cfg)
                assert rows[-1].im_abs <= 1e-5
                for model in (QUADRATIC, RESIDUE):
                    with self.subTest(perturbation=series.label, n=n, model=model):
                        result = sigma_extrapolate(rows, model)
                        assert abs(result.limit - float(series.energy(n))) <= 1e-6
                        assert result.model == model

    def test_residue_model_on_coarse_grid(self):
        rows = sigma_sweep(1, [1e-1, 1e-2, 1e-3], 6.0, self.quartic, self.cfg)
        result = sigma_extrapolate(rows, RESIDUE)
        assert abs(result.limit - 0.75) <= 1e-6
        assert result.model == RESIDUE
        assert result.n == 1 and result.x_cut == 6.0

    def test_coarse_grid_second_order_harmonic(self):
        rows = sigma_sweep(2, [1e-1, 1e-2, 1e-3], 6.0, self.harmonic, self.cfg)
        result = sigma_extrapolate(rows)
        assert result.model == RESIDUE
        assert abs(result.limit + 0.125) <= 1e-6
        assert result.within_sweep_range

    def test_limit_within_sweep_range(self):
        rows = sigma_sweep(1, COARSE_SIGMAS, 6.0, self.quartic, self.cfg)
        for model in (QUADRATIC, RESIDUE):
            with self.subTest(model=model):
                result = sigma_extrapolate(rows, model)
                largest, smallest = rows[0].ratio.real, rows[-1].ratio.real
                assert abs(result.limit - smallest) <= abs(largest - smallest)
                assert result.within_sweep_range

    def test_limit_outside_sweep_range_is_flagged(self):
        rows = tuple(SigmaSweepRowFactory(sigma=sigma, intercept=0.5, slope=1.0) for sigma in (0.3, 0.2, 0.1))
        assert not ExtrapolationResult(limit=2.0, model=LINEAR, residual=0.0, inputs=rows).within_sweep_range
        assert ExtrapolationResult(limit=0.5, model=LINEAR, residual=0.0, inputs=rows).within_sweep_range

    def test_constant_rows(self):
        rows = [SigmaSweepRowFactory(sigma=sigma, intercept=0.5) for sigma in (1e-1, 1e-2, 1e-3, 1e-4)]
        result = sigma_extrapolate(rows, QUADRATIC)
        assert abs(result.limit - 0.5) <= 1e-12
        assert result.residual <= 1e-12
        assert result.within_sweep_range

    @settings(deadline=None)
    @given(intercept=st.floats(min_value=-10, max_value=10), slope=st.floats(min_value=-10, max_value=10))
    def test_linear_recovery(self, intercept, slope):
        rows = [SigmaSweepRowFactory(sigma=sigma, intercept=intercept, slope=slope) for sigma in (0.3, 0.2, 0.1)]
        result = sigma_extrapolate(rows, LINEAR)
        assert abs(result.limit - intercept) <= 1e-9 * (1 + abs(intercept) + abs(slope))

    def test_quadratic_recovery(self):
        rows = [SigmaSweepRowFactory(sigma=sigma, intercept=-0.125, slope=0.3, curvature=2.0)
                for sigma in (0.5, 0.4, 0.3, 0.2, 0.1)]
        result = sigma_extrapolate(rows, QUADRATIC)
        assert abs(result.limit + 0.125) <= 1e-9
        assert result.model == QUADRATIC

    def test_quadratic_falls_back_on_three_points(self):
        rows = [SigmaSweepRowFactory(sigma=sigma) for sigma in (0.3, 0.2, 0.1)]
        assert sigma_extrapolate(rows, QUADRATIC).model == LINEAR

    def test_degenerate_grids(self):
        with self.assertRaises(DegenerateGridError):
            sigma_extrapolate([SigmaSweepRowFactory(sigma=sigma) for sigma in (0.2, 0.1)])
        with self.assertRaises(DegenerateGridError):
            sigma_extrapolate([SigmaSweepRowFactory(sigma=sigma) for sigma in (0.1, 0.2, 0.3)])
        with self.assertRaises(DegenerateGridError):
            sigma_extrapolate([SigmaSweepRowFactory(sigma=0.3), SigmaSweepRowFactory(sigma=0.2),
                               SigmaSweepRowFactory(sigma=0.1, n=2)])

    def test_unknown_model(self):
        rows = [SigmaSweepRowFactory(sigma=sigma) for sigma in (0.3, 0.2, 0.1)]
        with self.assertRaises(ConfigurationError):
            sigma_extrapolate(rows, "cubic")

    def test_row_requires_positive_sigma(self):
        with self.assertRaises(ConfigurationError):
            SigmaSweepRow.from_parts(1, 0.0, 6.0, 1 + 0j, 1 + 0j, 1.0)


class IdentityTests(GhostTestCase):
    def test_integration_by_parts(self):
        sources = {
            "1": ONE,
            "x^2": RationalPoly.from_powers({2: 1}),
            "V1": self.quartic.effective(1),
            "V2": self.quartic.effective(2),
        }
        for name, source in sources.items():
            for sigma in (1e-1, 1e-2):
                for x_cut in (4.0, 5.0, 6.0):
                    with self.subTest(source=name, sigma=sigma, x_cut=x_cut):
                        assert ibp_identity_check(source, sigma, x_cut, self.cfg) <= 1e-8

    def test_pointwise_identity(self):
        for sigma in (1e-1, 1e-4, 1e-8):
            for x in np.linspace(0.0, 10.0, 101):
                assert pointwise_identity_residual(float(x), sigma) <= 1e-8, (x, sigma)

    def test_singular_part_carries_matrix_element(self):
        sigma = 1e-6
        singular, _ = dominant_term_split(ONE, sigma, 6.0, self.cfg)
        assert abs((-sigma * singular / 1j).real - HALF_SQRT_PI) <= 1e-8

    def test_singular_ratio_gives_first_order_energy(self):
        effective, _ = dominant_term_split(self.quartic.effective(1), 1e-4, 6.0, self.cfg)
        unit, _ = dominant_term_split(ONE, 1e-4, 6.0, self.cfg)
        assert abs((effective / unit).real - 0.75) <= 1e-5

    def test_remainder_is_stable_in_sigma(self):
        _, coarse = dominant_term_split(ONE, 1e-2, 6.0, self.cfg)
        _, fine = dominant_term_split(ONE, 1e-3, 6.0, self.cfg)
        assert abs(coarse - fine) <= 0.1 * abs(fine)

    def test_split_adds_up(self):
        singular, remainder = dominant_term_split(ONE, 1e-2, 5.0, self.cfg)
        weighted = weighted_integral(ONE, 5.0, 1e-2, self.cfg)
        assert abs(singular + 1j / 1e-2 * weighted) <= 1e-12 * abs(singular)
        assert abs(remainder) <= abs(singular + remainder)
