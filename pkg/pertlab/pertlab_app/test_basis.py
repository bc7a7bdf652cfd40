import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from scipy.special import dawsn

from .basis import (
    X_MAX, GhostState, UnperturbedProblem, check_abscissa, dawson_chi0, ghost_chi0, ghost_chi0_prime,
    ghost_profile, mixed_state, psi0, psi0_prime,
)
from .exceptions import DomainError, OverflowGuardError


class GroundStateTests(SimpleTestCase):
    def test_normalisation_at_origin(self):
        assert psi0(0.0) == 1.0
        assert psi0_prime(0.0) == 0.0

    def test_negative_abscissa_rejected(self):
        with self.assertRaises(DomainError):
            psi0(-0.5)

    def test_cutoff_guard(self):
        check_abscissa(X_MAX)
        with self.assertRaises(OverflowGuardError) as cm:
            check_abscissa(X_MAX + 1)
        assert "too large for scalar precision" in str(cm.exception)

    def test_closed_form_eigen_residual(self):
        problem = UnperturbedProblem()
        for x in np.linspace(0.0, 10.0, 101):
            assert abs(problem.eigen_residual(x)) <= 1e-12

    def test_finite_difference_eigen_residual(self):
        h = 1e-4
        for x in np.linspace(0.5, 5.0, 19):
            second = (psi0(x + h) - 2 * psi0(x) + psi0(x - h)) / (h * h)
            residual = -second + x * x * psi0(x) - psi0(x)
            assert abs(residual) <= 1e-6, (x, residual)


class GhostStateTests(SimpleTestCase):
    grid = np.linspace(0.0, 10.0, 41)

    def test_wronskian_is_one(self):
        for ghost in ghost_profile(self.grid):
            assert abs(ghost.wronskian - 1.0) <= 1e-10, (ghost.x, ghost.wronskian)

    def test_matches_dawson_integral(self):
        for ghost in ghost_profile(self.grid):
            expected = dawson_chi0(ghost.x)
            assert abs(ghost.chi - expected) <= 1e-10 * abs(expected) + 1e-15, ghost.x

    def test_slope_matches_closed_form(self):
        for x in (0.0, 1.0, 4.0, 8.0):
            expected = math.exp(0.5 * x * x) * (1.0 - x * dawsn(x))
            assert abs(ghost_chi0_prime(x) - expected) <= 1e-9 * abs(expected)

    def test_initial_conditions(self):
        assert ghost_chi0(0.0) == 0.0
        assert ghost_chi0_prime(0.0) == 1.0

    def test_profile_keeps_request_order(self):
        xs = [3.0, 1.0, 3.0, 0.5]
        profile = ghost_profile(xs)
        assert [ghost.x for ghost in profile] == xs
        assert profile[0] == profile[2]

    def test_profile_rejects_cutoff_beyond_guard(self):
        with self.assertRaises(OverflowGuardError):
            ghost_profile([1.0, 30.0])

    def test_scaled_variables(self):
        ghost = GhostState(x=2.0, scaled=float(dawsn(2.0)), scaled_slope=float(1 - 4 * dawsn(2.0)))
        assert abs(ghost.chi - math.exp(2.0) * dawsn(2.0)) <= 1e-14 * ghost.chi
        assert abs(ghost.wronskian - 1.0) <= 1e-15


class MixedStateTests(SimpleTestCase):
    def test_origin(self):
        mixed, rho = mixed_state(0.0, 0.1)
        assert mixed == complex(1.0, 0.0)
        assert rho == complex(1.0, 0.0)

    @settings(deadline=None, max_examples=20)
    @given(x=st.floats(min_value=0.1, max_value=10.0), sigma=st.floats(min_value=1e-12, max_value=1.0))
    def test_never_vanishes(self, x, sigma):
        ghost = GhostState(x=x, scaled=float(dawsn(x)), scaled_slope=float(1 - 2 * x * dawsn(x)))
        mixed, rho = mixed_state(x, sigma, ghost)
        assert mixed.real == psi0(x)
        assert mixed.imag > 0
        assert rho == mixed * mixed
