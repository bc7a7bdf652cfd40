"""
Nested integrals against the oscillator weight.

    I(y) = int_0^y w S        J(X) = int_0^X I / w

are integrated as one initial value problem I' = w S, J' = I / w. The weight
is w = psi0^2 when sigma = 0 and the ghost-mixed rho = (psi0 + i sigma chi0)^2
otherwise; in the latter case the scaled ghost is integrated alongside so the
weight never has to be sampled from a separate solve.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, List, Sequence

import numpy as np
from django.conf import settings

from .basis import X_MAX, scaled_ghost_rhs
from .exact_series import RationalPoly, as_rational_poly
from .exceptions import ConfigurationError, DomainError, OverflowGuardError
from .integrators import integrate_ivp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadConfig:
    rtol: float = 1e-10
    atol: float = 1e-14
    max_steps: int = 200000
    x_max: float = X_MAX
    shoot_rtol: float = 1e-12

    def __post_init__(self):
        for name in ("rtol", "atol", "shoot_rtol"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name} must be a positive number, got {value!r}")
        if self.max_steps < 1:
            raise ConfigurationError(f"max_steps must be positive, got {self.max_steps!r}")
        if not 0 < self.x_max <= X_MAX:
            raise ConfigurationError(f"x_max must lie in (0, {X_MAX}], got {self.x_max!r}")

    @classmethod
    def from_settings(cls, **overrides) -> "QuadConfig":
        """Defaults from settings.PERTLAB; keyword arguments that are not None win"""
        config = settings.PERTLAB
        values = {
            "rtol": config["QUAD_RTOL"],
            "atol": config["QUAD_ATOL"],
            "max_steps": config["QUAD_MAX_STEPS"],
            "x_max": config["X_MAX"],
            "shoot_rtol": config["SHOOT_RTOL"],
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def with_tolerance(self, rtol: float) -> "QuadConfig":
        return replace(self, rtol=rtol)


@dataclass(frozen=True)
class NestedIntegralResult:
    x_cut: float
    sigma: float
    inner: complex
    outer: complex
    error: float
    steps: int
    tolerance_met: bool


def check_cutoff(x_cut: float, cfg: QuadConfig) -> None:
    if not math.isfinite(x_cut) or x_cut <= 0:
        raise DomainError(f"cutoff must be a positive finite number, got {x_cut!r}")
    if x_cut > cfg.x_max:
        raise OverflowGuardError(x_cut, cfg.x_max)


def check_sigma(sigma: float) -> None:
    if not math.isfinite(sigma):
        raise ConfigurationError(f"sigma must be finite, got {sigma!r}")


def source_values(sources: Sequence[RationalPoly]) -> Callable[[float], np.ndarray]:
    """Vectorised evaluation of several even polynomials at one abscissa"""
    polys = [as_rational_poly(source) for source in sources]
    width = max(len(poly.coefficients) for poly in polys) or 1
    table = np.zeros((width, len(polys)))
    for column, poly in enumerate(polys):
        coefficients = poly.float_coefficients()
        table[:len(coefficients), column] = coefficients

    def evaluate(y: float) -> np.ndarray:
        return np.polynomial.polynomial.polyval(y * y, table)

    return evaluate


def mixed_amplitude(y: float, sigma: float, scaled_ghost: float) -> complex:
    """psi0 + i sigma chi0 with chi0 = exp(y^2/2) * u"""
    return complex(math.exp(-0.5 * y * y), sigma * math.exp(0.5 * y * y) * scaled_ghost)


def nested_integrals(sources: Sequence[RationalPoly], x_cut: float, sigma: float,
                     cfg: QuadConfig) -> List[NestedIntegralResult]:
    """
    Co-integrates every source against the same weight in a single pass, so the
    numerator and denominator of a ratio share their step sequence.
    """
    check_cutoff(x_cut, cfg)
    check_sigma(sigma)
    count = len(sources)
    if not count:
        return []
    values = source_values(sources)

    if sigma == 0:
        def rhs(y, state):
            weight = math.exp(-y * y)
            return np.concatenate((weight * values(y), state[:count] / weight))

        solution = integrate_ivp(rhs, np.zeros(2 * count), x_cut, rtol=cfg.rtol, atol=cfg.atol,
                                 max_steps=cfg.max_steps)
        inner = solution.y[:count].astype(complex)
        outer = solution.y[count:].astype(complex)
        errors = solution.error[count:]
    else:
        def rhs(y, state):
            u, du = state[0], state[1]
            mixed = mixed_amplitude(y, sigma, u)
            rho = mixed * mixed
            inverse = 1 / mixed
            inverse_rho = inverse * inverse
            inner = state[2:2 + count] + 1j * state[2 + count:2 + 2 * count]
            d_inner = rho * values(y)
            d_outer = inverse_rho * inner
            return np.concatenate((
                scaled_ghost_rhs(y, state[:2]),
                d_inner.real, d_inner.imag, d_outer.real, d_outer.imag,
            ))

        start = np.zeros(2 + 4 * count)
        start[1] = 1.0
        solution = integrate_ivp(rhs, start, x_cut, rtol=cfg.rtol, atol=cfg.atol,
                                 max_steps=cfg.max_steps)
        state = solution.y
        inner = state[2:2 + count] + 1j * state[2 + count:2 + 2 * count]
        outer = state[2 + 2 * count:2 + 3 * count] + 1j * state[2 + 3 * count:]
        errors = np.hypot(solution.error[2 + 2 * count:2 + 3 * count], solution.error[2 + 3 * count:])

    results = []
    for index in range(count):
        error = float(errors[index])
        # each accepted step keeps its local error under rtol*|y| + atol, and |J| grows along the
        # pass, so the summed estimate is held to that bound once per step
        allowance = max(solution.steps, 1) * (cfg.rtol * abs(outer[index]) + cfg.atol)
        tolerance_met = bool(error <= allowance)
        if not tolerance_met:
            logger.warning(
                "accumulated error %.3e exceeds tolerance for source %d at X=%r, sigma=%r",
                error, index, x_cut, sigma,
            )
        results.append(NestedIntegralResult(
            x_cut=x_cut, sigma=sigma, inner=complex(inner[index]), outer=complex(outer[index]),
            error=error, steps=solution.steps, tolerance_met=tolerance_met,
        ))
    logger.debug("nested integrals of %d sources at X=%r, sigma=%r in %d steps",
                 count, x_cut, sigma, solution.steps)
    return results


def nested_J(source: RationalPoly, x_cut: float, sigma: float, cfg: QuadConfig) -> NestedIntegralResult:
    return nested_integrals([source], x_cut, sigma, cfg)[0]


def weighted_integral(source: RationalPoly, x_cut: float, sigma: float, cfg: QuadConfig) -> complex:
    """int_0^X Psi0 psi0 S, which reduces to int_0^X psi0^2 S at sigma = 0"""
    check_cutoff(x_cut, cfg)
    check_sigma(sigma)
    values = source_values([source])

    def rhs(y, state):
        u, du = state[0], state[1]
        weight = math.exp(-0.5 * y * y) * mixed_amplitude(y, sigma, u) * values(y)[0]
        return np.array([*scaled_ghost_rhs(y, state[:2]), weight.real, weight.imag])

    solution = integrate_ivp(rhs, [0.0, 1.0, 0.0, 0.0], x_cut, rtol=cfg.rtol, atol=cfg.atol,
                             max_steps=cfg.max_steps)
    return complex(solution.y[2], solution.y[3])
