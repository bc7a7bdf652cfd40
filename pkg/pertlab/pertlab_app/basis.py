"""
Unperturbed half-line oscillator H0 = -d^2/dx^2 + x^2 and its ghost state.

The ground state psi0 = exp(-x^2/2) has E0 = 1. The ghost chi0 solves the same
equation with chi0(0) = 0, chi0'(0) = 1, which pins the Wronskian
psi0*chi0' - psi0'*chi0 to 1. Any other normalisation of chi0 is a rescaling of
the mixing parameter sigma, which is sent to zero anyway.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np
from django.conf import settings
from scipy.special import dawsn

from .exceptions import DomainError, OverflowGuardError
from .integrators import integrate_through

logger = logging.getLogger(__name__)

# Floating type of every numerical route; swap here for a wider build.
Scalar = np.float64

# exp(X^2) overflows double precision just above X = 26.6
X_MAX = 25.0
GROUND_ENERGY = 1


def check_abscissa(x: float, x_max: float = X_MAX) -> None:
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"abscissa must be finite and non-negative, got {x!r}")
    if x > x_max:
        raise OverflowGuardError(x, x_max)


def psi0(x: float) -> Scalar:
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"abscissa must be finite and non-negative, got {x!r}")
    return Scalar(math.exp(-0.5 * x * x))


def psi0_prime(x: float) -> Scalar:
    return -x * psi0(x)


def psi0_second(x: float) -> Scalar:
    return (x * x - 1.0) * psi0(x)


@dataclass(frozen=True)
class UnperturbedProblem:
    """H0 = -d^2/dx^2 + x^2 on [0, inf) with zero slope at the origin"""
    energy: int = GROUND_ENERGY
    x_max: float = X_MAX

    @staticmethod
    def potential(x: float) -> float:
        return x * x

    @staticmethod
    def ground_state(x: float) -> Scalar:
        return psi0(x)

    def eigen_residual(self, x: float) -> Scalar:
        """-psi0'' + V0*psi0 - E0*psi0 from the closed-form second derivative"""
        return -psi0_second(x) + self.potential(x) * psi0(x) - self.energy * psi0(x)


@dataclass(frozen=True)
class GhostState:
    """
    Ghost state sampled at x. The integrated quantity is the scaled ghost
    u = psi0*chi0 (Dawson's integral), which obeys u'' = -2x u' - 2u and stays
    of order one while chi0 itself grows like exp(x^2/2)/(2x).
    """
    x: float
    scaled: float
    scaled_slope: float

    @property
    def chi(self) -> Scalar:
        return Scalar(math.exp(0.5 * self.x * self.x) * self.scaled)

    @property
    def chi_prime(self) -> Scalar:
        return Scalar(math.exp(0.5 * self.x * self.x) * (self.x * self.scaled + self.scaled_slope))

    @property
    def wronskian(self) -> Scalar:
        """psi0*chi0' - psi0'*chi0, written in the scaled variables"""
        return Scalar(self.scaled_slope + 2.0 * self.x * self.scaled)


def scaled_ghost_rhs(x: float, state: np.ndarray) -> np.ndarray:
    u, du = state
    return np.array([du, -2.0 * x * du - 2.0 * u])


def ghost_profile(xs: Iterable[float], rtol: Optional[float] = None,
                  x_max: float = X_MAX) -> List[GhostState]:
    """Samples the ghost at every x in one forward pass of the initial value problem"""
    xs = list(xs)
    for x in xs:
        check_abscissa(x, x_max)
    config = settings.PERTLAB
    stops = sorted(set(xs))
    solutions = integrate_through(
        scaled_ghost_rhs, [0.0, 1.0], stops,
        rtol=rtol or config["BASIS_RTOL"], atol=config["QUAD_ATOL"],
        max_steps=config["QUAD_MAX_STEPS"],
    )
    by_x = {
        solution.x: GhostState(x=solution.x, scaled=float(solution.y[0]), scaled_slope=float(solution.y[1]))
        for solution in solutions
    }
    return [by_x[x] for x in xs]


def ghost_chi0(x: float, rtol: Optional[float] = None) -> Scalar:
    return ghost_profile([x], rtol)[0].chi


def ghost_chi0_prime(x: float, rtol: Optional[float] = None) -> Scalar:
    return ghost_profile([x], rtol)[0].chi_prime


def dawson_chi0(x: float) -> Scalar:
    """chi0 = exp(x^2/2) * D(x) from the library Dawson integral; used as an oracle"""
    check_abscissa(x)
    return Scalar(math.exp(0.5 * x * x) * dawsn(x))


def mixed_state(x: float, sigma: float, ghost: Optional[GhostState] = None) -> Tuple[complex, complex]:
    """
    Psi0 = psi0 + i*sigma*chi0 and rho = Psi0^2, the plain complex square and
    not the squared modulus. Psi0 never vanishes for sigma != 0 because the
    real and imaginary parts have unit Wronskian.
    """
    if ghost is None:
        ghost = ghost_profile([x])[0]
    mixed = complex(psi0(x), sigma * ghost.chi)
    return mixed, mixed * mixed
