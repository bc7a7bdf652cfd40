"""
Parametric route to E_n.

The order-n equation is solved with the energy replaced by a free parameter
alpha and the integration constants fixed at the origin (psi_n(alpha, 0) = 0,
psi_n'(alpha, 0) = 0):

    psi_n(alpha, x) = -psi0(x) * [alpha * J(1, x) - J(V_n, x)]

E_n is the alpha for which the growing mode cancels at the cutoff X, i.e.
J(V_n, X) / J(1, X). Both integrals grow like exp(X^2) while their ratio
settles.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .basis import psi0
from .exact_series import ONE, PerturbationSeries
from .exceptions import DomainError, OverflowGuardError
from .integrators import integrate_ivp
from .quad_engine import QuadConfig, nested_integrals, nested_J, source_values

logger = logging.getLogger(__name__)

CLOSED_FORM = "closed-form"
SHOOTING = "shooting"
MIN_CUTOFF = 3.0


@dataclass(frozen=True)
class ParametricSolution:
    n: int
    alpha: float
    x: float
    value: float
    method: str


@dataclass(frozen=True)
class ScSweepRow:
    n: int
    x_cut: float
    numerator: float
    denominator: float
    ratio: float
    oracle: float
    abs_err: float
    scaled: float

    @classmethod
    def from_parts(cls, n: int, x_cut: float, numerator: float, denominator: float,
                   oracle: float) -> "ScSweepRow":
        ratio = numerator / denominator
        return cls(
            n=n, x_cut=x_cut, numerator=numerator, denominator=denominator, ratio=ratio,
            oracle=oracle, abs_err=abs(ratio - oracle),
            scaled=denominator * 2 * x_cut * math.exp(-x_cut * x_cut),
        )


def check_abscissa(x: float, cfg: QuadConfig) -> None:
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"abscissa must be finite and non-negative, got {x!r}")
    if x > cfg.x_max:
        raise OverflowGuardError(x, cfg.x_max)


def check_sweep_cutoff(x_cut: float, cfg: QuadConfig) -> None:
    check_abscissa(x_cut, cfg)
    if x_cut < MIN_CUTOFF:
        raise DomainError(f"cutoff must be at least {MIN_CUTOFF}, got {x_cut!r}")


def cutoff_integrals(n: int, x: float, series: PerturbationSeries, cfg: QuadConfig) -> Tuple[float, float]:
    """(J(V_n, x), J(1, x)), always from one pass over the sources [V_n, 1]"""
    if x == 0:
        return 0.0, 0.0
    effective, unit = nested_integrals([series.effective(n), ONE], x, 0.0, cfg)
    return effective.outer.real, unit.outer.real


def psi_n_closed_form(n: int, alpha: float, x: float, series: PerturbationSeries, cfg: QuadConfig) -> float:
    check_abscissa(x, cfg)
    effective, unit = cutoff_integrals(n, x, series, cfg)
    return float(-psi0(x) * (alpha * unit - effective))


def shoot_profile(n: int, alphas: Sequence[float], x: float, series: PerturbationSeries,
                  cfg: QuadConfig) -> List[float]:
    """
    Integrates -u'' + (x^2 - 1) u = (alpha - V_n) psi0 from u(0) = u'(0) = 0 for
    every alpha at once and returns u(x) per alpha.
    """
    check_abscissa(x, cfg)
    alphas = np.asarray(alphas, dtype=float)
    if x == 0:
        return [0.0] * len(alphas)
    values = source_values([series.effective(n)])

    def rhs(y, state):
        u, du = state[0::2], state[1::2]
        drive = (alphas - values(y)[0]) * math.exp(-0.5 * y * y)
        derivative = np.empty_like(state)
        derivative[0::2] = du
        derivative[1::2] = (y * y - 1.0) * u - drive
        return derivative

    solution = integrate_ivp(rhs, np.zeros(2 * len(alphas)), x, rtol=cfg.shoot_rtol, atol=cfg.atol,
                             max_steps=cfg.max_steps)
    return [float(value) for value in solution.y[0::2]]


def psi_n_shoot(n: int, alpha: float, x: float, series: PerturbationSeries, cfg: QuadConfig) -> float:
    return shoot_profile(n, [alpha], x, series, cfg)[0]


def parametric_solution(n: int, alpha: float, x: float, series: PerturbationSeries,
                        cfg: QuadConfig, method: str = CLOSED_FORM) -> ParametricSolution:
    if method == CLOSED_FORM:
        value = psi_n_closed_form(n, alpha, x, series, cfg)
    elif method == SHOOTING:
        value = psi_n_shoot(n, alpha, x, series, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ParametricSolution(n=n, alpha=alpha, x=x, value=value, method=method)


def universal_F(x: float, cfg: QuadConfig) -> float:
    """psi_n(1, x) - psi_n(0, x), the same function for every order"""
    check_abscissa(x, cfg)
    if x == 0:
        return 0.0
    return float(-psi0(x) * nested_J(ONE, x, 0.0, cfg).outer.real)


def sc_energy(n: int, x_cut: float, series: PerturbationSeries, cfg: QuadConfig) -> ScSweepRow:
    check_sweep_cutoff(x_cut, cfg)
    numerator, denominator = cutoff_integrals(n, x_cut, series, cfg)
    row = ScSweepRow.from_parts(n, x_cut, numerator, denominator, float(series.energy(n)))
    logger.debug("sc n=%d X=%r: ratio %r, error %.3e", n, x_cut, row.ratio, row.abs_err)
    return row


def parametric_energy(n: int, x_cut: float, series: PerturbationSeries, cfg: QuadConfig) -> float:
    """-psi_n(0, X) / F(X) built from parametric solutions rather than the bare integrals"""
    check_sweep_cutoff(x_cut, cfg)
    effective, unit = cutoff_integrals(n, x_cut, series, cfg)
    weight = psi0(x_cut)
    at_zero = weight * effective
    universal = -weight * unit
    return float(-at_zero / universal)


def shoot_energy(n: int, x_cut: float, series: PerturbationSeries, cfg: QuadConfig) -> ScSweepRow:
    """Same ratio as sc_energy, with both parametric solutions taken from the shooting route"""
    check_sweep_cutoff(x_cut, cfg)
    at_zero, at_one = shoot_profile(n, [0.0, 1.0], x_cut, series, cfg)
    # u(0, X) = psi0 J(V_n) and u(1, X) - u(0, X) = -psi0 J(1)
    weight = float(psi0(x_cut))
    numerator = at_zero / weight
    denominator = -(at_one - at_zero) / weight
    return ScSweepRow.from_parts(n, x_cut, numerator, denominator, float(series.energy(n)))


def divergence_diagnostics(n: int, grid: Iterable[float], series: PerturbationSeries,
                           cfg: QuadConfig) -> List[ScSweepRow]:
    grid = list(grid)
    for x_cut in grid:
        check_sweep_cutoff(x_cut, cfg)
    rows = [sc_energy(n, x_cut, series, cfg) for x_cut in grid]
    logger.info("sc sweep n=%d over %d cutoffs", n, len(rows))
    return rows
