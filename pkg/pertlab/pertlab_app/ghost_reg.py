"""
Ghost-mixed regularisation of the parametric ratio.

The weight psi0^2 is replaced by rho = (psi0 + i sigma chi0)^2 and the energy
is read off as the sigma -> 0 limit of J_sigma[V_n] / J_sigma[1], taken at a
fixed cutoff X. For sigma well above exp(-X^2) the functional is dominated by
its 1/sigma part,

    J_sigma[S; X] = (i/sigma) [(psi0/Psi0)(X) I_rho(X) - int_0^X psi0 Psi0 S],

so the ratio approaches the ordinary matrix element quotient with an
imaginary part linear in sigma.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import dawsn

from .basis import mixed_state, psi0, psi0_prime
from .exact_series import ONE, PerturbationSeries, RationalPoly
from .exceptions import ConfigurationError, DegenerateGridError
from .quad_engine import QuadConfig, check_cutoff, nested_integrals, nested_J, weighted_integral

logger = logging.getLogger(__name__)

LINEAR = "linear"
QUADRATIC = "quadratic"
RESIDUE = "residue"
FIT_MODELS = (LINEAR, QUADRATIC, RESIDUE)
SWEEP_NOISE_FLOOR = 1e-9


@dataclass(frozen=True)
class SigmaSweepRow:
    n: int
    sigma: float
    x_cut: float
    numerator: complex
    denominator: complex
    ratio: complex
    oracle: float
    abs_err: float
    im_abs: float

    @classmethod
    def from_parts(cls, n: int, sigma: float, x_cut: float, numerator: complex,
                   denominator: complex, oracle: float) -> "SigmaSweepRow":
        if not sigma > 0:
            raise ConfigurationError(f"sigma must be positive, got {sigma!r}")
        ratio = numerator / denominator
        return cls(
            n=n, sigma=sigma, x_cut=x_cut, numerator=numerator, denominator=denominator,
            ratio=ratio, oracle=oracle, abs_err=abs(ratio.real - oracle), im_abs=abs(ratio.imag),
        )


@dataclass(frozen=True)
class ExtrapolationResult:
    limit: float
    model: str
    residual: float
    inputs: Tuple[SigmaSweepRow, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.inputs[0].n

    @property
    def x_cut(self) -> float:
        return self.inputs[0].x_cut

    @property
    def oracle(self) -> float:
        return self.inputs[0].oracle

    @property
    def within_sweep_range(self) -> bool:
        """The limit sits no farther from the smallest-sigma ratio than the sweep spans"""
        largest, smallest = self.inputs[0].ratio.real, self.inputs[-1].ratio.real
        # flat sweeps are judged against the quadrature noise floor
        slack = SWEEP_NOISE_FLOOR * max(1.0, abs(self.limit))
        return abs(self.limit - smallest) <= abs(largest - smallest) + slack


def check_sigma(sigma: float) -> None:
    if not math.isfinite(sigma) or sigma <= 0:
        raise ConfigurationError(f"sigma must be a positive finite number, got {sigma!r}")


def ghost_energy(n: int, sigma: float, x_cut: float, series: PerturbationSeries,
                 cfg: QuadConfig) -> SigmaSweepRow:
    check_sigma(sigma)
    effective, unit = nested_integrals([series.effective(n), ONE], x_cut, sigma, cfg)
    row = SigmaSweepRow.from_parts(n, sigma, x_cut, effective.outer, unit.outer, float(series.energy(n)))
    logger.debug("ghost n=%d sigma=%r X=%r: ratio %r", n, sigma, x_cut, row.ratio)
    return row


def sigma_sweep(n: int, sigmas: Iterable[float], x_cut: float, series: PerturbationSeries,
                cfg: QuadConfig) -> List[SigmaSweepRow]:
    """Rows ordered by sigma descending, duplicates dropped"""
    sigmas = sorted(set(sigmas), reverse=True)
    for sigma in sigmas:
        check_sigma(sigma)
    return [ghost_energy(n, sigma, x_cut, series, cfg) for sigma in sigmas]


def check_grid(rows: Sequence[SigmaSweepRow]) -> None:
    if len({row.sigma for row in rows}) < 3:
        raise DegenerateGridError(f"extrapolation needs at least 3 distinct sigma values, got {len(rows)} rows")
    if len({(row.n, row.x_cut) for row in rows}) > 1:
        raise DegenerateGridError("extrapolation rows must share the order and the cutoff")
    sigmas = [row.sigma for row in rows]
    if any(later >= earlier for earlier, later in zip(sigmas, sigmas[1:])):
        raise DegenerateGridError("sigma grid must be strictly decreasing")


def rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


def affine_intercept(sigmas: np.ndarray, values: np.ndarray) -> Tuple[complex, float]:
    """Least-squares line through complex samples; returns the value at sigma = 0 and the rms misfit"""
    real = Polynomial.fit(sigmas, values.real, 1)
    imag = Polynomial.fit(sigmas, values.imag, 1)
    fitted = real(sigmas) + 1j * imag(sigmas)
    return complex(real(0.0), imag(0.0)), rms(fitted - values)


def sigma_extrapolate(rows: Sequence[SigmaSweepRow], model: str = RESIDUE) -> ExtrapolationResult:
    """
    Extrapolates the sweep to sigma = 0.

    linear / quadratic fit Re(ratio) as a polynomial in sigma; a quadratic fit
    on exactly three points falls back to linear so the fit keeps a residual.
    residue fits sigma * J_sigma as a line in sigma for the numerator and the
    denominator separately and divides the intercepts.
    """
    if model not in FIT_MODELS:
        raise ConfigurationError(f"unknown fit model {model!r}; expected one of {', '.join(FIT_MODELS)}")
    rows = tuple(rows)
    check_grid(rows)
    sigmas = np.array([row.sigma for row in rows])

    if model == RESIDUE:
        numerator, numerator_misfit = affine_intercept(sigmas, sigmas * np.array([row.numerator for row in rows]))
        denominator, denominator_misfit = affine_intercept(sigmas, sigmas * np.array([row.denominator for row in rows]))
        limit = (numerator / denominator).real
        residual = max(numerator_misfit / abs(numerator), denominator_misfit / abs(denominator))
    else:
        if model == QUADRATIC and len(rows) == 3:
            model = LINEAR
        degree = 2 if model == QUADRATIC else 1
        ratios = np.array([row.ratio.real for row in rows])
        fit = Polynomial.fit(sigmas, ratios, degree)
        limit = float(fit(0.0))
        residual = rms(fit(sigmas) - ratios)

    logger.info("extrapolated n=%d over %d sigma values with %s model: %r (residual %.3e)",
                rows[0].n, len(rows), model, limit, residual)
    result = ExtrapolationResult(limit=float(limit), model=model, residual=float(residual), inputs=rows)
    if not result.within_sweep_range:
        logger.warning("extrapolated n=%d at X=%r lies outside the span of its sigma sweep: %r",
                       result.n, result.x_cut, result.limit)
    return result


def ibp_identity_check(source: RationalPoly, sigma: float, x_cut: float, cfg: QuadConfig) -> float:
    """Relative mismatch between J_sigma[S; X] and its integrated-by-parts form"""
    check_sigma(sigma)
    check_cutoff(x_cut, cfg)
    nested = nested_J(source, x_cut, sigma, cfg)
    mixed, _ = mixed_state(x_cut, sigma)
    boundary = complex(psi0(x_cut)) / mixed * nested.inner
    by_parts = 1j / sigma * (boundary - weighted_integral(source, x_cut, sigma, cfg))
    return abs(nested.outer - by_parts) / max(abs(nested.outer), abs(by_parts))


def dominant_term_split(source: RationalPoly, sigma: float, x_cut: float,
                        cfg: QuadConfig) -> Tuple[complex, complex]:
    """(-(i/sigma) int_0^X psi0 Psi0 S, J_sigma[S; X] minus that)"""
    check_sigma(sigma)
    total = nested_J(source, x_cut, sigma, cfg).outer
    singular = -1j / sigma * weighted_integral(source, x_cut, sigma, cfg)
    return singular, total - singular


def pointwise_identity_residual(x: float, sigma: float) -> float:
    """
    |1/Psi0^2 - (i/sigma) (psi0/Psi0)'| relative to |1/Psi0^2|, with chi0 and
    chi0' taken from the Dawson integral: chi0 = e^{x^2/2} D, chi0' = e^{x^2/2} (1 - x D).
    """
    check_sigma(sigma)
    growth = math.exp(0.5 * x * x)
    dawson = float(dawsn(x))
    chi = growth * dawson
    chi_prime = growth * (1.0 - x * dawson)
    base, base_prime = float(psi0(x)), float(psi0_prime(x))
    mixed = complex(base, sigma * chi)
    mixed_prime = complex(base_prime, sigma * chi_prime)

    inverse_square = 1 / (mixed * mixed)
    quotient_prime = (base_prime * mixed - base * mixed_prime) / (mixed * mixed)
    return abs(inverse_square - 1j / sigma * quotient_prime) / abs(inverse_square)
