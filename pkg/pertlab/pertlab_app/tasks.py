import logging
from functools import lru_cache
from typing import Optional

from celery import shared_task

from .exact_series import PerturbationSeries, build_series
from .ghost_reg import ghost_energy
from .quad_engine import QuadConfig
from .sc_method import sc_energy, shoot_energy
from .serializers import ReportRow, ReportRowSerializer, parse_perturbation

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def load_series(perturbation: str, max_order: int) -> PerturbationSeries:
    """Exact series for a perturbation text, memoised per worker process"""
    return build_series(parse_perturbation(perturbation), max_order)


def evaluate(method: str, n: int, sigma: Optional[float], x_cut: Optional[float],
             series: PerturbationSeries, cfg: QuadConfig) -> ReportRow:
    if method == "oracle":
        energy = float(series.energy(n))
        return ReportRow(method=method, n=n, ratio_re=energy, ratio_im=0.0, oracle=energy, abs_err=0.0)

    if method in ("sc", "shoot"):
        row = (sc_energy if method == "sc" else shoot_energy)(n, x_cut, series, cfg)
        return ReportRow(
            method=method, n=n, x_cut=x_cut,
            numerator_re=row.numerator, numerator_im=0.0,
            denominator_re=row.denominator, denominator_im=0.0,
            ratio_re=row.ratio, ratio_im=0.0, oracle=row.oracle, abs_err=row.abs_err,
        )

    if method == "ghost":
        row = ghost_energy(n, sigma, x_cut, series, cfg)
        return ReportRow(
            method=method, n=n, sigma=sigma, x_cut=x_cut,
            numerator_re=row.numerator.real, numerator_im=row.numerator.imag,
            denominator_re=row.denominator.real, denominator_im=row.denominator.imag,
            ratio_re=row.ratio.real, ratio_im=row.ratio.imag, oracle=row.oracle, abs_err=row.abs_err,
        )

    raise ValueError(f"unknown method {method!r}")


@shared_task
def evaluate_point(perturbation: str, max_order: int, method: str, n: int,
                   sigma: Optional[float] = None, x_cut: Optional[float] = None,
                   quad: Optional[dict] = None) -> dict:
    """Evaluates one sweep point and returns its report row as a plain dict"""
    cfg = QuadConfig(**quad) if quad else QuadConfig.from_settings()
    series = load_series(perturbation, max_order)
    row = evaluate(method, n, sigma, x_cut, series, cfg)
    logger.debug("evaluated %s n=%d sigma=%r X=%r", method, n, sigma, x_cut)
    return dict(ReportRowSerializer(row).data)
