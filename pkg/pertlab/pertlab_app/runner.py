"""
Sweep orchestration: plans the (method, n, sigma, X) points of a run, fans
them out as Celery tasks, merges the rows back in plan order and writes the
report.
"""
import csv
import io
import logging
import os
import tempfile
from dataclasses import asdict, dataclass
from typing import IO, Dict, List, Optional

from celery import group
from rest_framework.renderers import JSONRenderer

from .exceptions import ConfigurationError
from .ghost_reg import ExtrapolationResult, SigmaSweepRow, sigma_extrapolate
from .quad_engine import QuadConfig
from .serializers import REPORT_COLUMNS, RunConfig
from .tasks import evaluate_point, load_series

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepPoint:
    method: str
    n: int
    sigma: Optional[float] = None
    x_cut: Optional[float] = None


def plan_points(config: RunConfig) -> List[SweepPoint]:
    """Points in report order: method, then n, then sigma descending, then X ascending"""
    points = []
    for method in config.methods:
        for n in range(1, config.order + 1):
            if method == "oracle":
                points.append(SweepPoint(method, n))
            elif method == "ghost":
                points.extend(
                    SweepPoint(method, n, sigma, x_cut)
                    for sigma in sorted(config.sigma_grid, reverse=True)
                    for x_cut in sorted(config.xcut_grid)
                )
            else:
                points.extend(SweepPoint(method, n, None, x_cut) for x_cut in sorted(config.xcut_grid))
    return points


def evaluate_points(points: List[SweepPoint], config: RunConfig, cfg: QuadConfig) -> List[Dict]:
    job = group(
        evaluate_point.s(config.perturbation_text, config.order, point.method, point.n,
                         point.sigma, point.x_cut, asdict(cfg))
        for point in points
    )
    result = job.apply_async()
    return [member.get() for member in result.results]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_report(rows: List[Dict], fmt: str) -> str:
    if fmt == "json":
        return JSONRenderer().render(rows).decode("utf-8") + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow([format_cell(row[column]) for column in REPORT_COLUMNS])
    return buffer.getvalue()


def sweep_rows(rows: List[Dict], n: int, x_cut: float) -> List[SigmaSweepRow]:
    return [
        SigmaSweepRow.from_parts(
            n, row["sigma"], x_cut,
            complex(row["numerator_re"], row["numerator_im"]),
            complex(row["denominator_re"], row["denominator_im"]),
            row["oracle"],
        )
        for row in rows
        if row["method"] == "ghost" and row["n"] == n and row["x_cut"] == x_cut
    ]


def extrapolate(rows: List[Dict], config: RunConfig) -> List[ExtrapolationResult]:
    return [
        sigma_extrapolate(sweep_rows(rows, n, x_cut), config.fit_model)
        for n in range(1, config.order + 1)
        for x_cut in sorted(config.xcut_grid)
    ]


def summary_lines(rows: List[Dict], config: RunConfig) -> List[str]:
    lines = []
    if "oracle" in config.methods:
        lines.extend(load_series(config.perturbation_text, config.order).as_text().splitlines())
    if config.extrapolate and "ghost" in config.methods:
        several_cutoffs = len(config.xcut_grid) > 1
        for result in extrapolate(rows, config):
            line = f"n={result.n} extrapolated = {result.limit!r} ± {result.residual!r}"
            if several_cutoffs:
                line += f" (X={result.x_cut!r})"
            lines.append(line)
    return lines


def open_staging_file(output: str) -> IO[str]:
    """Temporary file next to `output`; it replaces `output` only once the report is complete"""
    directory = os.path.dirname(os.path.abspath(output))
    try:
        return tempfile.NamedTemporaryFile(
            "w", dir=directory, prefix=".pertlab-", suffix=".tmp", delete=False, newline="", encoding="utf-8",
        )
    except OSError as exc:
        raise ConfigurationError(f"cannot open output {output!r}: {exc}") from exc


def run(config: RunConfig, stdout: IO[str]) -> int:
    """Evaluates every planned point and writes the report; an existing output file is left untouched on failure"""
    cfg = QuadConfig.from_settings(rtol=config.tol)
    points = plan_points(config)
    logger.info("running %s for %s up to order %d: %d points",
                config.method, config.perturbation_text, config.order, len(points))

    stream = open_staging_file(config.output) if config.output else None
    try:
        rows = evaluate_points(points, config, cfg)
        summary = summary_lines(rows, config)
        report = render_report(rows, config.format)
        if stream is not None:
            stream.write(report)
            stream.close()
            os.replace(stream.name, config.output)
        else:
            stdout.write(report)
    except BaseException:
        if stream is not None:
            stream.close()
            if os.path.exists(stream.name):
                os.remove(stream.name)
        raise

    for line in summary:
        stdout.write(line + "\n")
    logger.info("wrote %d rows", len(rows))
    return 0
