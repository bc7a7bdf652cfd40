import factory

from .exact_series import RationalPoly
from .ghost_reg import SigmaSweepRow
from .serializers import ReportRow, RunConfig


class RunConfigFactory(factory.Factory):
    class Meta:
        model = RunConfig

    method = "sc"
    perturbation = factory.LazyFunction(lambda: RationalPoly.from_powers({4: 1}))
    order = 1
    xcut_grid = factory.LazyFunction(lambda: [5.0, 6.0])
    sigma_grid = factory.LazyFunction(lambda: [1e-1, 1e-2, 1e-3])
    tol = None
    extrapolate = False
    fit_model = "quadratic"
    format = "csv"
    output = None


class SigmaSweepRowFactory(factory.Factory):
    """Synthetic sweep row whose ratio is intercept + slope * sigma"""
    class Meta:
        model = SigmaSweepRow

    class Params:
        intercept = 0.75
        slope = 0.0
        curvature = 0.0

    n = 1
    x_cut = 6.0
    sigma = factory.Sequence(lambda k: 10.0 ** -(k % 12 + 1))
    denominator = complex(1.0, 0.0)
    numerator = factory.LazyAttribute(
        lambda row: complex(row.intercept + row.slope * row.sigma + row.curvature * row.sigma ** 2, 0.0)
    )
    ratio = factory.LazyAttribute(lambda row: row.numerator / row.denominator)
    oracle = factory.LazyAttribute(lambda row: row.intercept)
    abs_err = factory.LazyAttribute(lambda row: abs(row.ratio.real - row.oracle))
    im_abs = factory.LazyAttribute(lambda row: abs(row.ratio.imag))


class ReportRowFactory(factory.Factory):
    class Meta:
        model = ReportRow

    method = "oracle"
    n = factory.Sequence(lambda k: k + 1)
    ratio_re = 0.75
    ratio_im = 0.0
    oracle = 0.75
    abs_err = 0.0
