import math
import re
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from django.conf import settings
from rest_framework import serializers

from .exact_series import RationalPoly, to_rational
from .exceptions import ConfigurationError, ParityError, PerturbationParseError

METHODS = ("oracle", "sc", "shoot", "ghost", "all")
EVALUATED_METHODS = ("oracle", "sc", "shoot", "ghost")
FORMATS = ("csv", "json")
FIT_MODELS = ("linear", "quadratic", "residue")

TERM = re.compile(
    r"(?P<sign>[+-])?[ \t]*"
    r"(?P<coefficient>\d+(?:/\d+)?)?[ \t]*(?:\*[ \t]*)?"
    r"(?P<monomial>x(?:\^(?P<power>\d+))?)?[ \t]*"
)


def parse_perturbation(text: str) -> RationalPoly:
    """
    Parses a sum of terms `[+-][p/q ]x^k` (a bare `p/q` is a constant term).
    Columns in error messages are 1-based.
    """
    if text is None or not text.strip():
        raise PerturbationParseError("empty perturbation")
    powers = {}
    position = len(text) - len(text.lstrip())
    first = True
    while position < len(text):
        match = TERM.match(text, position)
        column = position + 1
        sign, coefficient, monomial = match.group("sign", "coefficient", "monomial")
        if coefficient is None and monomial is None:
            unexpected = text[match.end():match.end() + 1]
            message = f"unexpected {unexpected!r}" if unexpected else "term expected before end of input"
            raise PerturbationParseError(message, match.end() + 1)
        if sign is None and not first:
            raise PerturbationParseError("expected '+' or '-' between terms", column)

        value = 1
        if coefficient is not None:
            _, _, denominator = coefficient.partition("/")
            if denominator and int(denominator) == 0:
                raise PerturbationParseError("malformed rational: zero denominator", match.start("coefficient") + 1)
            value = to_rational(coefficient)
        if sign == "-":
            value = -value

        power = 0
        if monomial is not None:
            power = int(match.group("power")) if match.group("power") is not None else 1
        if power % 2:
            raise ParityError(power, match.start("monomial") + 1)
        powers[power] = powers.get(power, 0) + value

        position = match.end()
        first = False
    return RationalPoly.from_powers(powers)


def parse_grid(text: str, name: str = "grid") -> List[float]:
    """`start:stop:step` (stop included) or a comma separated list"""
    text = (text or "").strip()
    if not text:
        raise ConfigurationError(f"{name} is empty")
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"{name} {text!r} is not a number list: {exc}") from exc
    if ":" in text:
        if not all(math.isfinite(value) for value in (start, stop, step)):
            raise ConfigurationError(f"{name} {text!r} contains a non-finite value")
        if not step > 0 or stop < start:
            raise ConfigurationError(f"{name} {text!r} needs start <= stop and a positive step")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [float(value) for value in start + step * np.arange(count)]
    if not values:
        raise ConfigurationError(f"{name} is empty")
    if not all(math.isfinite(value) for value in values):
        raise ConfigurationError(f"{name} {text!r} contains a non-finite value")
    return values


@dataclass
class RunConfig:
    method: str
    perturbation: RationalPoly
    order: int
    xcut_grid: List[float] = field(default_factory=list)
    sigma_grid: List[float] = field(default_factory=list)
    tol: Optional[float] = None
    extrapolate: bool = False
    fit_model: str = "residue"
    format: str = "csv"
    output: Optional[str] = None

    @property
    def methods(self) -> List[str]:
        return list(EVALUATED_METHODS) if self.method == "all" else [self.method]

    @property
    def perturbation_text(self) -> str:
        return str(self.perturbation)


class PerturbationField(serializers.CharField):
    def to_internal_value(self, data):
        try:
            return parse_perturbation(super().to_internal_value(data))
        except PerturbationParseError as exc:
            raise serializers.ValidationError(str(exc))

    def to_representation(self, value):
        return str(value)


class RunConfigSerializer(serializers.Serializer):
    method = serializers.ChoiceField(choices=METHODS)
    perturbation = PerturbationField(trim_whitespace=False)
    order = serializers.IntegerField(min_value=1)
    xcut = serializers.FloatField(required=False, allow_null=True)
    xcut_grid = serializers.CharField(required=False, allow_null=True, allow_blank=True)
    sigma_grid = serializers.CharField(required=False, allow_null=True, allow_blank=True)
    tol = serializers.FloatField(required=False, allow_null=True)
    extrapolate = serializers.BooleanField(required=False, allow_null=True, default=False)
    fit_model = serializers.ChoiceField(choices=FIT_MODELS, required=False, allow_null=True)
    format = serializers.ChoiceField(choices=FORMATS, required=False, allow_null=True)
    output = serializers.CharField(required=False, allow_null=True, allow_blank=True)

    def validate_order(self, value):
        cap = settings.PERTLAB["MAX_ORDER"]
        if value > cap:
            raise serializers.ValidationError(f"Order must not exceed {cap}.")
        return value

    def validate_tol(self, value):
        if value is not None and not (math.isfinite(value) and value > 0):
            raise serializers.ValidationError("Tolerance must be a positive number.")
        return value

    def validate(self, data):
        config = settings.PERTLAB
        if data.get("xcut") is not None and data.get("xcut_grid"):
            raise serializers.ValidationError("Use either --xcut or --xcut-grid, not both.")
        try:
            if data.get("xcut") is not None:
                xcut_grid = [data["xcut"]]
            else:
                xcut_grid = parse_grid(data.get("xcut_grid") or config["XCUT_GRID"], "xcut grid")
            sigma_grid = parse_grid(data.get("sigma_grid") or config["SIGMA_GRID"], "sigma grid")
        except ConfigurationError as exc:
            raise serializers.ValidationError(str(exc))
        if any(value <= 0 for value in xcut_grid):
            raise serializers.ValidationError("Cutoffs must be positive.")
        if any(value <= 0 for value in sigma_grid):
            raise serializers.ValidationError("Sigma values must be positive.")

        data["xcut_grid"] = sorted(set(xcut_grid))
        data["sigma_grid"] = sorted(set(sigma_grid), reverse=True)
        data["fit_model"] = data.get("fit_model") or config["FIT_MODEL"]
        data["format"] = data.get("format") or config["OUTPUT_FORMAT"]
        data["extrapolate"] = bool(data.get("extrapolate"))
        data["output"] = data.get("output") or None
        data.pop("xcut", None)
        return data

    def create(self, validated_data):
        return RunConfig(**validated_data)


@dataclass
class ReportRow:
    method: str
    n: int
    sigma: Optional[float] = None
    x_cut: Optional[float] = None
    numerator_re: Optional[float] = None
    numerator_im: Optional[float] = None
    denominator_re: Optional[float] = None
    denominator_im: Optional[float] = None
    ratio_re: Optional[float] = None
    ratio_im: Optional[float] = None
    oracle: Optional[float] = None
    abs_err: Optional[float] = None


class ReportRowSerializer(serializers.Serializer):
    method = serializers.CharField()
    n = serializers.IntegerField()
    sigma = serializers.FloatField(allow_null=True)
    x_cut = serializers.FloatField(allow_null=True)
    numerator_re = serializers.FloatField(allow_null=True)
    numerator_im = serializers.FloatField(allow_null=True)
    denominator_re = serializers.FloatField(allow_null=True)
    denominator_im = serializers.FloatField(allow_null=True)
    ratio_re = serializers.FloatField(allow_null=True)
    ratio_im = serializers.FloatField(allow_null=True)
    oracle = serializers.FloatField(allow_null=True)
    abs_err = serializers.FloatField(allow_null=True)

    def create(self, validated_data):
        return ReportRow(**validated_data)


REPORT_COLUMNS = list(ReportRowSerializer().fields)
