"""
Exact rational oracle for the perturbation hierarchy.

With psi_n = f_n * psi0 the order-n equation becomes the polynomial problem

    -f_n'' + 2x f_n' = E_n - V_n

where V_n = V1*f_{n-1} - sum_{i=1}^{n-1} E_i f_{n-i} is the effective
perturbation. E_n is fixed by solvability (E_n = <V_n>) and the constant term
of f_n by orthogonality (<f_n> = 0). All arithmetic is exact.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import zip_longest
from typing import List, Mapping, Tuple, Union

import numpy as np
import sympy

from .exceptions import ConfigurationError, MissingOrderError, ParityError

logger = logging.getLogger(__name__)

x = sympy.Symbol("x")

RationalLike = Union[int, str, Fraction, sympy.Rational]


def to_rational(value: RationalLike) -> sympy.Rational:
    if isinstance(value, float):
        raise TypeError(f"refusing inexact coefficient {value!r}; pass an int, str or Fraction")
    return sympy.Rational(value)


@dataclass(frozen=True)
class RationalPoly:
    """Even polynomial c0 + c2 x^2 + c4 x^4 + ... with exact rational coefficients"""
    coefficients: Tuple[sympy.Rational, ...] = ()

    def __post_init__(self):
        coefficients = [to_rational(c) for c in self.coefficients]
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @classmethod
    def from_powers(cls, powers: Mapping[int, RationalLike]) -> "RationalPoly":
        """Builds from {power: coefficient}; odd powers with non-zero coefficients are rejected"""
        top = max(powers, default=0)
        coefficients = [sympy.Integer(0)] * (top // 2 + 1)
        for power, coefficient in powers.items():
            coefficient = to_rational(coefficient)
            if power < 0:
                raise ConfigurationError(f"negative power x^{power}")
            if coefficient == 0:
                continue
            if power % 2:
                raise ParityError(power)
            coefficients[power // 2] += coefficient
        return cls(tuple(coefficients))

    @classmethod
    def from_sympy(cls, expression) -> "RationalPoly":
        poly = sympy.Poly(expression, x, domain="QQ")
        return cls.from_powers({monomial[0]: coefficient for monomial, coefficient in poly.terms()})

    @classmethod
    def constant(cls, value: RationalLike) -> "RationalPoly":
        return cls((value,))

    def as_poly(self) -> sympy.Poly:
        terms = sum((c * x ** (2 * k) for k, c in enumerate(self.coefficients)), sympy.Integer(0))
        return sympy.Poly(terms, x, domain="QQ")

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def degree(self) -> int:
        """Degree in x; -1 for the zero polynomial"""
        return 2 * (len(self.coefficients) - 1) if self.coefficients else -1

    def coefficient(self, power: int) -> sympy.Rational:
        if power % 2 or power // 2 >= len(self.coefficients):
            return sympy.Integer(0)
        return self.coefficients[power // 2]

    def powers(self) -> dict:
        return {2 * k: c for k, c in enumerate(self.coefficients) if c != 0}

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return RationalPoly(tuple(a + b for a, b in zip_longest(self.coefficients, other.coefficients, fillvalue=0)))

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return RationalPoly.from_sympy(self.as_poly() * other.as_poly())
        if isinstance(other, (int, Fraction, sympy.Rational)):
            factor = to_rational(other)
            return RationalPoly(tuple(factor * c for c in self.coefficients))
        return NotImplemented

    __rmul__ = __mul__

    def float_coefficients(self) -> np.ndarray:
        """Coefficients as floats in powers of x^2, ready for numpy's polyval"""
        if not self.coefficients:
            return np.zeros(1)
        return np.array([float(c) for c in self.coefficients])

    def __call__(self, value: float) -> float:
        return float(np.polynomial.polynomial.polyval(value * value, self.float_coefficients()))

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(f"x^{2 * k}")
            elif c == -1:
                terms.append(f"-x^{2 * k}")
            else:
                terms.append(f"{c} x^{2 * k}")
        text = terms[0]
        for term in terms[1:]:
            text += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return text


ONE = RationalPoly.constant(1)
ZERO = RationalPoly()


def as_rational_poly(value) -> RationalPoly:
    if isinstance(value, RationalPoly):
        return value
    return RationalPoly.from_sympy(value)


def gaussian_moment(p: RationalPoly) -> sympy.Rational:
    """<p> under the weight psi0^2 on [0, inf), normalised: <x^2k> = (2k-1)!!/2^k"""
    p = as_rational_poly(p)
    return sum(
        (c * sympy.factorial2(2 * k - 1) / sympy.Integer(2) ** k for k, c in enumerate(p.coefficients)),
        sympy.Integer(0),
    )


def oscillator_operator(f: RationalPoly) -> RationalPoly:
    """-f'' + 2x f', i.e. (H0 - E0) acting on f*psi0, divided by psi0"""
    poly = f.as_poly()
    return RationalPoly.from_sympy(-poly.diff(x).diff(x) + 2 * x * poly.diff(x))


@dataclass(frozen=True)
class SeriesOrder:
    n: int
    energy: sympy.Rational
    factor: RationalPoly
    effective: RationalPoly


@dataclass
class PerturbationSeries:
    perturbation: RationalPoly
    orders: List[SeriesOrder] = field(default_factory=list)

    @property
    def label(self) -> str:
        return str(self.perturbation)

    @property
    def max_order(self) -> int:
        return len(self.orders)

    def order(self, n: int) -> SeriesOrder:
        if n < 1 or n > self.max_order:
            raise MissingOrderError(f"order {n} not available; series holds orders 1..{self.max_order}")
        return self.orders[n - 1]

    def energy(self, n: int) -> sympy.Rational:
        if n == 0:
            return sympy.Integer(1)
        return self.order(n).energy

    def factor(self, n: int) -> RationalPoly:
        if n == 0:
            return ONE
        return self.order(n).factor

    def effective(self, n: int) -> RationalPoly:
        return self.order(n).effective

    def energies(self) -> List[sympy.Rational]:
        return [order.energy for order in self.orders]

    def as_text(self) -> str:
        return "\n".join(f"E{order.n} = {order.energy}" for order in self.orders)


def effective_perturbation(n: int, series: PerturbationSeries) -> RationalPoly:
    """V_n = V1*f_{n-1} - sum_{i=1}^{n-1} E_i f_{n-i}"""
    if n < 1:
        raise ConfigurationError(f"order must be at least 1, got {n}")
    if series.max_order < n - 1:
        raise MissingOrderError(f"order {n} needs orders 1..{n - 1}, series holds 1..{series.max_order}")
    effective = series.perturbation * series.factor(n - 1)
    for i in range(1, n):
        effective = effective - series.factor(n - i) * series.energy(i)
    return effective


def solve_order(n: int, effective) -> Tuple[sympy.Rational, RationalPoly]:
    """
    Solves -f'' + 2x f' = E - V for an even polynomial V. The map from the
    coefficient a_2k of f to the x^2k coefficient of the left side is upper
    triangular with diagonal 4k, so f is solved from the top degree down.
    """
    effective = as_rational_poly(effective)
    energy = gaussian_moment(effective)
    source = RationalPoly.constant(energy) - effective
    top = len(source.coefficients) - 1

    a = [sympy.Integer(0)] * (max(top, 0) + 2)
    for k in range(top, 0, -1):
        a[k] = (source.coefficient(2 * k) + (2 * k + 2) * (2 * k + 1) * a[k + 1]) / (4 * k)
    if -2 * a[1] != source.coefficient(0):
        raise ArithmeticError(f"order {n}: solvability condition violated for E = {energy}")

    unnormalised = RationalPoly(tuple(a))
    factor = unnormalised - RationalPoly.constant(gaussian_moment(unnormalised))
    return energy, factor


def build_series(perturbation: RationalPoly, max_order: int) -> PerturbationSeries:
    if max_order < 1:
        raise ConfigurationError(f"maximum order must be at least 1, got {max_order}")
    series = PerturbationSeries(perturbation=as_rational_poly(perturbation))
    for n in range(1, max_order + 1):
        effective = effective_perturbation(n, series)
        energy, factor = solve_order(n, effective)
        series.orders.append(SeriesOrder(n=n, energy=energy, factor=factor, effective=effective))
        logger.debug("order %d of %s: E = %s, deg f = %d", n, series.label, energy, factor.degree)
    return series


def residual(series: PerturbationSeries, n: int) -> RationalPoly:
    """-f_n'' + 2x f_n' + V_n - E_n, identically zero for a correct order"""
    order = series.order(n)
    return oscillator_operator(order.factor) + order.effective - RationalPoly.constant(order.energy)


def matrix_element_energy(series: PerturbationSeries, n: int) -> sympy.Rational:
    """<psi0|V1|psi_{n-1}>, the second form of the standard result"""
    return gaussian_moment(series.perturbation * series.factor(n - 1))
