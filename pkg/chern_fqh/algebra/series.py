"""
Truncated formal power series over the rationals.

Houses the Todd series td(x) = x / (1 - e^{-x}), the coefficient extraction

    [x^r] td(x)^{r+1} e^{px} (td(x)/x - 1)^a

and the per-layer polynomials f_i, computed both from the closed-form binomial
and purely by series extraction.
"""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from ..errors import SeriesError

logger = logging.getLogger(__name__)


class BinomialConvention(enum.Enum):
    """How binom(top, bottom) is read in the f_i and closed-form coefficients."""

    # exact value of the coefficient extraction (generalized binomial)
    SERIES = "series"
    # zero when the lower entry is negative or the upper entry is non-positive
    TRUNCATED = "truncated"

    @classmethod
    def parse(cls, value: str | BinomialConvention) -> BinomialConvention:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise SeriesError(f"unknown binomial convention: {value!r}") from None


@dataclass(frozen=True)
class TruncatedSeries:
    """c_0 + c_1 x + ... + c_T x^T, exact in every degree <= T."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise SeriesError("a truncated series needs at least the constant coefficient")

    @classmethod
    def of(cls, values: Iterable[Fraction | int], order: int | None = None) -> TruncatedSeries:
        coeffs = [Fraction(v) for v in values]
        if order is not None:
            coeffs = (coeffs + [Fraction(0)] * (order + 1))[: order + 1]
        return cls(tuple(coeffs))

    @classmethod
    def constant(cls, value: Fraction | int, order: int) -> TruncatedSeries:
        return cls.of([value], order)

    @classmethod
    def x(cls, order: int) -> TruncatedSeries:
        return cls.of([0, 1], order)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, degree: int) -> Fraction:
        if 0 <= degree <= self.order:
            return self.coefficients[degree]
        if degree < 0:
            return Fraction(0)
        raise SeriesError(f"degree {degree} is beyond the truncation order {self.order}")

    def _common(self, other: TruncatedSeries) -> tuple[int, tuple[Fraction, ...], tuple[Fraction, ...]]:
        order = min(self.order, other.order)
        return order, self.coefficients[: order + 1], other.coefficients[: order + 1]

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        _, a, b = self._common(other)
        return TruncatedSeries(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        _, a, b = self._common(other)
        return TruncatedSeries(tuple(x - y for x, y in zip(a, b)))

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(-c for c in self.coefficients))

    def __mul__(self, other: TruncatedSeries | Fraction | int) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        order, a, b = self._common(other)
        out = [Fraction(0)] * (order + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(order + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return TruncatedSeries(tuple(out))

    __rmul__ = __mul__

    def scale(self, factor: Fraction | int) -> TruncatedSeries:
        return TruncatedSeries(tuple(c * factor for c in self.coefficients))

    def inverse(self) -> TruncatedSeries:
        if self.coefficients[0] == 0:
            raise SeriesError("series with zero constant term has no inverse")
        out = [Fraction(1) / self.coefficients[0]]
        for n in range(1, self.order + 1):
            acc = sum((self.coefficients[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out.append(-acc / self.coefficients[0])
        return TruncatedSeries(tuple(out))

    def __pow__(self, exponent: int) -> TruncatedSeries:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = TruncatedSeries.constant(1, self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def exp(self) -> TruncatedSeries:
        """exp of a series with zero constant term, via E' = F'E."""
        if self.coefficients[0] != 0:
            raise SeriesError("exp is only defined here for series with zero constant term")
        out = [Fraction(1)]
        for n in range(1, self.order + 1):
            acc = sum(
                (k * self.coefficients[k] * out[n - k] for k in range(1, n + 1)),
                Fraction(0),
            )
            out.append(acc / n)
        return TruncatedSeries(tuple(out))


# ========================================
# Todd series and coefficient extraction
# ========================================


def todd_series(order: int) -> TruncatedSeries:
    """td(x) = x / (1 - e^{-x}) through degree ``order``."""
    if order < 0:
        raise SeriesError("truncation order must be non-negative")
    # (1 - e^{-x}) / x = sum_n (-1)^n x^n / (n + 1)!
    denominator = TruncatedSeries(
        tuple(Fraction((-1) ** n, math.factorial(n + 1)) for n in range(order + 1))
    )
    return denominator.inverse()


def exp_linear(p: int, order: int) -> TruncatedSeries:
    """e^{px}."""
    return TruncatedSeries(tuple(Fraction(p**n, math.factorial(n)) for n in range(order + 1)))


def coeff_extract(r: int, p: int, a: int) -> Fraction:
    """
    [x^r] td(x)^{r+1} e^{px} (td(x)/x - 1)^a, computed from series.

    (td/x - 1)^a = x^{-a} (td - x)^a, so the value is [x^{r+a}] of a genuine
    power series and T = r + a suffices.
    """
    if r < 0 or a < 0:
        raise SeriesError("coeff_extract needs r >= 0 and a >= 0")
    order = r + a
    td = todd_series(order)
    product = td ** (r + 1) * exp_linear(p, order) * (td - TruncatedSeries.x(order)) ** a
    logger.debug(f"coeff_extract r={r} p={p} a={a} at order {order}")
    return product[order]


def generalized_binomial(top: int, bottom: int) -> Fraction:
    """top (top - 1) ... (top - bottom + 1) / bottom!, zero for bottom < 0."""
    if bottom < 0:
        return Fraction(0)
    numerator = 1
    for t in range(bottom):
        numerator *= top - t
    return Fraction(numerator, math.factorial(bottom))


def truncated_binomial(top: int, bottom: int) -> int:
    """binom(top, bottom), zero when bottom < 0 or top <= 0."""
    if bottom < 0 or top <= 0:
        return 0
    return math.comb(top, bottom)


def extraction_binomial(top: int, bottom: int) -> int:
    """
    The exact value binom(r + p, r + a) of the extraction, written in the
    (top, bottom) = (r + p, p - a) coordinates.

    Agrees with ``truncated_binomial`` whenever top > 0; differs at top <= 0.
    """
    value = generalized_binomial(top, top - bottom)
    return int(value)


def binomial(top: int, bottom: int, convention: BinomialConvention) -> int:
    if convention is BinomialConvention.TRUNCATED:
        return truncated_binomial(top, bottom)
    return extraction_binomial(top, bottom)


def discrepancies(
    r_values: Iterable[int], p_values: Iterable[int], a_values: Iterable[int]
) -> list[tuple[int, int, int, Fraction, int]]:
    """
    Grid points where the series value and ``truncated_binomial(r+p, p-a)`` disagree.

    Each entry is (r, p, a, series_value, truncated_value).
    """
    p_list = list(p_values)
    a_list = list(a_values)
    found = []
    for r in r_values:
        for p in p_list:
            for a in a_list:
                value = coeff_extract(r, p, a)
                verbatim = truncated_binomial(r + p, p - a)
                if value != verbatim:
                    logger.info(
                        f"binomial convention mismatch at r={r} p={p} a={a}: "
                        f"series {value}, truncated {verbatim}"
                    )
                    found.append((r, p, a, value, verbatim))
    return found


# ========================================
# Per-layer polynomials f_i
# ========================================


@dataclass(frozen=True)
class FiPolynomial:
    """f_i(x) = sum_a coefficients[a] x^a."""

    coefficients: tuple[Fraction, ...]
    layer: int | None = None

    def __getitem__(self, degree: int) -> Fraction:
        if 0 <= degree < len(self.coefficients):
            return self.coefficients[degree]
        return Fraction(0)

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        for a in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[a]:
                return a
        return -1

    def is_zero(self) -> bool:
        return self.degree < 0

    def same_as(self, other: FiPolynomial, max_degree: int) -> bool:
        return all(self[a] == other[a] for a in range(max_degree + 1))

    def evaluate(self, value: Fraction | int) -> Fraction:
        return sum((c * Fraction(value) ** a for a, c in enumerate(self.coefficients)), Fraction(0))


def _support_bound(n_i: int, g: int, p_i: int, max_degree: int | None) -> int:
    if max_degree is not None:
        return max_degree
    if n_i - g + p_i >= 0:
        return max(p_i, 0)
    # infinite support under the series convention; theta_i^{g+1} = 0 downstream
    return g


def f_polynomial(
    n_i: int,
    g: int,
    p_i: int,
    *,
    convention: BinomialConvention = BinomialConvention.SERIES,
    max_degree: int | None = None,
    layer: int | None = None,
) -> FiPolynomial:
    """f_i(x) = sum_{a>=0} (1/a!) binom(n_i - g + p_i, p_i - a) x^a."""
    top = n_i - g + p_i
    bound = _support_bound(n_i, g, p_i, max_degree)
    coefficients = tuple(
        Fraction(binomial(top, p_i - a, convention), math.factorial(a)) for a in range(bound + 1)
    )
    return FiPolynomial(coefficients, layer)


def series_oracle_f(
    n_i: int, g: int, p_i: int, max_a: int, layer: int | None = None
) -> FiPolynomial:
    """f_i by pure coefficient extraction: (1/a!) [x^{n_i-g}] e^{p x} td^{n_i+1-g} (td/x - 1)^a."""
    r = n_i - g
    if r < 0:
        raise SeriesError(f"series oracle needs n_i - g >= 0, got {r}")
    coefficients = tuple(
        coeff_extract(r, p_i, a) / math.factorial(a) for a in range(max_a + 1)
    )
    return FiPolynomial(coefficients, layer)
