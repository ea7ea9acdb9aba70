"""
Exact algebra layer: rational linear algebra, truncated series, Grassmann algebra.
"""

from .exactlinalg import IntSymMatrix, RatMatrix, Rational
from .grassmann import GeneratorIndex, GeneratorKind, GeneratorLayout, GrassmannElement
from .series import BinomialConvention, FiPolynomial, TruncatedSeries

__all__ = [
    "IntSymMatrix",
    "RatMatrix",
    "Rational",
    "GeneratorIndex",
    "GeneratorKind",
    "GeneratorLayout",
    "GrassmannElement",
    "BinomialConvention",
    "FiPolynomial",
    "TruncatedSeries",
]
