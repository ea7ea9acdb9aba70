"""
Domain models for chern-fqh.

A configuration (K, g, d, n) of a k-layered fractional quantum Hall system, its
validity report, and the Chern character ch(V) = sum_m c_m theta^m.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra.exactlinalg import IntSymMatrix
from .errors import InvalidInputError, RankZeroError


def format_rational(value: Fraction | int) -> str:
    """Exact rendering: "num/den", or "num" for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str | int) -> Fraction:
    return Fraction(text)


def broadcast(values: int | Sequence[int], k: int, name: str) -> tuple[int, ...]:
    """A scalar becomes the constant vector of length k."""
    if isinstance(values, int) and not isinstance(values, bool):
        return (values,) * k
    out = tuple(values)
    if len(out) != k:
        raise InvalidInputError(f"{name} has {len(out)} entries, expected {k}")
    for value in out:
        if not isinstance(value, int) or isinstance(value, bool):
            raise InvalidInputError(f"{name} entries must be integers, got {value!r}")
    return out


@dataclass(frozen=True)
class Configuration:
    """
    (K, g, d, n) with a per-layer degree vector d.

    The quasi-hole vector p = d - K n - (g - 1) diag(K) is always recomputed.
    """

    K: IntSymMatrix
    g: int
    d: tuple[int, ...]
    n: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.g < 0:
            raise InvalidInputError(f"genus must be non-negative, got {self.g}")
        if len(self.d) != self.k or len(self.n) != self.k:
            raise InvalidInputError(
                f"d and n must have {self.k} entries, got {len(self.d)} and {len(self.n)}"
            )
        if any(value < 0 for row in self.K.entries for value in row):
            raise InvalidInputError("K must have non-negative entries")
        if any(value < 0 for value in self.d):
            raise InvalidInputError("degrees must be non-negative")
        if any(value < 0 for value in self.n):
            raise InvalidInputError("particle numbers must be non-negative")

    @classmethod
    def build(
        cls,
        K: IntSymMatrix | Iterable[Iterable[int]],
        g: int,
        d: int | Sequence[int],
        n: int | Sequence[int],
    ) -> Configuration:
        matrix = K if isinstance(K, IntSymMatrix) else IntSymMatrix.from_rows(K)
        return cls(matrix, g, broadcast(d, matrix.size, "d"), broadcast(n, matrix.size, "n"))

    @property
    def k(self) -> int:
        return self.K.size

    @property
    def p(self) -> tuple[int, ...]:
        diagonal = self.K.diagonal()
        return tuple(
            self.d[i]
            - sum(self.K[i, j] * self.n[j] for j in range(self.k))
            - (self.g - 1) * diagonal[i]
            for i in range(self.k)
        )

    def with_n(self, n: Sequence[int]) -> Configuration:
        return Configuration(self.K, self.g, self.d, tuple(n))

    def to_dict(self) -> dict:
        return {
            "K": self.K.to_lists(),
            "g": self.g,
            "d": list(self.d),
            "n": list(self.n),
            "p": list(self.p),
        }


@dataclass(frozen=True)
class ValidityReport:
    """Independently testable hypotheses of the closed-form Chern character."""

    kminusI_psd: bool
    p_nonnegative: bool
    kodaira_bound: bool
    n_constraint: bool
    det_nonzero: bool

    @property
    def certified(self) -> bool:
        """The closed-form value is ch(V), not only an Euler characteristic."""
        return self.kminusI_psd and self.kodaira_bound and self.n_constraint

    def to_dict(self) -> dict[str, bool]:
        return {
            "kminusI_psd": self.kminusI_psd,
            "p_nonnegative": self.p_nonnegative,
            "kodaira_bound": self.kodaira_bound,
            "n_constraint": self.n_constraint,
            "det_nonzero": self.det_nonzero,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class ChernCharacter:
    """ch = sum_{m=0}^{g} c_m theta^m; theta^{g+1} = 0 on Pic^d(C)."""

    g: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) != self.g + 1:
            raise InvalidInputError(
                f"a genus-{self.g} Chern character has {self.g + 1} coefficients, "
                f"got {len(self.coefficients)}"
            )

    @classmethod
    def of(cls, g: int, values: Iterable[Fraction | int]) -> ChernCharacter:
        return cls(g, tuple(Fraction(v) for v in values))

    @classmethod
    def zero(cls, g: int) -> ChernCharacter:
        return cls(g, (Fraction(0),) * (g + 1))

    def __getitem__(self, m: int) -> Fraction:
        if 0 <= m <= self.g:
            return self.coefficients[m]
        return Fraction(0)

    @property
    def rank(self) -> Fraction:
        return self.coefficients[0]

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def conductance(self) -> Fraction:
        """s with sigma = ch_1 / ch_0 = -s theta."""
        if self.rank == 0:
            raise RankZeroError("conductance is undefined for a rank-zero bundle")
        return -self[1] / self.rank

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coefficients]


@dataclass(frozen=True)
class MultiIndexTerm:
    """
    One (v, w) term of the general Chern character sum.

    ``v`` and ``w`` map each subset I of the layers (as a sorted tuple) to a
    non-negative integer; only non-zero entries are stored.
    """

    v: tuple[tuple[tuple[int, ...], int], ...]
    w: tuple[tuple[tuple[int, ...], int], ...]
    layer_counts: tuple[int, ...] = field(default=())

    @property
    def v_total(self) -> int:
        return sum(count for _, count in self.v)

    @property
    def w_total(self) -> int:
        return sum(count for _, count in self.w)
