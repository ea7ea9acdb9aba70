"""
Configuration analysis.

Shift formula, validity of the vanishing hypotheses, rank vanishing for negative
quasi-hole counts, particle-number maximization and the large-degree asymptotics
of the filling and the Hall conductance.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .algebra.exactlinalg import (
    IntSymMatrix,
    RatMatrix,
    column_sums,
    det,
    entry_sum,
    inverse,
    is_psd,
)
from .algebra.series import BinomialConvention
from .config import config
from .errors import HypothesisError, InvalidInputError, SingularMatrixError
from .models import Configuration, ValidityReport, broadcast, format_rational
from .pipeline import ch_theorem3

logger = logging.getLogger(__name__)


def _as_matrix(K: IntSymMatrix | Iterable[Iterable[int]]) -> IntSymMatrix:
    return K if isinstance(K, IntSymMatrix) else IntSymMatrix.from_rows(K)


def _inverse(K: IntSymMatrix, purpose: str) -> RatMatrix:
    if det(K) == 0:
        raise SingularMatrixError(f"{purpose} needs det(K) != 0")
    return inverse(K)


# ========================================
# Shift formula and validity
# ========================================


@dataclass(frozen=True)
class ShiftSolution:
    """n0 = K^{-1}(d - (g - 1) diag K)."""

    n0: tuple[Fraction, ...]
    integral: bool
    valid: bool

    def as_integers(self) -> tuple[int, ...]:
        if not self.integral:
            raise InvalidInputError(
                f"shift solution {[format_rational(v) for v in self.n0]} is not integral"
            )
        return tuple(int(v) for v in self.n0)

    def to_dict(self) -> dict:
        return {
            "n0": [format_rational(v) for v in self.n0],
            "integral": self.integral,
            "valid": self.valid,
        }


def quasihole_vector(cfg: Configuration) -> tuple[int, ...]:
    return cfg.p


def solve_shift(
    K: IntSymMatrix | Iterable[Iterable[int]], g: int, d: int | Sequence[int]
) -> ShiftSolution:
    """Solve K n0 = d - (g - 1) diag K exactly; valid means integral with n_i > 2g - 1."""
    matrix = _as_matrix(K)
    degrees = broadcast(d, matrix.size, "d")
    rhs = [degrees[i] - (g - 1) * matrix[i, i] for i in range(matrix.size)]
    n0 = _inverse(matrix, "the shift formula").apply(rhs)
    integral = all(v.denominator == 1 for v in n0)
    valid = integral and all(v > 2 * g - 1 for v in n0)
    return ShiftSolution(n0, integral, valid)


def configuration_from_shift(
    K: IntSymMatrix | Iterable[Iterable[int]], g: int, d: int | Sequence[int]
) -> Configuration:
    matrix = _as_matrix(K)
    solution = solve_shift(matrix, g, d)
    return Configuration.build(matrix, g, d, solution.as_integers())


def configuration_from_p(
    K: IntSymMatrix | Iterable[Iterable[int]],
    g: int,
    d: int | Sequence[int],
    p: Sequence[int],
) -> Configuration:
    """The configuration whose quasi-hole vector is ``p``: n = K^{-1}(d - p - (g - 1) diag K)."""
    matrix = _as_matrix(K)
    degrees = broadcast(d, matrix.size, "d")
    quasiholes = broadcast(p, matrix.size, "p")
    rhs = [degrees[i] - quasiholes[i] - (g - 1) * matrix[i, i] for i in range(matrix.size)]
    n = _inverse(matrix, "solving for n from p").apply(rhs)
    if any(v.denominator != 1 or v < 0 for v in n):
        raise InvalidInputError(
            f"p = {list(quasiholes)} with d = {list(degrees)} gives n = "
            f"{[format_rational(v) for v in n]}, which is not a non-negative integer vector"
        )
    return Configuration(matrix, g, degrees, tuple(int(v) for v in n))


def validity(cfg: Configuration) -> ValidityReport:
    p = cfg.p
    return ValidityReport(
        kminusI_psd=is_psd(cfg.K.minus_identity(), max_size=config.PSD_MAX_SIZE),
        p_nonnegative=all(value >= 0 for value in p),
        kodaira_bound=all(p[i] > -(cfg.n[i] + 1 - cfg.g) for i in range(cfg.k)),
        n_constraint=all(n_i > 2 * cfg.g - 1 for n_i in cfg.n),
        det_nonzero=det(cfg.K) != 0,
    )


def rank_vanishing(cfg: Configuration) -> bool:
    """A negative quasi-hole count forces rank 0."""
    return min(cfg.p, default=0) < 0


# ========================================
# Particle-number maximization
# ========================================


@dataclass(frozen=True)
class ParticleMaxReport:
    column_sums: tuple[Fraction, ...]
    all_nonneg: bool

    def to_dict(self) -> dict:
        return {
            "C": [format_rational(c) for c in self.column_sums],
            "maximizes_total": self.all_nonneg,
        }


@dataclass(frozen=True)
class ParticleShift:
    """n = n0 + delta and N = N0 + total for a quasi-hole vector p."""

    delta: tuple[Fraction, ...]
    total: Fraction

    def to_dict(self) -> dict:
        return {
            "delta_n": [format_rational(v) for v in self.delta],
            "delta_N": format_rational(self.total),
        }


def particle_max_analysis(K: IntSymMatrix | Iterable[Iterable[int]]) -> ParticleMaxReport:
    """Column sums C_i of K^{-1}; when all are >= 0 the shift solution maximizes N."""
    sums = column_sums(_inverse(_as_matrix(K), "particle maximization"))
    return ParticleMaxReport(sums, all(c >= 0 for c in sums))


def delta_n(K: IntSymMatrix | Iterable[Iterable[int]], p: Sequence[int]) -> ParticleShift:
    matrix = _as_matrix(K)
    quasiholes = broadcast(p, matrix.size, "p")
    inv = _inverse(matrix, "delta_n")
    delta = tuple(-v for v in inv.apply(quasiholes))
    sums = column_sums(inv)
    total = -sum((c * q for c, q in zip(sums, quasiholes)), Fraction(0))
    return ParticleShift(delta, total)


@dataclass(frozen=True)
class DominatingCheck:
    n: tuple[int, ...]
    p: tuple[int, ...]
    rank: Fraction

    @property
    def vanishes(self) -> bool:
        return self.rank == 0


def dominating_vectors(
    cfg: Configuration,
    span: int,
    *,
    convention: BinomialConvention | None = None,
) -> list[DominatingCheck]:
    """
    Every n > cfg.n (componentwise >=, somewhere >) with n - cfg.n <= span, and the
    rank of the resulting bundle.
    """
    if span < 1:
        raise InvalidInputError("span must be at least 1")
    checks = []
    for step in itertools.product(range(span + 1), repeat=cfg.k):
        if not any(step):
            continue
        shifted = cfg.with_n([n_i + s for n_i, s in zip(cfg.n, step)])
        rank = ch_theorem3(shifted, convention=convention).rank
        checks.append(DominatingCheck(shifted.n, shifted.p, rank))
    logger.debug(f"checked {len(checks)} dominating particle vectors above {list(cfg.n)}")
    return checks


@dataclass(frozen=True)
class ParticleWalk:
    """Largest N along n0 + m * direction with n >= 0."""

    steps: int
    n: tuple[int, ...]
    total: int

    def to_dict(self) -> dict:
        return {"steps": self.steps, "n": list(self.n), "N": self.total}


def max_particles_along(
    K: IntSymMatrix | Iterable[Iterable[int]],
    n0: Sequence[int],
    direction: Sequence[int],
) -> ParticleWalk:
    """
    Walk n0 + m * direction for m = 0, 1, ... while every layer stays occupied by
    a non-negative number of particles, and keep the step with the largest N.
    """
    matrix = _as_matrix(K)
    start = broadcast(n0, matrix.size, "n0")
    step = broadcast(direction, matrix.size, "direction")
    if all(s >= 0 for s in step):
        raise InvalidInputError("direction must lower some layer, otherwise the walk never stops")
    best = ParticleWalk(0, start, sum(start))
    m = 0
    while True:
        m += 1
        n = tuple(a + m * s for a, s in zip(start, step))
        if min(n) < 0:
            break
        if sum(n) > best.total:
            best = ParticleWalk(m, n, sum(n))
    return best


# ========================================
# Conductance and asymptotics
# ========================================


def conductance(
    cfg: Configuration, *, convention: BinomialConvention | None = None
) -> Fraction:
    """s with sigma = -s theta, from the general Chern character formula."""
    return ch_theorem3(cfg, convention=convention).conductance()


def asymptotic_conductance(
    K: IntSymMatrix | Iterable[Iterable[int]],
    n: Sequence[int],
    p: Sequence[int],
) -> Fraction:
    """|K^{-1}| - sum_i (p_i / n_i) C_i^2."""
    matrix = _as_matrix(K)
    particles = broadcast(n, matrix.size, "n")
    quasiholes = broadcast(p, matrix.size, "p")
    if any(n_i <= 0 for n_i in particles):
        raise InvalidInputError("asymptotic conductance needs n_i > 0 in every layer")
    inv = _inverse(matrix, "asymptotic conductance")
    sums = column_sums(inv)
    correction = sum(
        (Fraction(q, n_i) * c * c for q, n_i, c in zip(quasiholes, particles, sums)),
        Fraction(0),
    )
    return entry_sum(inv) - correction


def asymptotic_filling(
    K: IntSymMatrix | Iterable[Iterable[int]], g: int, d: int | Sequence[int]
) -> tuple[Fraction, ...]:
    """Leading term K^{-1} d of the particle vector maximizing N."""
    matrix = _as_matrix(K)
    inv = _inverse(matrix, "asymptotic filling")
    sums = column_sums(inv)
    if any(c <= 0 for c in sums):
        raise HypothesisError(
            f"asymptotic filling needs every C_i > 0, got {[format_rational(c) for c in sums]}"
        )
    return inv.apply(broadcast(d, matrix.size, "d"))


def integer_maximizer(
    K: IntSymMatrix | Iterable[Iterable[int]], g: int, d: int | Sequence[int]
) -> tuple[int, ...]:
    """
    The integral n >= 0 with p >= 0 maximizing N, searched in the box of radius
    max_j sum_i K_ij around the rounded shift solution.
    """
    matrix = _as_matrix(K)
    degrees = broadcast(d, matrix.size, "d")
    center = [round(v) for v in solve_shift(matrix, g, degrees).n0]
    radius = max((sum(row) for row in matrix.entries), default=0)
    best: tuple[int, ...] | None = None
    for offset in itertools.product(range(-radius, radius + 1), repeat=matrix.size):
        n = tuple(c + o for c, o in zip(center, offset))
        if min(n) < 0:
            continue
        if min(Configuration(matrix, g, degrees, n).p) < 0:
            continue
        if best is None or sum(n) > sum(best):
            best = n
    if best is None:
        raise InvalidInputError(f"no admissible particle vector near {center} for d = {list(degrees)}")
    return best


@dataclass(frozen=True)
class SweepPoint:
    """Exact against first-order conductance at one degree."""

    d: tuple[int, ...]
    n: tuple[int, ...]
    exact: Fraction
    asymptotic: Fraction

    @property
    def difference(self) -> Fraction:
        return self.exact - self.asymptotic

    @property
    def scaled_difference(self) -> Fraction:
        return abs(self.difference) * max(self.d)

    def to_dict(self) -> dict:
        return {
            "d": list(self.d),
            "n": list(self.n),
            "exact": format_rational(self.exact),
            "asymptotic": format_rational(self.asymptotic),
            "difference": format_rational(self.difference),
            "scaled_difference": format_rational(self.scaled_difference),
        }


def conductance_sweep(
    K: IntSymMatrix | Iterable[Iterable[int]],
    g: int,
    p: Sequence[int],
    d_values: Iterable[int | Sequence[int]],
    *,
    convention: BinomialConvention | None = None,
) -> list[SweepPoint]:
    """
    Exact and asymptotic conductance for fixed quasi-hole vector p along d.

    Degrees for which n = K^{-1}(d - p - (g - 1) diag K) is not a non-negative
    integer vector are skipped.
    """
    matrix = _as_matrix(K)
    points = []
    for d in d_values:
        try:
            cfg = configuration_from_p(matrix, g, d, p)
        except InvalidInputError as e:
            logger.debug(f"skipping d={d}: {e}")
            continue
        points.append(
            SweepPoint(
                cfg.d,
                cfg.n,
                conductance(cfg, convention=convention),
                asymptotic_conductance(matrix, cfg.n, cfg.p),
            )
        )
    return points
