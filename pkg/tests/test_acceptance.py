"""
End-to-end acceptance checks: closed forms against the brute-force oracle and
the worked examples for the b-family and K = [[10, 3], [3, 2]].
"""

import random
from fractions import Fraction

import pytest
from rich.console import Console

from chern_fqh.algebra.exactlinalg import column_sums, entry_sum, inverse
from chern_fqh.algebra.series import BinomialConvention, coeff_extract, truncated_binomial
from chern_fqh.analysis import conductance_sweep, delta_n, dominating_vectors, rank_vanishing
from chern_fqh.models import Configuration
from chern_fqh.pipeline import ch_theorem3
from chern_fqh.verification import (
    acceptance_configurations,
    admissible,
    minimal_configuration,
    run_sweep,
    spot_check_configurations,
    symmetric_matrices,
)

from .conftest import b_family

QUIET = Console(quiet=True)


# ========================================
# Worked examples
# ========================================


class TestBFamily:
    """K = b J + I with p = 0: rank (kb + 1)^g and conductance k / (kb + 1)."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("b", [1, 2, 3])
    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_degeneracy_and_conductance(self, k, b, g):
        cfg = minimal_configuration(b_family(k, b), g, [0] * k)
        ch = ch_theorem3(cfg)
        assert ch.rank == (k * b + 1) ** g
        assert ch.conductance() == Fraction(k, k * b + 1)


class TestTenThree:
    """K = [[10, 3], [3, 2]]."""

    def test_inverse_and_column_sums(self, k_tenthree):
        inv = inverse(k_tenthree)
        assert entry_sum(inv) == Fraction(6, 11)
        assert column_sums(inv) == (Fraction(-1, 11), Fraction(7, 11))

    def test_particle_shifts(self, k_tenthree):
        assert delta_n(k_tenthree, (88, 11)).delta == (-13, 14)
        assert delta_n(k_tenthree, (11, 0)).delta == (-2, 3)

    def test_genus_two_rank(self, k_tenthree):
        cfg = minimal_configuration(k_tenthree, 2, [0, 0])
        assert ch_theorem3(cfg).rank == 121


# ========================================
# Oracle equivalence
# ========================================


class TestOracleEquivalence:
    """Brute-force Berezin integration against the closed forms."""

    def test_sweep_size(self):
        configurations = acceptance_configurations()
        assert len(configurations) == 564
        assert sum(cfg.k == 1 for cfg in configurations) == 24

    def test_exhaustive_sweep(self):
        """Test k <= 2, g <= 2, entries in [0, 4], p_i in {0, 1, 2}."""
        outcome = run_sweep(acceptance_configurations(), workers=1, console=QUIET)
        assert not outcome.errors
        assert outcome.failures == []
        assert len(outcome.reports) == 564

    def test_spot_checks(self):
        """Test random configurations at (k, g) = (2, 3) and (3, 1)."""
        configurations = spot_check_configurations()
        assert {(cfg.k, cfg.g) for cfg in configurations} == {(2, 3), (3, 1)}
        outcome = run_sweep(configurations, workers=1, console=QUIET)
        assert outcome.passed
        assert len(outcome.reports) == 10

    def test_negative_control(self):
        """Test that flipping the Wick exponent sign breaks the sweep."""
        configurations = acceptance_configurations(k_max=2, g_max=1, entry_max=2, p_max=1)
        outcome = run_sweep(configurations, exponent_sign=1, workers=1, console=QUIET)
        assert not outcome.passed
        assert outcome.failures

    def test_series_extraction_matches_binomial_away_from_boundary(self):
        for r in range(0, 9):
            for p in range(0, 9):
                for a in range(0, 6):
                    if r + p == 0:
                        continue
                    assert coeff_extract(r, p, a) == truncated_binomial(r + p, p - a)


# ========================================
# Rank vanishing
# ========================================


class TestRankVanishing:
    """A negative quasi-hole count forces the zero class."""

    def test_random_negative_quasi_holes(self):
        """Test 50 configurations with some p_i < 0, inside and outside the Kodaira bound."""
        rng = random.Random(11)
        matrices = [m for k in (1, 2) for m in symmetric_matrices(k, 0, 4) if admissible(m)]
        checked = 0
        while checked < 50:
            matrix = rng.choice(matrices)
            g = rng.randint(1, 2)
            p = [rng.randint(-2, 2) for _ in range(matrix.size)]
            if min(p) >= 0:
                continue
            n = [rng.randint(0, 2 * g + 2) for _ in range(matrix.size)]
            d = [
                p[i] + sum(matrix[i, j] * n[j] for j in range(matrix.size))
                + (g - 1) * matrix[i, i]
                for i in range(matrix.size)
            ]
            if min(d) < 0:
                continue
            cfg = Configuration.build(matrix, g, d, n)
            assert rank_vanishing(cfg)
            for convention in BinomialConvention:
                assert ch_theorem3(cfg, convention=convention).is_zero()
            checked += 1

    @pytest.mark.parametrize("k, b, g", [(1, 1, 1), (2, 1, 1), (2, 2, 2), (3, 1, 1)])
    def test_dominating_particle_vectors(self, k, b, g):
        """Test that every n > n0 in a box gives rank 0."""
        cfg = minimal_configuration(b_family(k, b), g, [0] * k)
        checks = dominating_vectors(cfg, 2, convention=BinomialConvention.TRUNCATED)
        assert len(checks) == 3**k - 1
        assert all(check.vanishes for check in checks)
        for check in checks:
            shifted = cfg.with_n(check.n)
            assert ch_theorem3(shifted, convention=BinomialConvention.SERIES).rank == 0


# ========================================
# Asymptotics
# ========================================


class TestAsymptotics:
    """Exact against first-order conductance for K = [[2, 1], [1, 2]], p = (1, 1)."""

    def test_difference_shrinks_like_one_over_d(self, k_b1):
        points = conductance_sweep(k_b1, 1, (1, 1), range(10, 200, 3))
        assert len(points) >= 8
        gaps = [abs(point.difference) for point in points]
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
        assert max(point.scaled_difference for point in points) <= Fraction(2, 27)
        assert all(point.scaled_difference > 0 for point in points)
