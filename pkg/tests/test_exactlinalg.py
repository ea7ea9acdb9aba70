"""
Tests for exact linear algebra.
"""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from chern_fqh.algebra.exactlinalg import (
    IntSymMatrix,
    RatMatrix,
    adjugate,
    column_sums,
    complement,
    det,
    entry_sum,
    inverse,
    is_psd,
    principal_minors,
    principal_submatrix,
    subsets,
)
from chern_fqh.errors import InvalidInputError, SingularMatrixError

from .conftest import b_family


@st.composite
def symmetric_matrices(draw, min_size=1, max_size=6, low=-5, high=5):
    size = draw(st.integers(min_size, max_size))
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            value = draw(st.integers(low, high))
            rows[i][j] = rows[j][i] = value
    return IntSymMatrix.from_rows(rows)


def permutation_det(matrix: IntSymMatrix) -> int:
    total = 0
    n = matrix.size
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= matrix[i, perm[i]]
        total += term
    return total


# ========================================
# Matrix types
# ========================================


class TestIntSymMatrix:
    """Tests for the symmetric integer matrix type."""

    def test_rejects_asymmetric(self):
        """Test that an asymmetric matrix is refused."""
        with pytest.raises(InvalidInputError, match="not symmetric"):
            IntSymMatrix.from_rows([[1, 2], [3, 4]])

    def test_rejects_ragged_rows(self):
        with pytest.raises(InvalidInputError):
            IntSymMatrix.from_rows([[1, 2], [2]])

    def test_rejects_non_integers(self):
        with pytest.raises(InvalidInputError):
            IntSymMatrix.from_rows([[1.5]])

    def test_empty_matrix_is_legal(self):
        assert IntSymMatrix.empty().size == 0

    def test_minus_identity(self, k_tenthree):
        assert k_tenthree.minus_identity().to_lists() == [[9, 3], [3, 1]]


# ========================================
# Determinant, adjugate, inverse
# ========================================


class TestDeterminant:
    """Tests for the Bareiss determinant."""

    @pytest.mark.parametrize(
        "rows, expected",
        [
            ([[2, 1], [1, 2]], 3),
            ([[10, 3], [3, 2]], 11),
            ([], 1),
            ([[0, 1], [1, 0]], -1),
            ([[0, 0, 1], [0, 1, 0], [1, 0, 0]], -1),
        ],
    )
    def test_values(self, rows, expected):
        """Test determinants of hand-checked matrices."""
        assert det(IntSymMatrix.from_rows(rows)) == expected

    def test_b_family(self):
        """Test det(bJ + I) = kb + 1."""
        for k, b in itertools.product(range(1, 5), range(0, 4)):
            assert det(b_family(k, b)) == k * b + 1

    @settings(max_examples=200, deadline=None)
    @given(symmetric_matrices(max_size=4))
    def test_matches_permutation_sum(self, matrix):
        """Test Bareiss against the permutation-sum expansion."""
        assert det(matrix) == permutation_det(matrix)

    @settings(max_examples=100, deadline=None)
    @given(symmetric_matrices(max_size=4), st.data())
    def test_principal_submatrix_det(self, matrix, data):
        indices = data.draw(st.sets(st.integers(0, matrix.size - 1)))
        sub = principal_submatrix(matrix, indices)
        assert det(sub) == permutation_det(sub)


class TestAdjugate:
    """Tests for the adjugate."""

    def test_identity(self):
        assert adjugate(IntSymMatrix.identity(2)) == IntSymMatrix.identity(2)

    def test_tenthree(self, k_tenthree):
        assert adjugate(k_tenthree).to_lists() == [[2, -3], [-3, 10]]

    def test_one_by_one(self):
        assert adjugate(IntSymMatrix.from_rows([[7]])).to_lists() == [[1]]

    def test_empty(self):
        assert adjugate(IntSymMatrix.empty()).size == 0

    @settings(max_examples=150, deadline=None)
    @given(symmetric_matrices(max_size=6))
    def test_defining_identity(self, matrix):
        """Test M adj(M) = det(M) I for random symmetric matrices."""
        product = matrix.as_rational() @ adjugate(matrix).as_rational()
        assert product == RatMatrix.identity(matrix.size).scale(det(matrix))

    def test_large_matrix_uses_inverse_path(self):
        """Test a size-7 matrix, which goes through inverse * det."""
        rng = random.Random(7)
        rows = [[0] * 7 for _ in range(7)]
        for i in range(7):
            for j in range(i, 7):
                rows[i][j] = rows[j][i] = rng.randint(-3, 3)
            rows[i][i] += 10
        matrix = IntSymMatrix.from_rows(rows)
        product = matrix.as_rational() @ adjugate(matrix).as_rational()
        assert product == RatMatrix.identity(7).scale(det(matrix))


class TestInverse:
    """Tests for the exact inverse."""

    def test_tenthree(self, k_tenthree):
        inv = inverse(k_tenthree)
        assert inv.entries == (
            (Fraction(2, 11), Fraction(-3, 11)),
            (Fraction(-3, 11), Fraction(10, 11)),
        )

    def test_identity(self):
        assert inverse(IntSymMatrix.identity(3)) == RatMatrix.identity(3)

    def test_one_by_one(self):
        assert inverse(IntSymMatrix.from_rows([[2]])).entries == ((Fraction(1, 2),),)

    def test_singular(self):
        """Test that a singular matrix raises."""
        with pytest.raises(SingularMatrixError):
            inverse(IntSymMatrix.from_rows([[1, 1], [1, 1]]))

    @settings(max_examples=100, deadline=None)
    @given(symmetric_matrices(max_size=5))
    def test_inverse_times_matrix(self, matrix):
        assume(det(matrix) != 0)
        assert inverse(matrix) @ matrix.as_rational() == RatMatrix.identity(matrix.size)


# ========================================
# Sums and submatrices
# ========================================


class TestSums:
    """Tests for entry and column sums."""

    def test_entry_sum_tenthree(self, k_tenthree):
        assert entry_sum(inverse(k_tenthree)) == Fraction(6, 11)

    def test_entry_sum_b_family(self, k_b1):
        assert entry_sum(inverse(k_b1)) == Fraction(2, 3)

    def test_entry_sum_empty(self):
        assert entry_sum(IntSymMatrix.empty()) == 0

    def test_column_sums(self, k_tenthree, k_b1):
        assert column_sums(inverse(k_tenthree)) == (Fraction(-1, 11), Fraction(7, 11))
        assert column_sums(inverse(k_b1)) == (Fraction(1, 3), Fraction(1, 3))
        assert column_sums(RatMatrix.identity(2)) == (1, 1)

    def test_column_sums_add_up(self, k_tenthree):
        inv = inverse(k_tenthree)
        assert sum(column_sums(inv)) == entry_sum(inv)


class TestSubmatrices:
    """Tests for principal submatrices and index sets."""

    def test_single_index(self, k_tenthree):
        assert principal_submatrix(k_tenthree, [0]).to_lists() == [[10]]

    def test_full_index_set(self, k_tenthree):
        assert principal_submatrix(k_tenthree, [0, 1]) == k_tenthree

    def test_empty_index_set(self, k_tenthree):
        assert principal_submatrix(k_tenthree, []).size == 0

    def test_out_of_range(self, k_tenthree):
        with pytest.raises(InvalidInputError):
            principal_submatrix(k_tenthree, [2])

    def test_complement(self):
        assert complement((1,), 3) == (0, 2)

    def test_subsets_bitmask_order(self):
        assert subsets(2) == [(), (0,), (1,), (0, 1)]


# ========================================
# Positive semidefiniteness
# ========================================


class TestPsd:
    """Tests for the principal-minor PSD test."""

    @pytest.mark.parametrize(
        "rows, expected",
        [
            ([[9, 3], [3, 1]], True),
            ([[0, 1], [1, 0]], False),
            ([[1]], True),
            ([[1, 1], [1, 1]], True),
            # leading minors are >= 0 but the (2,2) minor is negative
            ([[0, 0], [0, -1]], False),
        ],
    )
    def test_values(self, rows, expected):
        assert is_psd(IntSymMatrix.from_rows(rows)) is expected

    def test_size_limit(self):
        with pytest.raises(InvalidInputError):
            is_psd(IntSymMatrix.identity(3), max_size=2)

    @settings(max_examples=150, deadline=None)
    @given(symmetric_matrices(max_size=5, low=-2, high=3))
    def test_agrees_with_principal_minors(self, matrix):
        minors = principal_minors(matrix)
        assert is_psd(matrix) == all(value >= 0 for value in minors.values())

    @settings(max_examples=50, deadline=None)
    @given(symmetric_matrices(max_size=4, low=-3, high=3))
    def test_gram_matrices_are_psd(self, matrix):
        """Test that M^T M is always PSD."""
        gram = matrix.as_rational() @ matrix.as_rational()
        assert is_psd(IntSymMatrix.from_rows([[int(v) for v in row] for row in gram.entries]))


# ========================================
# Column-sum identity
# ========================================


class TestColumnSumIdentity:
    """det(K_{i^c}) / det(K) (|K^-1| - |K_{i^c}^-1|) = C_i^2."""

    def test_b_family(self, k_b1):
        inv = inverse(k_b1)
        rest = principal_submatrix(k_b1, [1])
        lhs = Fraction(det(rest), det(k_b1)) * (entry_sum(inv) - entry_sum(inverse(rest)))
        assert lhs == Fraction(1, 9)

    def test_random_matrices(self):
        """Test 100 random invertible matrices of sizes 2 to 5."""
        rng = random.Random(2024)
        checked = 0
        while checked < 100:
            size = rng.randint(2, 5)
            rows = [[0] * size for _ in range(size)]
            for i in range(size):
                for j in range(i, size):
                    rows[i][j] = rows[j][i] = rng.randint(-4, 6)
            matrix = IntSymMatrix.from_rows(rows)
            determinant = det(matrix)
            if determinant == 0:
                continue
            inv = inverse(matrix)
            sums = column_sums(inv)
            for i in range(size):
                rest = principal_submatrix(matrix, complement([i], size))
                # det(K_{i^c}) |K_{i^c}^-1| = |adj K_{i^c}| also covers singular K_{i^c}
                lhs = (det(rest) * entry_sum(inv) - entry_sum(adjugate(rest))) / determinant
                assert lhs == sums[i] ** 2
                if det(rest):
                    direct = Fraction(det(rest), determinant) * (
                        entry_sum(inv) - entry_sum(inverse(rest))
                    )
                    assert direct == sums[i] ** 2
            checked += 1
