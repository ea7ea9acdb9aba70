"""
Exact linear algebra over the integers and the rationals.

Scalars are ``fractions.Fraction`` values (always in lowest terms with a positive
denominator). Matrices are small immutable row-major tuples: the symmetric
integer coupling matrix K, its principal submatrices K_I, and rational matrices
such as K^{-1}. Index sets are 0-based throughout the library.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidInputError, SingularMatrixError

logger = logging.getLogger(__name__)

Rational = Fraction

# Above this size the adjugate comes from inverse * det instead of cofactors
COFACTOR_MAX_SIZE = 6


@dataclass(frozen=True)
class IntSymMatrix:
    """Symmetric integer matrix. The 0x0 matrix is a legal value."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        size = len(self.entries)
        for i, row in enumerate(self.entries):
            if len(row) != size:
                raise InvalidInputError(f"row {i} has {len(row)} entries, expected {size}")
            for j, value in enumerate(row):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise InvalidInputError(f"entry ({i}, {j}) is not an integer: {value!r}")
        for i in range(size):
            for j in range(i + 1, size):
                if self.entries[i][j] != self.entries[j][i]:
                    raise InvalidInputError(
                        f"matrix is not symmetric: entry ({i}, {j}) = {self.entries[i][j]} "
                        f"but ({j}, {i}) = {self.entries[j][i]}"
                    )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> IntSymMatrix:
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, size: int) -> IntSymMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(size)) for i in range(size)))

    @classmethod
    def empty(cls) -> IntSymMatrix:
        return cls(())

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(self.size))

    def minus_identity(self) -> IntSymMatrix:
        return IntSymMatrix(
            tuple(
                tuple(value - int(i == j) for j, value in enumerate(row))
                for i, row in enumerate(self.entries)
            )
        )

    def as_rational(self) -> RatMatrix:
        return RatMatrix(tuple(tuple(Fraction(v) for v in row) for row in self.entries), self.size)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class RatMatrix:
    """Dense rational matrix."""

    entries: tuple[tuple[Fraction, ...], ...]
    cols: int

    @property
    def rows(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, size: int) -> RatMatrix:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size)), size)

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i][j]

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise InvalidInputError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        product = tuple(
            tuple(
                sum((self.entries[i][t] * other.entries[t][j] for t in range(self.cols)), Fraction(0))
                for j in range(other.cols)
            )
            for i in range(self.rows)
        )
        return RatMatrix(product, other.cols)

    def apply(self, vector: Sequence[Fraction | int]) -> tuple[Fraction, ...]:
        """Matrix-vector product."""
        if len(vector) != self.cols:
            raise InvalidInputError(f"vector of length {len(vector)} does not match {self.cols} columns")
        return tuple(
            sum((entry * Fraction(v) for entry, v in zip(row, vector)), Fraction(0))
            for row in self.entries
        )

    def scale(self, factor: Fraction | int) -> RatMatrix:
        return RatMatrix(tuple(tuple(v * factor for v in row) for row in self.entries), self.cols)


# ========================================
# Determinant, adjugate, inverse
# ========================================


def _bareiss(rows: list[list[int]]) -> int:
    """Fraction-free elimination; every intermediate stays an integer."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(row) for row in rows]
    sign = 1
    previous = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact by Sylvester's identity
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) // previous
        previous = m[k][k]
    return sign * m[n - 1][n - 1]


def det(matrix: IntSymMatrix) -> int:
    """Exact determinant; det of the empty matrix is 1."""
    return _bareiss(matrix.to_lists())


def _minor(rows: list[list[int]], skip_row: int, skip_col: int) -> list[list[int]]:
    return [
        [value for j, value in enumerate(row) if j != skip_col]
        for i, row in enumerate(rows)
        if i != skip_row
    ]


def _cofactor_adjugate(matrix: IntSymMatrix) -> IntSymMatrix:
    rows = matrix.to_lists()
    n = matrix.size
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            # transpose of the cofactor matrix
            value = (-1) ** (i + j) * _bareiss(_minor(rows, j, i))
            adj[i][j] = value
            adj[j][i] = value
    return IntSymMatrix.from_rows(adj)


def adjugate(matrix: IntSymMatrix) -> IntSymMatrix:
    """
    Adjugate K^# with K K^# = det(K) I.

    The 1x1 adjugate is [[1]] and the adjugate of the empty matrix is empty.
    """
    n = matrix.size
    if n == 0:
        return IntSymMatrix.empty()
    if n == 1:
        return IntSymMatrix(((1,),))
    if n <= COFACTOR_MAX_SIZE:
        return _cofactor_adjugate(matrix)
    determinant = det(matrix)
    if determinant == 0:
        return _cofactor_adjugate(matrix)
    scaled = _gauss_jordan_inverse(matrix).scale(determinant)
    return IntSymMatrix.from_rows([[int(v) for v in row] for row in scaled.entries])


def _gauss_jordan_inverse(matrix: IntSymMatrix) -> RatMatrix:
    n = matrix.size
    x = [[Fraction(v) for v in row] for row in matrix.entries]
    y = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        pivot = next((r for r in range(i, n) if x[r][i] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is not invertible")
        if pivot != i:
            x[i], x[pivot] = x[pivot], x[i]
            y[i], y[pivot] = y[pivot], y[i]
        scale = x[i][i]
        x[i] = [v / scale for v in x[i]]
        y[i] = [v / scale for v in y[i]]
        for r in range(n):
            if r != i and x[r][i] != 0:
                factor = x[r][i]
                x[r] = [a - factor * b for a, b in zip(x[r], x[i])]
                y[r] = [a - factor * b for a, b in zip(y[r], y[i])]
    return RatMatrix(tuple(tuple(row) for row in y), n)


def inverse(matrix: IntSymMatrix) -> RatMatrix:
    """Exact inverse adjugate / det."""
    determinant = det(matrix)
    if determinant == 0:
        raise SingularMatrixError(f"matrix {matrix.to_lists()} is singular")
    adj = adjugate(matrix)
    return RatMatrix(
        tuple(tuple(Fraction(v, determinant) for v in row) for row in adj.entries),
        matrix.size,
    )


# ========================================
# Entry sums
# ========================================


def entry_sum(matrix: RatMatrix | IntSymMatrix) -> Fraction:
    """|M|, the sum of all entries; 0 for the empty matrix."""
    return sum((Fraction(v) for row in matrix.entries for v in row), Fraction(0))


def column_sums(matrix: RatMatrix) -> tuple[Fraction, ...]:
    """(C_1, ..., C_k) with C_i = sum_j M_ji."""
    return tuple(
        sum((matrix.entries[j][i] for j in range(matrix.rows)), Fraction(0))
        for i in range(matrix.cols)
    )


# ========================================
# Submatrices and positivity
# ========================================


def principal_submatrix(matrix: IntSymMatrix, indices: Iterable[int]) -> IntSymMatrix:
    """K_I: keep the rows and columns in ``indices`` (0-based)."""
    chosen = sorted(set(indices))
    for i in chosen:
        if not 0 <= i < matrix.size:
            raise InvalidInputError(f"index {i} out of range for a {matrix.size}x{matrix.size} matrix")
    return IntSymMatrix(tuple(tuple(matrix.entries[i][j] for j in chosen) for i in chosen))


def complement(indices: Iterable[int], size: int) -> tuple[int, ...]:
    """I^c inside {0, ..., size - 1}."""
    chosen = set(indices)
    return tuple(i for i in range(size) if i not in chosen)


def subsets(size: int) -> list[tuple[int, ...]]:
    """All subsets of {0, ..., size - 1}, ordered by bitmask."""
    return [
        tuple(i for i in range(size) if mask >> i & 1)
        for mask in range(1 << size)
    ]


def principal_minors(matrix: IntSymMatrix) -> dict[tuple[int, ...], int]:
    return {subset: det(principal_submatrix(matrix, subset)) for subset in subsets(matrix.size)}


def is_psd(matrix: IntSymMatrix, max_size: int | None = None) -> bool:
    """
    Positive semidefiniteness, decided exactly.

    A symmetric matrix is PSD iff every principal minor (not only the leading
    ones) is non-negative; all 2^k subsets are checked.
    """
    if max_size is not None and matrix.size > max_size:
        raise InvalidInputError(
            f"PSD test by principal minors is limited to size {max_size}, got {matrix.size}"
        )
    for subset in itertools.chain.from_iterable(
        itertools.combinations(range(matrix.size), r) for r in range(1, matrix.size + 1)
    ):
        if det(principal_submatrix(matrix, subset)) < 0:
            logger.debug(f"principal minor on {subset} is negative")
            return False
    return True
