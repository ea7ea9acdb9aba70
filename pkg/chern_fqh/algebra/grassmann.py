"""
Grassmann algebra over the rationals with Berezin integration.

Monomials are bitmasks over a fixed generator ordering

    psi_1^1, psibar_1^1, psi_1^2, psibar_1^2, ..., psi_k^g, psibar_k^g,
    alpha^1, beta^1, ..., alpha^g, beta^g

so a set bit at position a stands for chi_a and every stored monomial is the
ordered product chi_{a_1} ... chi_{a_q} with a_1 < ... < a_q. Layers and cycles
are 0-based in code.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from ..errors import GrassmannError, InvalidInputError
from .exactlinalg import (
    IntSymMatrix,
    adjugate,
    complement,
    det,
    entry_sum,
    principal_submatrix,
    subsets,
)

logger = logging.getLogger(__name__)


class GeneratorKind(enum.Enum):
    PSI = "psi"
    PSIBAR = "psibar"
    ALPHA = "alpha"
    BETA = "beta"


@dataclass(frozen=True)
class GeneratorIndex:
    """A generator: layer is None for alpha/beta."""

    kind: GeneratorKind
    cycle: int
    layer: int | None = None

    def label(self) -> str:
        if self.layer is None:
            return f"{self.kind.value}^{self.cycle + 1}"
        return f"{self.kind.value}_{self.layer + 1}^{self.cycle + 1}"


@dataclass(frozen=True)
class GeneratorLayout:
    """Canonical positions of the 2gk + 2g generators for k layers and genus g."""

    layers: int
    genus: int

    @property
    def size(self) -> int:
        return 2 * self.genus * self.layers + 2 * self.genus

    def position(self, generator: GeneratorIndex) -> int:
        r = generator.cycle
        if not 0 <= r < self.genus:
            raise InvalidInputError(f"cycle {r} out of range for genus {self.genus}")
        if generator.kind in (GeneratorKind.PSI, GeneratorKind.PSIBAR):
            i = generator.layer
            if i is None or not 0 <= i < self.layers:
                raise InvalidInputError(f"layer {i} out of range for {self.layers} layers")
            base = 2 * (i * self.genus + r)
            return base + (generator.kind is GeneratorKind.PSIBAR)
        base = 2 * self.genus * self.layers + 2 * r
        return base + (generator.kind is GeneratorKind.BETA)

    def generator(self, position: int) -> GeneratorIndex:
        if position < 2 * self.genus * self.layers:
            pair, odd = divmod(position, 2)
            i, r = divmod(pair, self.genus)
            kind = GeneratorKind.PSIBAR if odd else GeneratorKind.PSI
            return GeneratorIndex(kind, r, i)
        r, odd = divmod(position - 2 * self.genus * self.layers, 2)
        return GeneratorIndex(GeneratorKind.BETA if odd else GeneratorKind.ALPHA, r)

    def psi(self, i: int, r: int) -> int:
        return self.position(GeneratorIndex(GeneratorKind.PSI, r, i))

    def psibar(self, i: int, r: int) -> int:
        return self.position(GeneratorIndex(GeneratorKind.PSIBAR, r, i))

    def alpha(self, r: int) -> int:
        return self.position(GeneratorIndex(GeneratorKind.ALPHA, r))

    def beta(self, r: int) -> int:
        return self.position(GeneratorIndex(GeneratorKind.BETA, r))

    def measure(self, r: int) -> list[int]:
        """D(psi^r, psibar^r) = dpsi_1^r dpsibar_1^r ... dpsi_k^r dpsibar_k^r."""
        out = []
        for i in range(self.layers):
            out.extend([self.psi(i, r), self.psibar(i, r)])
        return out

    def full_measure(self) -> list[int]:
        return [position for r in range(self.genus) for position in self.measure(r)]

    def cycle_mask(self, r: int) -> int:
        """Bitmask of the psi / psibar generators of cycle r."""
        return sum(1 << position for position in self.measure(r))

    def fermion_mask(self) -> int:
        return (1 << (2 * self.genus * self.layers)) - 1

    def describe(self, mask: int) -> str:
        if mask == 0:
            return "1"
        return "*".join(self.generator(a).label() for a in range(self.size) if mask >> a & 1)


# ========================================
# Signs
# ========================================


def merge_sign(left: int, right: int) -> int:
    """Sign of reordering (monomial left)(monomial right) into sorted order."""
    inversions = 0
    rest = right
    while rest:
        low = rest & -rest
        # generators of ``left`` above this one must hop over it
        inversions += (left & ~((low << 1) - 1)).bit_count()
        rest ^= low
    return -1 if inversions & 1 else 1


def _degree(mask: int) -> int:
    return mask.bit_count()


# ========================================
# Elements
# ========================================


class GrassmannElement:
    """Finite sum of coefficient-weighted monomials; treated as immutable."""

    __slots__ = ("size", "terms")

    def __init__(self, size: int, terms: Mapping[int, Fraction | int] | None = None):
        self.size = size
        clean: dict[int, Fraction] = {}
        for mask, coefficient in (terms or {}).items():
            if mask >> size:
                raise GrassmannError(f"monomial {mask:#b} uses generators beyond {size}")
            if coefficient:
                clean[mask] = Fraction(coefficient)
        self.terms = clean

    @classmethod
    def _trusted(cls, size: int, terms: dict[int, Fraction]) -> GrassmannElement:
        element = cls.__new__(cls)
        element.size = size
        element.terms = terms
        return element

    @classmethod
    def scalar(cls, size: int, value: Fraction | int) -> GrassmannElement:
        return cls(size, {0: value})

    @classmethod
    def generator(cls, size: int, position: int) -> GrassmannElement:
        if not 0 <= position < size:
            raise GrassmannError(f"generator {position} out of range for {size} generators")
        return cls(size, {1 << position: 1})

    @classmethod
    def product_of(cls, size: int, positions: Sequence[int], coefficient: Fraction | int = 1) -> GrassmannElement:
        """coefficient * chi_{positions[0]} chi_{positions[1]} ... in the given order."""
        element = cls.scalar(size, coefficient)
        for position in positions:
            element = element * cls.generator(size, position)
        return element

    def _check(self, other: GrassmannElement) -> None:
        if self.size != other.size:
            raise GrassmannError(
                f"elements live in different algebras ({self.size} vs {other.size} generators)"
            )

    def __add__(self, other: GrassmannElement) -> GrassmannElement:
        self._check(other)
        out = dict(self.terms)
        for mask, coefficient in other.terms.items():
            value = out.get(mask, 0) + coefficient
            if value:
                out[mask] = value
            else:
                out.pop(mask, None)
        return GrassmannElement._trusted(self.size, out)

    def __neg__(self) -> GrassmannElement:
        return GrassmannElement._trusted(self.size, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: GrassmannElement) -> GrassmannElement:
        return self + (-other)

    def __mul__(self, other: GrassmannElement | Fraction | int) -> GrassmannElement:
        if isinstance(other, GrassmannElement):
            return gmul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Fraction | int) -> GrassmannElement:
        return self.scale(other)

    def scale(self, factor: Fraction | int) -> GrassmannElement:
        if not factor:
            return GrassmannElement._trusted(self.size, {})
        return GrassmannElement._trusted(self.size, {m: c * factor for m, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        return self.size == other.size and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.size, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*[{m:b}]" for m, c in sorted(self.terms.items())) or "0"
        return f"GrassmannElement({self.size}: {body})"

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, mask: int) -> Fraction:
        return self.terms.get(mask, Fraction(0))

    @property
    def constant(self) -> Fraction:
        return self.coefficient(0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_even(self) -> bool:
        return all(_degree(mask) % 2 == 0 for mask in self.terms)


def gmul(x: GrassmannElement, y: GrassmannElement, require: int = 0) -> GrassmannElement:
    """
    Signed product; chi_a chi_b = -chi_b chi_a and chi_a^2 = 0.

    With ``require`` set, only products whose monomial contains every generator
    of that mask are kept (the others cannot survive a later full integration).
    """
    x._check(y)
    out: dict[int, Fraction] = {}
    for mx, cx in x.terms.items():
        for my, cy in y.terms.items():
            if mx & my:
                continue
            mask = mx | my
            if mask & require != require:
                continue
            value = out.get(mask, 0) + merge_sign(mx, my) * cx * cy
            if value:
                out[mask] = value
            else:
                out.pop(mask, None)
    return GrassmannElement._trusted(x.size, out)


def gpow(x: GrassmannElement, exponent: int) -> GrassmannElement:
    if exponent < 0:
        raise GrassmannError("negative powers are not defined in a Grassmann algebra")
    result = GrassmannElement.scalar(x.size, 1)
    for _ in range(exponent):
        result = gmul(result, x)
        if result.is_zero():
            break
    return result


def gexp(x: GrassmannElement) -> GrassmannElement:
    """sum_j x^j / j!; finite because the even nilpotent part dies out."""
    if not x.is_even():
        raise GrassmannError("gexp is only defined for even elements")
    if x.constant:
        raise GrassmannError("gexp needs a zero constant term")
    result = GrassmannElement.scalar(x.size, 1)
    term = result
    j = 0
    while True:
        j += 1
        term = gmul(term, x).scale(Fraction(1, j))
        if term.is_zero():
            break
        result = result + term
    logger.debug(f"gexp of {len(x)} terms stopped at power {j} with {len(result)} terms")
    return result


# ========================================
# Berezin integration
# ========================================


def berezin(x: GrassmannElement, position: int) -> GrassmannElement:
    """
    int dchi_a on each ordered monomial: (-1)^(delta - 1) times the monomial with
    chi_a removed, where delta is the slot of chi_a; zero when chi_a is absent.
    """
    if not 0 <= position < x.size:
        raise GrassmannError(f"generator {position} out of range for {x.size} generators")
    bit = 1 << position
    below = bit - 1
    out: dict[int, Fraction] = {}
    for mask, coefficient in x.terms.items():
        if not mask & bit:
            continue
        sign = -1 if (mask & below).bit_count() & 1 else 1
        out[mask ^ bit] = sign * coefficient
    return GrassmannElement._trusted(x.size, out)


def berezin_multi(x: GrassmannElement, measure: Sequence[int]) -> GrassmannElement:
    """int dchi_{m_1} ... dchi_{m_n} x, rightmost differential applied first."""
    result = x
    for position in reversed(measure):
        result = berezin(result, position)
        if result.is_zero():
            break
    return result


# ========================================
# Fermionic Gaussians
# ========================================


def block_action(matrix: IntSymMatrix, r: int, layout: GeneratorLayout) -> GrassmannElement:
    """(psibar^r)^T K psi^r - lambdabar^r psi^r - psibar^r lambda^r."""
    size = layout.size
    action = GrassmannElement(size)
    for i in range(matrix.size):
        for j in range(matrix.size):
            if matrix[i, j]:
                action = action + GrassmannElement.product_of(
                    size, [layout.psibar(i, r), layout.psi(j, r)], matrix[i, j]
                )
    for i in range(matrix.size):
        action = action - GrassmannElement.product_of(size, [layout.alpha(r), layout.psi(i, r)])
        action = action - GrassmannElement.product_of(size, [layout.psibar(i, r), layout.beta(r)])
    return action


def pair_insertion(indices: Iterable[int], r: int, layout: GeneratorLayout) -> GrassmannElement:
    """(psibar^r psi^r)_I = prod_{i in I} psibar_i^r psi_i^r."""
    element = GrassmannElement.scalar(layout.size, 1)
    for i in sorted(set(indices)):
        element = element * GrassmannElement.product_of(
            layout.size, [layout.psibar(i, r), layout.psi(i, r)]
        )
    return element


def theta_layer(i: int, layout: GeneratorLayout) -> GrassmannElement:
    """theta_i = sum_r psibar_i^r psi_i^r."""
    element = GrassmannElement(layout.size)
    for r in range(layout.genus):
        element = element + pair_insertion([i], r, layout)
    return element


def _check_indices(matrix: IntSymMatrix, indices: Iterable[int]) -> tuple[int, ...]:
    chosen = tuple(sorted(set(indices)))
    for i in chosen:
        if not 0 <= i < matrix.size:
            raise InvalidInputError(f"insertion index {i} out of range for {matrix.size} layers")
    return chosen


def wick_closed(
    matrix: IntSymMatrix,
    indices: Iterable[int],
    r: int = 0,
    *,
    layout: GeneratorLayout | None = None,
    exponent_sign: int = -1,
) -> GrassmannElement:
    """
    det(K_{I^c}) e^{-|K_{I^c}^{-1}| alpha^r beta^r} = det(K_{I^c}) - |K_{I^c}^#| alpha^r beta^r.

    Written with the adjugate the right-hand side is a polynomial in the entries
    of K, so it stays valid when K_{I^c} is singular. ``exponent_sign=+1`` flips
    the exponent and exists only as a negative control.
    """
    chosen = _check_indices(matrix, indices)
    layout = layout or GeneratorLayout(matrix.size, r + 1)
    rest = principal_submatrix(matrix, complement(chosen, matrix.size))
    pair = (1 << layout.alpha(r)) | (1 << layout.beta(r))
    return GrassmannElement(
        layout.size,
        {0: det(rest), pair: exponent_sign * entry_sum(adjugate(rest))},
    )


def wick_bruteforce(
    matrix: IntSymMatrix,
    indices: Iterable[int],
    r: int = 0,
    *,
    layout: GeneratorLayout | None = None,
) -> GrassmannElement:
    """int D(psi^r, psibar^r) (psibar^r psi^r)_I e^{S_r} by explicit expansion."""
    chosen = _check_indices(matrix, indices)
    layout = layout or GeneratorLayout(matrix.size, r + 1)
    integrand = pair_insertion(chosen, r, layout) * gexp(block_action(matrix, r, layout))
    return berezin_multi(integrand, layout.measure(r))


def wick_bruteforce_table(
    matrix: IntSymMatrix, r: int = 0, *, layout: GeneratorLayout | None = None
) -> dict[tuple[int, ...], GrassmannElement]:
    """``wick_bruteforce`` for every insertion set, sharing one exponential."""
    layout = layout or GeneratorLayout(matrix.size, r + 1)
    exponential = gexp(block_action(matrix, r, layout))
    measure = layout.measure(r)
    table = {}
    for subset in subsets(matrix.size):
        table[subset] = berezin_multi(pair_insertion(subset, r, layout) * exponential, measure)
    return table
