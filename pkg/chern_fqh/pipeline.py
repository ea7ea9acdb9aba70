"""
Chern character pipelines.

Three independent routes to ch(V_{K,g,d,n}) = p_*(e^{c_1(L_K)} td(prod_i S^{n_i} C)):

* ``ch_bruteforce``: expand prod_i f_i(theta_i) prod_r e^{S_r} in the Grassmann
  algebra and Berezin-integrate every psi / psibar generator.
* ``ch_wick_assembly``: expand prod_i f_i into insertion monomials and evaluate
  each cycle block with the closed Wick formula.
* ``ch_theorem3``: the closed multi-index sum over (v, w); ``ch_theorem1`` is its
  p = 0 specialization det(K)^g e^{-|K^{-1}| theta}.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .algebra.exactlinalg import (
    adjugate,
    complement,
    det,
    entry_sum,
    inverse,
    principal_submatrix,
    subsets,
)
from .algebra.grassmann import (
    GeneratorLayout,
    GrassmannElement,
    berezin_multi,
    block_action,
    gexp,
    gmul,
    gpow,
    pair_insertion,
    theta_layer,
    wick_closed,
)
from .algebra.series import (
    BinomialConvention,
    FiPolynomial,
    binomial,
    f_polynomial,
    series_oracle_f,
)
from .config import config
from .errors import ConsistencyError, InvalidInputError, SingularMatrixError, SizeGuardError
from .models import ChernCharacter, Configuration, MultiIndexTerm

logger = logging.getLogger(__name__)


def default_convention() -> BinomialConvention:
    return BinomialConvention.parse(config.CONVENTION)


# ========================================
# Theta bookkeeping
# ========================================


def theta_collect(x: GrassmannElement, layout: GeneratorLayout) -> ChernCharacter:
    """
    Read an alpha/beta element as a polynomial in theta = sum_r alpha^r beta^r.

    theta^m = m! sum_{|F| = m} (alpha beta)^F, so the coefficient of every
    (alpha beta)^F with |F| = m must be the same number, and c_m is it over m!.
    """
    g = layout.genus
    fermions = layout.fermion_mask()
    pair_masks = [(1 << layout.alpha(r)) | (1 << layout.beta(r)) for r in range(g)]
    for mask in x.terms:
        if mask & fermions:
            raise ConsistencyError(f"stray fermion generators in {layout.describe(mask)}")
        for pair in pair_masks:
            if mask & pair and mask & pair != pair:
                raise ConsistencyError(f"unpaired alpha/beta generator in {layout.describe(mask)}")

    coefficients = []
    for m in range(g + 1):
        values = set()
        for cycles in itertools.combinations(range(g), m):
            mask = sum(pair_masks[r] for r in cycles)
            values.add(x.coefficient(mask))
        if len(values) > 1:
            raise ConsistencyError(
                f"coefficients of (alpha beta)^F with |F| = {m} are not uniform: "
                f"{sorted(str(v) for v in values)}"
            )
        coefficients.append(values.pop() / math.factorial(m))
    return ChernCharacter(g, tuple(coefficients))


def _check_particles(cfg: Configuration) -> None:
    for i, n_i in enumerate(cfg.n):
        if n_i < cfg.g:
            raise InvalidInputError(
                f"layer {i + 1} has n = {n_i} < g = {cfg.g}; the Todd pushforward needs n_i >= g"
            )


def _layer_polynomials(cfg: Configuration, convention: BinomialConvention | None) -> list[FiPolynomial]:
    p = cfg.p
    if convention is None:
        return [series_oracle_f(cfg.n[i], cfg.g, p[i], cfg.g, layer=i) for i in range(cfg.k)]
    return [
        f_polynomial(cfg.n[i], cfg.g, p[i], convention=convention, max_degree=cfg.g, layer=i)
        for i in range(cfg.k)
    ]


# ========================================
# Brute force
# ========================================


def ch_bruteforce(cfg: Configuration, *, max_generators: int | None = None) -> ChernCharacter:
    """
    Full Berezin evaluation of

        int prod_r D(psi^r, psibar^r) prod_i f_i(sum_r psibar_i^r psi_i^r) prod_r e^{S_r}

    with f_i obtained by pure series extraction.
    """
    limit = config.MAX_GENERATORS if max_generators is None else max_generators
    layout = GeneratorLayout(cfg.k, cfg.g)
    if layout.size > limit:
        raise SizeGuardError(
            f"brute force needs {layout.size} generators (2gk + 2g) but the guard is {limit}"
        )
    _check_particles(cfg)
    size = layout.size

    layers = GrassmannElement.scalar(size, 1)
    for i, f_i in enumerate(_layer_polynomials(cfg, None)):
        theta_i = theta_layer(i, layout)
        value = GrassmannElement(size)
        for a, coefficient in enumerate(f_i.coefficients):
            if coefficient:
                value = value + gpow(theta_i, a).scale(coefficient)
        layers = layers * value
        if layers.is_zero():
            logger.debug(f"layer {i + 1} polynomial kills the integrand")
            return ChernCharacter.zero(cfg.g)

    # block r is the last factor carrying cycle-r fermions, so a monomial that
    # lacks any of them after this step integrates to zero
    integrand = layers
    required = 0
    for r in range(cfg.g):
        required |= layout.cycle_mask(r)
        integrand = gmul(integrand, gexp(block_action(cfg.K, r, layout)), require=required)
        logger.debug(f"brute force: {len(integrand)} terms after cycle {r + 1}")
    logger.debug(
        f"brute force: {size} generators, {len(layers)} layer terms, "
        f"{len(integrand)} surviving terms"
    )
    return theta_collect(berezin_multi(integrand, layout.full_measure()), layout)


# ========================================
# Wick assembly
# ========================================


def ch_wick_assembly(
    cfg: Configuration,
    *,
    convention: BinomialConvention | None = None,
    exponent_sign: int = -1,
) -> ChernCharacter:
    """
    sum over (I_1, ..., I_g) of prod_i a_i! [x^{a_i}] f_i times
    prod_r det(K_{I_r^c}) e^{-|K_{I_r^c}^{-1}| alpha^r beta^r}.
    """
    convention = convention or default_convention()
    _check_particles(cfg)
    layout = GeneratorLayout(cfg.k, cfg.g)
    polynomials = _layer_polynomials(cfg, convention)
    all_subsets = subsets(cfg.k)
    closed = {
        (subset, r): wick_closed(cfg.K, subset, r, layout=layout, exponent_sign=exponent_sign)
        for subset in all_subsets
        for r in range(cfg.g)
    }

    total = GrassmannElement(layout.size)
    for choice in itertools.product(all_subsets, repeat=cfg.g):
        counts = [sum(i in subset for subset in choice) for i in range(cfg.k)]
        weight = Fraction(1)
        for i, a_i in enumerate(counts):
            weight *= math.factorial(a_i) * polynomials[i][a_i]
            if not weight:
                break
        if not weight:
            continue
        term = GrassmannElement.scalar(layout.size, weight)
        for r, subset in enumerate(choice):
            term = term * closed[(subset, r)]
        total = total + term
    return theta_collect(total, layout)


# ========================================
# Closed forms
# ========================================


def ch_theorem1(cfg: Configuration) -> ChernCharacter:
    """det(K)^g e^{-|K^{-1}| theta}, valid when p = 0."""
    if any(cfg.p):
        raise InvalidInputError(f"ch_theorem1 needs p = 0, got p = {list(cfg.p)}")
    determinant = det(cfg.K)
    if determinant == 0:
        raise SingularMatrixError("ch_theorem1 needs det(K) != 0")
    s = entry_sum(inverse(cfg.K))
    return ChernCharacter(
        cfg.g,
        tuple(
            Fraction(determinant) ** cfg.g * (-s) ** m / math.factorial(m)
            for m in range(cfg.g + 1)
        ),
    )


def _multinomial(counts: Sequence[int]) -> int:
    out = math.factorial(sum(counts))
    for count in counts:
        out //= math.factorial(count)
    return out


def enumerate_terms(k: int, g: int, bounds: Sequence[int]) -> Iterator[MultiIndexTerm]:
    """
    Every (v, w) with |v| + |w| = g over the 2^k subsets, skipping any term that
    gives some layer i more than bounds[i] insertions.
    """
    all_subsets = subsets(k)
    slots = [(subset, "v") for subset in all_subsets] + [(subset, "w") for subset in all_subsets]
    counts = [0] * len(slots)
    layer_counts = [0] * k

    def place(slot: int, remaining: int) -> Iterator[MultiIndexTerm]:
        subset = slots[slot][0]
        if slot == len(slots) - 1:
            choices = [remaining]
        else:
            choices = list(range(remaining + 1))
        for c in choices:
            if any(layer_counts[i] + c > bounds[i] for i in subset):
                break
            counts[slot] = c
            for i in subset:
                layer_counts[i] += c
            if slot == len(slots) - 1:
                yield MultiIndexTerm(
                    v=tuple((slots[s][0], counts[s]) for s in range(len(slots)) if slots[s][1] == "v" and counts[s]),
                    w=tuple((slots[s][0], counts[s]) for s in range(len(slots)) if slots[s][1] == "w" and counts[s]),
                    layer_counts=tuple(layer_counts),
                )
            else:
                yield from place(slot + 1, remaining - c)
            for i in subset:
                layer_counts[i] -= c
            counts[slot] = 0

    yield from place(0, g)


def euler_characteristic(
    cfg: Configuration, *, convention: BinomialConvention | None = None
) -> ChernCharacter:
    """
    Closed form of the pushforward that the brute-force pipeline integrates:

    sum_{|v|+|w|=g} C_{v,w} prod_I |K_{I^c}^#|^{v_I} det(K_{I^c})^{w_I} (-theta)^{|v|} / |v|!

    with C_{v,w} = binom(|v|, v) binom(g - |v|, w) prod_i binom(n_i - g + p_i, p_i - a_i)
    and a_i = sum_{I containing i} (v_I + w_I).

    This is ch(V) only when no p_i is negative and the vanishing hypotheses hold;
    ch_theorem3 is the entry point for the bundle itself.
    """
    convention = convention or default_convention()
    if det(cfg.K) == 0:
        raise SingularMatrixError("the general Chern character formula needs det(K) != 0")
    g, k, p = cfg.g, cfg.k, cfg.p
    tops = [cfg.n[i] - g + p[i] for i in range(k)]

    bounds = []
    for i in range(k):
        if convention is BinomialConvention.TRUNCATED or tops[i] >= 0:
            # binom(top, p_i - a_i) vanishes once a_i > p_i
            bounds.append(min(p[i], g))
        else:
            bounds.append(g)
    if min(bounds, default=0) < 0:
        return ChernCharacter.zero(g)

    sharp_sums: dict[tuple[int, ...], int] = {}
    dets: dict[tuple[int, ...], int] = {}
    for subset in subsets(k):
        rest = principal_submatrix(cfg.K, complement(subset, k))
        sharp_sums[subset] = int(entry_sum(adjugate(rest)))
        dets[subset] = det(rest)

    coefficients = [Fraction(0)] * (g + 1)
    visited = 0
    for term in enumerate_terms(k, g, bounds):
        visited += 1
        layer_factor = 1
        for i in range(k):
            layer_factor *= binomial(tops[i], p[i] - term.layer_counts[i], convention)
            if not layer_factor:
                break
        if not layer_factor:
            continue
        value = _multinomial([c for _, c in term.v]) * _multinomial([c for _, c in term.w])
        value *= layer_factor
        for subset, count in term.v:
            value *= sharp_sums[subset] ** count
        for subset, count in term.w:
            value *= dets[subset] ** count
        m = term.v_total
        coefficients[m] += Fraction((-1) ** m * value, math.factorial(m))
    logger.debug(f"closed form: {visited} (v, w) terms visited for k={k} g={g}")
    return ChernCharacter(g, tuple(coefficients))


def ch_theorem3(
    cfg: Configuration, *, convention: BinomialConvention | None = None
) -> ChernCharacter:
    """
    ch(V) for any configuration: the zero class as soon as some p_i < 0, otherwise
    the closed-form sum of euler_characteristic.
    """
    if min(cfg.p, default=0) < 0:
        if det(cfg.K) == 0:
            raise SingularMatrixError("the general Chern character formula needs det(K) != 0")
        logger.debug(f"negative quasi-hole count {list(cfg.p)} forces the zero class")
        return ChernCharacter.zero(cfg.g)
    return euler_characteristic(cfg, convention=convention)


# ========================================
# Reconciliation
# ========================================


@dataclass(frozen=True)
class EquivalenceReport:
    """Outcome of running the independent pipelines on one configuration."""

    configuration: Configuration
    bruteforce: ChernCharacter
    theorem3: ChernCharacter
    wick: ChernCharacter | None = None

    @property
    def equal(self) -> bool:
        if self.bruteforce != self.theorem3:
            return False
        return self.wick is None or self.wick == self.bruteforce

    def to_dict(self) -> dict:
        out = {
            "configuration": self.configuration.to_dict(),
            "equal": self.equal,
            "bruteforce": self.bruteforce.to_strings(),
            "theorem3": self.theorem3.to_strings(),
        }
        if self.wick is not None:
            out["wick"] = self.wick.to_strings()
        return out


def verify_equivalence(
    cfg: Configuration,
    *,
    convention: BinomialConvention | None = None,
    exponent_sign: int = -1,
    include_wick: bool = True,
    max_generators: int | None = None,
) -> EquivalenceReport:
    """
    Run the brute-force and closed-form pipelines and compare them exactly.

    With some p_i < 0 the brute force still integrates the pushforward, so it is
    compared against euler_characteristic under the series convention instead of
    the zero class.
    """
    brute = ch_bruteforce(cfg, max_generators=max_generators)
    if min(cfg.p, default=0) < 0:
        convention = BinomialConvention.SERIES
        closed = euler_characteristic(cfg, convention=convention)
    else:
        closed = ch_theorem3(cfg, convention=convention)
    wick = None
    if include_wick:
        wick = ch_wick_assembly(cfg, convention=convention, exponent_sign=exponent_sign)
    report = EquivalenceReport(cfg, brute, closed, wick)
    if not report.equal:
        logger.warning(
            f"pipelines disagree on {cfg.to_dict()}: brute {brute.to_strings()}, "
            f"closed form {closed.to_strings()}, wick {wick.to_strings() if wick else None}"
        )
    return report
