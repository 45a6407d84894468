"""Graded-piece oracle for multi-graded Rees and extended Rees algebras.

A homogeneous ideal of B(I) = sum_n I_1^n_1 ... I_g^n_g t^n (with
I_i^k = R for k <= 0) is handled through its graded pieces, each a monomial
ideal of R.  Lengths of quotients of such ideals are sums of piece lengths
over a box of multidegrees, and multiplicities come from fitting those sums.
Nothing here uses a closed-form multiplicity formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import ContextMismatch, DegreeMismatch, HypothesisViolated, NegativeDegree, NonVanishingBoundary
from .hilbert import (
    DEFAULT_OPTIONS,
    FitOptions,
    MixedMultiplicityTable,
    fit_binomial_polynomial,
    top_coefficients,
    BinomialPolynomial,
)
from .monomials import MonomialIdeal, RingContext, ideal_sum, is_m_primary, power, product, quotient_length

Degree = Tuple[int, ...]


class Variant(str, Enum):
    REES = "rees"
    EXTENDED = "extended"


@dataclass(frozen=True)
class ReesContext:
    """The ring R(I) or B(I) attached to ideals I_1..I_g of ``ctx``."""

    ctx: RingContext
    ideals: Tuple[MonomialIdeal, ...]
    variant: Variant = Variant.EXTENDED

    def __post_init__(self):
        object.__setattr__(self, "ideals", tuple(self.ideals))
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.ideals:
            raise ValueError("need at least one ideal")
        for ideal in self.ideals:
            if ideal.ctx != self.ctx:
                raise ContextMismatch("ideals must live in the base ring")
            if ideal.is_zero or ideal.is_unit:
                raise HypothesisViolated(f"{ideal} must be nonzero and proper")

    @property
    def g(self) -> int:
        return len(self.ideals)

    @property
    def dim(self) -> int:
        """Krull dimension d + g."""
        return self.ctx.dim + self.g

    @property
    def extended(self) -> bool:
        return self.variant is Variant.EXTENDED

    def piece(self, k: Degree) -> MonomialIdeal:
        return context_piece(self, k)


def context_piece(rc: ReesContext, k: Degree) -> MonomialIdeal:
    """Degree-k piece of the algebra itself: prod_i I_i^max(k_i, 0)."""
    if len(k) != rc.g:
        raise ValueError(f"degree {k} should have {rc.g} entries")
    if not rc.extended and min(k) < 0:
        raise NegativeDegree(f"the Rees algebra has no piece in degree {k}")
    result = rc.ctx.unit_ideal()
    for ideal, e in zip(rc.ideals, k):
        if e > 0:
            result = product(result, power(ideal, e))
    return result


def _nonnegative(n: Degree) -> bool:
    return min(n) >= 0


@dataclass(frozen=True)
class MultiGradedIdeal:
    """Ideal sum_n gens(n) t^n B, stored as sorted (degree, coefficient ideal) terms.

    Different term lists can describe the same ideal; compare ideals through
    :func:`piece_eval`.
    """

    rees: ReesContext
    terms: Tuple[Tuple[Degree, MonomialIdeal], ...]

    @classmethod
    def build(cls, rees: ReesContext, support: Mapping[Degree, MonomialIdeal]) -> MultiGradedIdeal:
        terms = []
        for n, ideal in support.items():
            n = tuple(n)
            if len(n) != rees.g:
                raise ValueError(f"degree {n} should have {rees.g} entries")
            if ideal.ctx != rees.ctx:
                raise ContextMismatch("coefficient ideals must live in the base ring")
            if not rees.extended and not _nonnegative(n):
                raise NegativeDegree(f"Rees ideals have no generators in degree {n}")
            if not ideal.is_zero:
                terms.append((n, ideal))
        return cls(rees, tuple(sorted(terms, key=lambda t: t[0])))

    @property
    def support(self) -> Dict[Degree, MonomialIdeal]:
        return dict(self.terms)

    @property
    def width(self) -> int:
        """Largest |n_i| over the support."""
        return max((max(abs(x) for x in n) for n, _ in self.terms), default=0)

    def piece(self, n: Degree) -> MonomialIdeal:
        return piece_eval(self, n)

    def __mul__(self, other: MultiGradedIdeal) -> MultiGradedIdeal:
        return mg_product(self, other)

    def __add__(self, other: MultiGradedIdeal) -> MultiGradedIdeal:
        return mg_sum(self, other)

    def __pow__(self, r: int) -> MultiGradedIdeal:
        return mg_power(self, r)


def maximal_ideal(rc: ReesContext, base: MonomialIdeal | None = None) -> MultiGradedIdeal:
    """(t_1^-1, ..., t_g^-1, base, I_1 t_1, ..., I_g t_g); no t^-1 for the Rees variant.

    With ``base = m`` this is the maximal homogeneous ideal; another
    m-primary ``base`` J gives the ideal (t^-1, J, It).
    """
    base = rc.ctx.maximal_ideal() if base is None else base
    if not is_m_primary(base):
        raise HypothesisViolated(f"base {base} must be m-primary")
    support = {(0,) * rc.g: base}
    for i, ideal in enumerate(rc.ideals):
        e = [0] * rc.g
        e[i] = 1
        support[tuple(e)] = ideal
        if rc.extended:
            e[i] = -1
            support[tuple(e)] = rc.ctx.unit_ideal()
    return MultiGradedIdeal.build(rc, support)


def extend_ideal(rc: ReesContext, ideal: MonomialIdeal) -> MultiGradedIdeal:
    """The extension ideal * B, concentrated in degree 0."""
    return MultiGradedIdeal.build(rc, {(0,) * rc.g: ideal})


def _same_rees(a: MultiGradedIdeal, b: MultiGradedIdeal) -> None:
    if a.rees != b.rees:
        raise ContextMismatch("graded ideals live in different algebras")


def mg_sum(a: MultiGradedIdeal, b: MultiGradedIdeal) -> MultiGradedIdeal:
    _same_rees(a, b)
    support = dict(a.terms)
    for n, ideal in b.terms:
        support[n] = ideal_sum(support[n], ideal) if n in support else ideal
    return MultiGradedIdeal.build(a.rees, support)


def mg_product(a: MultiGradedIdeal, b: MultiGradedIdeal) -> MultiGradedIdeal:
    _same_rees(a, b)
    collected: Dict[Degree, list] = {}
    for u, x in a.terms:
        for v, y in b.terms:
            n = tuple(p + q for p, q in zip(u, v))
            collected.setdefault(n, []).append(product(x, y))
    return MultiGradedIdeal.build(a.rees, {n: ideal_sum(*xs) for n, xs in collected.items()})


def mg_power(a: MultiGradedIdeal, r: int) -> MultiGradedIdeal:
    if r < 0:
        raise ValueError("powers need a non-negative exponent")
    result = extend_ideal(a.rees, a.rees.ctx.unit_ideal())
    for _ in range(r):
        result = mg_product(result, a)
    return result


def piece_eval(a: MultiGradedIdeal, n: Degree) -> MonomialIdeal:
    """Degree-n piece: sum over the support of gens(v) * B_(n - v)."""
    rc = a.rees
    n = tuple(n)
    if not rc.extended and not _nonnegative(n):
        raise NegativeDegree(f"the Rees algebra has no piece in degree {n}")
    parts = []
    for v, ideal in a.terms:
        k = tuple(p - q for p, q in zip(n, v))
        if rc.extended or _nonnegative(k):
            parts.append(product(ideal, context_piece(rc, k)))
    return ideal_sum(*parts) if parts else rc.ctx.zero_ideal()


class GradedProduct:
    """Memoized pieces of F_1^e_1 ... F_k^e_k for fixed graded ideals F_i.

    Uses piece(F * X, n) = sum_u gens_F(u) * piece(X, n - u), which holds
    because gens_F(u) t^u B * X = gens_F(u) t^u X.
    """

    def __init__(self, factors: Sequence[MultiGradedIdeal]):
        self.factors = tuple(factors)
        self.rees = self.factors[0].rees
        for f in self.factors[1:]:
            _same_rees(self.factors[0], f)
        self._cache: Dict[tuple, MonomialIdeal] = {}

    def piece(self, exps: Sequence[int], n: Degree) -> MonomialIdeal:
        key = (tuple(exps), tuple(n))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        rc = self.rees
        if not rc.extended and not _nonnegative(n):
            result = rc.ctx.zero_ideal()
        else:
            i = next((i for i, e in enumerate(exps) if e > 0), None)
            if i is None:
                result = context_piece(rc, n)
            else:
                rest = list(exps)
                rest[i] -= 1
                parts = []
                for u, ideal in self.factors[i].terms:
                    below = self.piece(rest, tuple(p - q for p, q in zip(n, u)))
                    if not below.is_zero:
                        parts.append(product(ideal, below))
                result = ideal_sum(*parts) if parts else rc.ctx.zero_ideal()
        self._cache[key] = result
        return result

    def view(self, exps: Sequence[int]) -> GradedView:
        return GradedView(self, tuple(exps))


@dataclass(frozen=True)
class GradedView:
    """One power product F_1^e_1 ... F_k^e_k seen as a graded ideal."""

    source: GradedProduct
    exps: Tuple[int, ...]

    @property
    def rees(self) -> ReesContext:
        return self.source.rees

    def piece(self, n: Degree) -> MonomialIdeal:
        return self.source.piece(self.exps, n)


def _box(rc: ReesContext, box: int) -> Iterable[Degree]:
    lo = -box if rc.extended else 0
    return itertools.product(range(lo, box + 1), repeat=rc.g)


def graded_quotient_length(a, b, box: int, box_cap: int = 256) -> int:
    """Length of a/b for graded ideals b inside a, summed over graded pieces.

    Pieces are summed over ``max |n_i| <= box``.  The two outer shells of the
    box must show no difference between a and b; otherwise the box doubles,
    up to ``box_cap``.
    """
    rc = a.rees
    if b.rees != rc:
        raise ContextMismatch("graded ideals live in different algebras")
    while True:
        total = 0
        for n in _box(rc, box):
            pa, pb = a.piece(n), b.piece(n)
            if pa == pb:
                continue
            if max(abs(x) for x in n) >= box - 1:
                break
            total += quotient_length(pa, pb)
        else:
            return total
        box *= 2
        if box > box_cap:
            raise NonVanishingBoundary(f"pieces still differ on the boundary of a box of size {box // 2}")


class GradedLengthSampler:
    """(r, s_1, ..., s_k) -> l(A^r C^s / A^(r+1) C^s) for A = factors[0], C_i = factors[i]."""

    def __init__(self, factors: Sequence[MultiGradedIdeal], box_margin: int = 2, box_cap: int = 256):
        self.factors = tuple(factors)
        self.box_margin = box_margin
        self.box_cap = box_cap
        self._product = None

    def __getstate__(self):
        return (self.factors, self.box_margin, self.box_cap)

    def __setstate__(self, state):
        self.__init__(*state)

    def __call__(self, exps: Sequence[int]) -> int:
        if self._product is None:
            self._product = GradedProduct(self.factors)
        exps = tuple(exps)
        bigger = (exps[0] + 1,) + exps[1:]
        box = sum(e * f.width for e, f in zip(bigger, self.factors)) + self.box_margin
        return graded_quotient_length(
            self._product.view(exps), self._product.view(bigger), box, self.box_cap)


def _check_member(rc: ReesContext, a: MultiGradedIdeal) -> None:
    if a.rees != rc:
        raise ContextMismatch("graded ideal belongs to a different algebra")


def graded_hilbert_polynomial(rc: ReesContext, a: MultiGradedIdeal,
                              options: FitOptions = DEFAULT_OPTIONS) -> BinomialPolynomial:
    """Fit of r -> l(A^r / A^(r+1)) with one degree of slack above dim - 1.

    The slack makes the fitted degree an observation rather than an
    assumption.
    """
    _check_member(rc, a)
    return fit_binomial_polynomial(
        GradedLengthSampler((a,), options.box_margin, options.box_cap), 1, rc.dim,
        offset=options.offset, validation=options.validation,
        offset_cap=options.offset_cap, workers=options.workers)


def graded_multiplicity(rc: ReesContext, a: MultiGradedIdeal,
                        options: FitOptions = DEFAULT_OPTIONS) -> int:
    """Multiplicity of an ideal primary to the maximal homogeneous ideal.

    The fit allows degree d + g; the observed degree must be d + g - 1.
    """
    poly = graded_hilbert_polynomial(rc, a, options)
    degree = poly.degree
    if degree != rc.dim - 1:
        raise DegreeMismatch(f"fitted degree {degree}, expected {rc.dim - 1}")
    return top_coefficients(poly, degree)[(degree,)]


_GRADED_CACHE: Dict[tuple, MixedMultiplicityTable] = {}


def graded_mixed_multiplicities(rc: ReesContext, a: MultiGradedIdeal,
                                companions: Sequence[MultiGradedIdeal],
                                options: FitOptions = DEFAULT_OPTIONS) -> MixedMultiplicityTable:
    """Mixed multiplicities e(A^[q_0+1] | C_1^[q_1] | ...) inside the graded algebra.

    Keys sum to dim - 1 where dim = d + g is the dimension of the algebra.
    """
    _check_member(rc, a)
    companions = tuple(companions)
    for c in companions:
        _check_member(rc, c)
        if not c.terms:
            raise HypothesisViolated("companion ideals must be nonzero")
    key = (a, companions, options.key)
    hit = _GRADED_CACHE.get(key)
    if hit is None:
        k = 1 + len(companions)
        poly = fit_binomial_polynomial(
            GradedLengthSampler((a,) + companions, options.box_margin, options.box_cap),
            k, rc.dim - 1, offset=options.offset, validation=options.validation,
            offset_cap=options.offset_cap, workers=options.workers)
        hit = MixedMultiplicityTable(rc.dim, k, top_coefficients(poly, rc.dim - 1))
        _GRADED_CACHE[key] = hit
    return hit


def pair_mixed_multiplicities(rc: ReesContext, a: MultiGradedIdeal, c: MultiGradedIdeal,
                              options: FitOptions = DEFAULT_OPTIONS) -> MixedMultiplicityTable:
    return graded_mixed_multiplicities(rc, a, (c,), options)


def clear_caches() -> None:
    _GRADED_CACHE.clear()


# -- the decomposition of even powers of M = (t^-1, J, It) --------------------

def even_power_piece(j_ideal: MonomialIdeal, i_ideal: MonomialIdeal, r: int, j: int, n: int) -> MonomialIdeal:
    """Degree-n piece of M^(2(r-j)) read off the closed decomposition.

    Here K = J^2 + I, H = J + I and K^e = R for e <= 0.
    """
    k = ideal_sum(power(j_ideal, 2), i_ideal)
    h = ideal_sum(j_ideal, i_ideal)
    unit = j_ideal.ctx.unit_ideal()

    def kpow(e):
        return power(k, e) if e > 0 else unit

    if n == 0:
        return kpow(r - j)
    a = abs(n)
    # the negative side carries R where the positive side carries I^|n|
    outer = unit if n < 0 else power(i_ideal, a)
    if a >= 2 * r:
        return outer
    if a % 2 == 0:
        i = r - a // 2
        return product(kpow(i - j), outer)
    i = (2 * r - 1 - a) // 2
    if i < j:
        return outer
    return product(product(h, kpow(i - j)), outer)


def check_even_power_pieces(j_ideal: MonomialIdeal, i_ideal: MonomialIdeal, r: int, j: int,
                    margin: int = 2) -> bool:
    """Compare M^(2(r-j)) piece by piece with its closed decomposition."""
    if not is_m_primary(j_ideal):
        raise HypothesisViolated(f"{j_ideal} must be m-primary")
    if not 0 <= j < r:
        raise ValueError("need 0 <= j < r")
    rc = ReesContext(j_ideal.ctx, (i_ideal,), Variant.EXTENDED)
    m_pow = mg_power(maximal_ideal(rc, base=j_ideal), 2 * (r - j))
    bound = 2 * r + margin
    return all(piece_eval(m_pow, (n,)) == even_power_piece(j_ideal, i_ideal, r, j, n)
               for n in range(-bound, bound + 1))
