"""Exact polynomial fitting of length functions and mixed multiplicities.

Length functions such as ``r -> l(I^r / I^(r+1))`` agree with a polynomial
once every argument is large.  They are fitted here in the binomial basis

    P(r) = sum_q c_q * prod_i C(r_i + q_i, q_i)

from samples on the lower set ``offset + {q : |q| <= D}``, and the fit is
accepted only after it reproduces the samples on the next ``validation``
shells.  In this basis the top-degree coefficients of a Bhattacharya
function are exactly the mixed multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Callable, Dict, Iterator, Sequence, Tuple

from ._parallel import ordered_map, resolve_workers
from .errors import (
    HypothesisViolated,
    IndexOutOfRange,
    NonIntegerMultiplicity,
    NotYetPolynomial,
    SingularSystem,
)
from .monomials import MonomialIdeal, is_m_primary, power, product, quotient_length


@dataclass(frozen=True)
class FitOptions:
    """Knobs shared by every fit.

    ``offset``/``validation``/``offset_cap`` control where a length function
    is sampled; ``box_margin``/``box_cap`` bound the multidegree box used by
    the graded oracle; ``workers`` only changes how fast samples are taken.
    """

    offset: int = 2
    validation: int = 2
    offset_cap: int = 64
    box_margin: int = 2
    box_cap: int = 256
    workers: int | None = None

    def __post_init__(self):
        if self.offset < 0 or self.validation < 1 or self.offset_cap < 1:
            raise ValueError("offset must be >= 0, validation and offset_cap >= 1")
        if self.box_margin < 1 or self.box_cap < 1:
            raise ValueError("box_margin and box_cap must be >= 1")

    @property
    def key(self) -> tuple:
        """Everything that can influence a result (the worker count cannot)."""
        return (self.offset, self.validation, self.offset_cap, self.box_margin, self.box_cap)


DEFAULT_OPTIONS = FitOptions()


# -- combinatorics ------------------------------------------------------------

def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Tuples of ``parts`` non-negative integers summing to ``total``, in lex order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def lower_set(parts: int, degree: int) -> list:
    """All exponent tuples of total degree at most ``degree``, by degree then lex."""
    return [q for t in range(degree + 1) for q in compositions(t, parts)]


def binomial_basis(q: Sequence[int], r: Sequence[int]) -> int:
    return prod(comb(ri + qi, qi) for qi, ri in zip(q, r))


def binom_sum_identity(n: int, r: int, s: int) -> Tuple[int, int]:
    """Both sides of sum_i C(i+r, r) C(n-i+s, s) = C(n+r+s+1, r+s+1)."""
    lhs = sum(comb(i + r, r) * comb(n - i + s, s) for i in range(n + 1))
    return lhs, comb(n + r + s + 1, r + s + 1)


def solve_exact(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list:
    """Solve a square integer system exactly (Bareiss elimination).

    Elimination stays in the integers; only back substitution uses
    fractions.  Raises :class:`SingularSystem` for a singular matrix.
    """
    n = len(matrix)
    m = [list(row) + [b] for row, b in zip(matrix, rhs)]
    prev = 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            raise SingularSystem("collocation matrix is singular")
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
        mk = m[k]
        akk = mk[k]
        for i in range(k + 1, n):
            mi = m[i]
            aik = mi[k]
            for j in range(k + 1, n + 1):
                mi[j] = (mi[j] * akk - aik * mk[j]) // prev
            mi[k] = 0
        prev = akk
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(m[i][n])
        for j in range(i + 1, n):
            if m[i][j]:
                acc -= m[i][j] * x[j]
        x[i] = acc / m[i][i]
    return x


def expand_scaled_binomial(n: int, s: int) -> list:
    """Coefficients f_0..f_s with C(n r + s, s) = sum_i f_i C(r + s - i, s - i)."""
    if n < 1 or s < 1:
        raise ValueError("n and s must be positive")
    rows = [[comb(r + s - i, s - i) for i in range(s + 1)] for r in range(s + 1)]
    return solve_exact(rows, [comb(n * r + s, s) for r in range(s + 1)])


# -- fitting ------------------------------------------------------------------

@dataclass(frozen=True)
class BinomialPolynomial:
    """Polynomial in ``num_vars`` variables stored over the binomial basis."""

    num_vars: int
    degree_bound: int
    coeffs: Dict[Tuple[int, ...], Fraction] = field(default_factory=dict)
    stable_from: int = 0

    def __call__(self, r: Sequence[int]) -> Fraction:
        if len(r) != self.num_vars:
            raise ValueError(f"expected {self.num_vars} arguments")
        return sum((c * binomial_basis(q, r) for q, c in self.coeffs.items()), Fraction(0))

    def coefficient(self, q: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(q), Fraction(0))

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(q) for q, c in self.coeffs.items() if c), default=-1)

    def homogeneous_part(self, degree: int) -> Dict[Tuple[int, ...], Fraction]:
        return {q: self.coefficient(q) for q in compositions(degree, self.num_vars)}


def fit_binomial_polynomial(
    sampler: Callable[[Tuple[int, ...]], int],
    num_vars: int,
    degree: int,
    offset: int = 2,
    validation: int = 2,
    offset_cap: int = 64,
    workers: int | None = 1,
) -> BinomialPolynomial:
    """Fit ``sampler`` by a polynomial of total degree at most ``degree``.

    The offset doubles until the fit reproduces every sample on the
    ``validation`` shells above the collocation grid; past ``offset_cap``
    the function is declared not (yet) polynomial.
    """
    workers = resolve_workers(workers)
    grid = lower_set(num_vars, degree)
    shells = [q for t in range(degree + 1, degree + validation + 1) for q in compositions(t, num_vars)]
    start = offset
    while offset <= offset_cap:
        points = [tuple(offset + qi for qi in q) for q in grid + shells]
        values = [int(v) for v in ordered_map(sampler, points, workers)]
        matrix = [[binomial_basis(q, p) for q in grid] for p in points[: len(grid)]]
        try:
            coeffs = solve_exact(matrix, values[: len(grid)])
        except SingularSystem as exc:  # pragma: no cover - lower sets are unisolvent
            raise AssertionError("collocation on a lower set cannot be singular") from exc
        poly = BinomialPolynomial(
            num_vars, degree, {q: c for q, c in zip(grid, coeffs) if c}, stable_from=offset)
        if all(poly(p) == v for p, v in zip(points[len(grid):], values[len(grid):])):
            return poly
        offset = max(1, 2 * offset)
    raise NotYetPolynomial(
        f"no polynomial of degree <= {degree} fits from offset {start} up to cap {offset_cap}")


# -- Bhattacharya functions ---------------------------------------------------

def _check_companion(ideal: MonomialIdeal) -> None:
    if ideal.is_zero or ideal.is_unit:
        raise HypothesisViolated(f"{ideal} must be a nonzero proper ideal")


def product_of_powers(ideals: Sequence[MonomialIdeal], r: Sequence[int]) -> MonomialIdeal:
    result = ideals[0].ctx.unit_ideal()
    for ideal, e in zip(ideals, r):
        result = product(result, power(ideal, e))
    return result


def bhattacharya_sample(k: MonomialIdeal, js: Sequence[MonomialIdeal], r: Sequence[int]) -> int:
    """l(J^r / K J^r) where J^r = J_1^r_1 ... J_g^r_g."""
    if not is_m_primary(k):
        raise HypothesisViolated(f"{k} is not m-primary")
    if len(js) != len(r):
        raise ValueError("need one exponent per ideal")
    for j in js:
        _check_companion(j)
    p = product_of_powers(js, r)
    return quotient_length(p, product(k, p))


@dataclass(frozen=True)
class BhattacharyaSampler:
    k: MonomialIdeal
    js: Tuple[MonomialIdeal, ...]

    def __call__(self, r: Tuple[int, ...]) -> int:
        return bhattacharya_sample(self.k, self.js, r)


@dataclass(frozen=True)
class MixedMultiplicityTable:
    """Mixed multiplicities e(I_1^[q_1+1] | I_2^[q_2] | ... | I_g^[q_g]).

    Keys are the tuples (q_1, ..., q_g) with q_1 + ... + q_g = d - 1.
    """

    d: int
    g: int
    entries: Dict[Tuple[int, ...], int]

    def __post_init__(self):
        expected = set(compositions(self.d - 1, self.g))
        if set(self.entries) != expected:
            raise ValueError("table keys must be exactly the simplex of total d - 1")
        for q, v in self.entries.items():
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"entry {q} must be a non-negative integer, got {v!r}")

    def __getitem__(self, q: Sequence[int]) -> int:
        return self.entries[tuple(q)]

    def items(self):
        return sorted(self.entries.items())

    def total(self) -> int:
        return sum(self.entries.values())


def top_coefficients(poly: BinomialPolynomial, degree: int) -> Dict[Tuple[int, ...], int]:
    """Integer coefficients of the degree-``degree`` part of ``poly``."""
    out = {}
    for q, c in poly.homogeneous_part(degree).items():
        if c.denominator != 1:
            raise NonIntegerMultiplicity(f"coefficient {c} at {q} is not an integer")
        out[q] = int(c)
    return out


def _mixed_table(ideals: Tuple[MonomialIdeal, ...], key: tuple, workers: int) -> MixedMultiplicityTable:
    offset, validation, cap = key[:3]
    d = ideals[0].ctx.dim
    poly = fit_binomial_polynomial(
        BhattacharyaSampler(ideals[0], ideals), len(ideals), d - 1,
        offset=offset, validation=validation, offset_cap=cap, workers=workers)
    return MixedMultiplicityTable(d, len(ideals), top_coefficients(poly, d - 1))


def mixed_multiplicities(first: MonomialIdeal, *others: MonomialIdeal,
                         options: FitOptions = DEFAULT_OPTIONS) -> MixedMultiplicityTable:
    """Mixed multiplicities of (I_1, ..., I_g) with I_1 m-primary.

    They are the top binomial-basis coefficients of
    ``l(I_1^r_1 ... I_g^r_g / I_1^(r_1+1) I_2^r_2 ... I_g^r_g)``.
    """
    if not is_m_primary(first):
        raise HypothesisViolated(f"{first} is not m-primary")
    for other in others:
        _check_companion(other)
        if other.ctx != first.ctx:
            raise HypothesisViolated("ideals live in different rings")
    ideals = (first,) + others
    # the worker count cannot change a table, so it stays out of the cache key
    hit = _MIXED_CACHE.get((ideals, options.key))
    if hit is None:
        hit = _mixed_table(ideals, options.key, resolve_workers(options.workers))
        _MIXED_CACHE[(ideals, options.key)] = hit
    return hit


_MIXED_CACHE: Dict[tuple, MixedMultiplicityTable] = {}


def clear_caches() -> None:
    _MIXED_CACHE.clear()


def multiplicity_e(ideal: MonomialIdeal, options: FitOptions = DEFAULT_OPTIONS) -> int:
    """Hilbert-Samuel multiplicity e(I) of an m-primary ideal."""
    d = ideal.ctx.dim
    return mixed_multiplicities(ideal, options=options)[(d - 1,)]


def e_q(first: MonomialIdeal, second: MonomialIdeal, q: int,
        options: FitOptions = DEFAULT_OPTIONS) -> int:
    """e_q(I_1 | I_2) = e(I_1^[d-q] | I_2^[q]), with e_d(I_1 | I_2) = 0."""
    d = first.ctx.dim
    if not 0 <= q <= d:
        raise IndexOutOfRange(f"q must lie in 0..{d}, got {q}")
    table = mixed_multiplicities(first, second, options=options)
    if q == d:
        return 0
    return table[(d - 1 - q, q)]
