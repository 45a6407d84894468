"""Monomial ideals of the power series ring k[[x1, ..., xd]].

Monomials are plain exponent tuples.  A :class:`MonomialIdeal` is stored by
its minimal generators, sorted lexicographically, which makes equality of
ideals equality of generator tuples.  Every length computed here is a count
of monomials and so does not depend on the coefficient field.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

from .errors import ArityMismatch, ContextMismatch, InfiniteLength, NotContained, ParseError, UnknownVariable

Monomial = Tuple[int, ...]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TERM = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^([0-9]+))?\Z")


@dataclass(frozen=True)
class RingContext:
    """Ambient ring k[[x1..xd]] with maximal ideal m = (x1, ..., xd)."""

    dim: int
    var_names: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "var_names", tuple(self.var_names))
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"ring dimension must be a positive integer, got {self.dim!r}")
        if len(self.var_names) != self.dim:
            raise ValueError(f"expected {self.dim} variable names, got {len(self.var_names)}")
        if len(set(self.var_names)) != self.dim:
            raise ValueError("variable names must be distinct")
        for name in self.var_names:
            if not _NAME.match(name):
                raise ValueError(f"invalid variable name {name!r}")

    @classmethod
    def standard(cls, dim: int) -> RingContext:
        names = ("x", "y", "z", "w")[:dim] if dim <= 4 else tuple(f"x{i + 1}" for i in range(dim))
        return cls(dim, names)

    @property
    def unit(self) -> Monomial:
        return (0,) * self.dim

    def variable(self, i: int, power: int = 1) -> Monomial:
        e = [0] * self.dim
        e[i] = power
        return tuple(e)

    def zero_ideal(self) -> MonomialIdeal:
        return MonomialIdeal(self, ())

    def unit_ideal(self) -> MonomialIdeal:
        return MonomialIdeal(self, (self.unit,))

    def maximal_ideal(self) -> MonomialIdeal:
        return minimalize(self, [self.variable(i) for i in range(self.dim)])

    def ideal(self, *gens: str | Monomial) -> MonomialIdeal:
        """Ideal generated by monomials given as strings (``"x^2*y"``) or tuples."""
        return minimalize(self, [parse_monomial(self, g) if isinstance(g, str) else tuple(g) for g in gens])

    def parse(self, text: str) -> Monomial:
        return parse_monomial(self, text)

    def format(self, u: Monomial) -> str:
        return format_monomial(self, u)


def parse_monomial(ctx: RingContext, text: str) -> Monomial:
    """Parse ``term ("*" term)*`` with ``term = var ("^" posint)?``; ``1`` is the unit."""
    compact = "".join(text.split())
    if compact == "1":
        return ctx.unit
    if not compact:
        raise ParseError(f"empty monomial {text!r}")
    exps = [0] * ctx.dim
    for term in compact.split("*"):
        m = _TERM.match(term)
        if m is None:
            raise ParseError(f"malformed term {term!r} in monomial {text!r}")
        name, power = m.group(1), m.group(2)
        if name not in ctx.var_names:
            raise UnknownVariable(f"unknown variable {name!r} in monomial {text!r}")
        p = 1 if power is None else int(power)
        if p < 1:
            raise ParseError(f"exponent must be positive in {text!r}")
        exps[ctx.var_names.index(name)] += p
    return tuple(exps)


def format_monomial(ctx: RingContext, u: Monomial) -> str:
    parts = []
    for name, e in zip(ctx.var_names, u):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


class MonomialIdeal:
    """An ideal given by its minimal monomial generators in lexicographic order.

    Build instances with :func:`minimalize` (or ``ctx.ideal``); the
    constructor trusts its input.  The empty generator tuple is the zero
    ideal and ``(unit,)`` is the whole ring.
    """

    __slots__ = ("ctx", "gens", "_hash")

    def __init__(self, ctx: RingContext, gens: Tuple[Monomial, ...]):
        self.ctx = ctx
        self.gens = gens
        self._hash = hash((ctx, gens))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, MonomialIdeal):
            return NotImplemented
        return self._hash == other._hash and self.gens == other.gens and self.ctx == other.ctx

    def __repr__(self):
        return f"MonomialIdeal({self})"

    def __str__(self):
        if not self.gens:
            return "(0)"
        return "(" + ", ".join(format_monomial(self.ctx, g) for g in self.gens) + ")"

    def __getstate__(self):
        return (self.ctx, self.gens)

    def __setstate__(self, state):
        self.__init__(*state)

    @property
    def is_zero(self) -> bool:
        return not self.gens

    @property
    def is_unit(self) -> bool:
        return self.gens == (self.ctx.unit,)

    @property
    def is_proper(self) -> bool:
        return not self.is_unit

    @property
    def order(self) -> int:
        """Least total degree of a generator (the largest n with I in m^n)."""
        if not self.gens:
            raise ValueError("the zero ideal has no order")
        return min(sum(g) for g in self.gens)

    def __add__(self, other: MonomialIdeal) -> MonomialIdeal:
        return ideal_sum(self, other)

    def __mul__(self, other: MonomialIdeal) -> MonomialIdeal:
        return product(self, other)

    def __pow__(self, n: int) -> MonomialIdeal:
        return power(self, n)

    def __contains__(self, u: Monomial) -> bool:
        return contains(self, u)

    def __le__(self, other: MonomialIdeal) -> bool:
        return is_subset(self, other)

    def colon(self, u: Monomial) -> MonomialIdeal:
        return colon_by_monomial(self, u)

    def is_m_primary(self) -> bool:
        return is_m_primary(self)

    def colength(self) -> int:
        return colength(self)


def _check_arity(ctx: RingContext, u: Monomial) -> None:
    if len(u) != ctx.dim or any(not isinstance(e, int) or e < 0 for e in u):
        raise ArityMismatch(f"{u!r} is not an exponent vector of length {ctx.dim}")


def _same_ctx(a: MonomialIdeal, b: MonomialIdeal) -> None:
    if a.ctx != b.ctx:
        raise ContextMismatch("ideals live in different rings")


def _minimal(gens: Iterable[Monomial], d: int) -> Tuple[Monomial, ...]:
    cands = sorted(set(gens))
    if len(cands) <= 1:
        return tuple(cands)
    if d == 1:
        return (cands[0],)
    if d == 2:
        # lex order sweeps x upward; keep a generator iff its y drops below every earlier y
        kept = []
        best = None
        for c in cands:
            if best is None or c[1] < best:
                kept.append(c)
                best = c[1]
        return tuple(kept)
    # a divisor always precedes its multiples in lex order
    kept = []
    for c in cands:
        for k in kept:
            if all(x <= y for x, y in zip(k, c)):
                break
        else:
            kept.append(c)
    return tuple(kept)


def minimalize(ctx: RingContext, gens: Iterable[Monomial]) -> MonomialIdeal:
    gens = [tuple(g) for g in gens]
    for g in gens:
        _check_arity(ctx, g)
    return MonomialIdeal(ctx, _minimal(gens, ctx.dim))


def ideal_sum(*ideals: MonomialIdeal) -> MonomialIdeal:
    if not ideals:
        raise ValueError("ideal_sum needs at least one ideal")
    first = ideals[0]
    for other in ideals[1:]:
        _same_ctx(first, other)
    if len(ideals) == 1:
        return first
    return MonomialIdeal(first.ctx, _minimal((g for a in ideals for g in a.gens), first.ctx.dim))


@lru_cache(maxsize=1 << 16)
def product(a: MonomialIdeal, b: MonomialIdeal) -> MonomialIdeal:
    _same_ctx(a, b)
    if a.is_zero or b.is_unit:
        return a
    if b.is_zero or a.is_unit:
        return b
    if len(a.gens) == 1:
        u = a.gens[0]
        # multiplying by a monomial keeps the generating set minimal
        return MonomialIdeal(a.ctx, tuple(tuple(x + y for x, y in zip(u, v)) for v in b.gens))
    if len(b.gens) == 1:
        return product(b, a)
    sums = {tuple(x + y for x, y in zip(u, v)) for u in a.gens for v in b.gens}
    return MonomialIdeal(a.ctx, _minimal(sums, a.ctx.dim))


@lru_cache(maxsize=1 << 14)
def power(a: MonomialIdeal, n: int) -> MonomialIdeal:
    if n < 0:
        raise ValueError("ideal powers need a non-negative exponent")
    if n == 0:
        return a.ctx.unit_ideal()
    if n == 1:
        return a
    return product(power(a, n - 1), a)


def colon_by_monomial(a: MonomialIdeal, u: Monomial) -> MonomialIdeal:
    _check_arity(a.ctx, u)
    return MonomialIdeal(a.ctx, _minimal(
        (tuple(max(x, y) - y for x, y in zip(g, u)) for g in a.gens), a.ctx.dim))


def contains(a: MonomialIdeal, u: Monomial) -> bool:
    _check_arity(a.ctx, u)
    return any(divides(g, u) for g in a.gens)


def is_subset(b: MonomialIdeal, a: MonomialIdeal) -> bool:
    """True iff ``b`` is contained in ``a``."""
    _same_ctx(a, b)
    return all(any(divides(g, u) for g in a.gens) for u in b.gens)


def is_m_primary(a: MonomialIdeal) -> bool:
    if a.is_zero or a.is_unit:
        return False
    d = a.ctx.dim
    found = [False] * d
    for g in a.gens:
        support = [i for i in range(d) if g[i]]
        if len(support) == 1:
            found[support[0]] = True
    return all(found)


def has_finite_colength(a: MonomialIdeal) -> bool:
    return a.is_unit or is_m_primary(a)


def _count_standard(gens: Tuple[Monomial, ...], d: int) -> int:
    """Number of monomials outside an m-primary ideal given by minimal ``gens``."""
    if d == 1:
        return gens[0][0]
    if d == 2:
        total = 0
        for (x0, y0), (x1, _) in zip(gens, gens[1:]):
            total += (x1 - x0) * y0
        return total
    # slice the box along the first coordinate; the slice only changes at generator exponents
    top = next(g[0] for g in gens if not any(g[1:]))
    breaks = sorted({g[0] for g in gens if g[0] < top}) + [top]
    total = 0
    for lo, hi in zip(breaks, breaks[1:]):
        section = _minimal((g[1:] for g in gens if g[0] <= lo), d - 1)
        total += (hi - lo) * _count_standard(section, d - 1)
    return total


@lru_cache(maxsize=1 << 16)
def colength(a: MonomialIdeal) -> int:
    """Length of R/a, the number of monomials not in ``a``."""
    if a.is_unit:
        return 0
    if not is_m_primary(a):
        raise InfiniteLength(f"R/{a} does not have finite length")
    return _count_standard(a.gens, a.ctx.dim)


def filtration_length(a: MonomialIdeal, b: MonomialIdeal, order: Sequence[Monomial] | None = None) -> int:
    """Length of a/b through the chain b, b + (g1), b + (g1, g2), ..., a.

    Each step contributes the colength of the colon ideal
    ``(b + (g1..g_{k-1})) : g_k``.  ``order`` permutes the generators of ``a``.
    """
    _same_ctx(a, b)
    if not is_subset(b, a):
        raise NotContained(f"{b} is not contained in {a}")
    order = a.gens if order is None else tuple(order)
    if sorted(order) != list(a.gens):
        raise ValueError("order must be a permutation of the generators")
    d = a.ctx.dim
    current = list(b.gens)
    total = 0
    for g in order:
        if not any(divides(h, g) for h in current):
            quotient = MonomialIdeal(a.ctx, _minimal(
                (tuple(max(x, y) - y for x, y in zip(h, g)) for h in current), d))
            total += colength(quotient)
        current.append(g)
    return total


def quotient_length(a: MonomialIdeal, b: MonomialIdeal) -> int:
    """Length of a/b for b contained in a.

    Uses colength(b) - colength(a) when b has finite colength and the colon
    filtration otherwise; both give the same number.
    """
    _same_ctx(a, b)
    if a == b:
        return 0
    if not is_subset(b, a):
        raise NotContained(f"{b} is not contained in {a}")
    if has_finite_colength(b):
        return colength(b) - colength(a)
    return filtration_length(a, b)
