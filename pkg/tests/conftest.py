from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import strategies as st

from reesmult.monomials import RingContext, minimalize

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def r1():
    return RingContext.standard(1)


@pytest.fixture
def r2():
    return RingContext.standard(2)


@pytest.fixture
def r3():
    return RingContext.standard(3)


# -- brute-force oracles, independent of the library's counting code ------------

def in_ideal(gens, u) -> bool:
    return any(all(a <= b for a, b in zip(g, u)) for g in gens)


def box_colength(ideal) -> int:
    """Count standard monomials by scanning the box cut out by the pure powers."""
    d = ideal.ctx.dim
    bounds = []
    for i in range(d):
        pure = [g[i] for g in ideal.gens if all(g[j] == 0 for j in range(d) if j != i)]
        bounds.append(min(pure))
    return sum(1 for u in itertools.product(*(range(b) for b in bounds)) if not in_ideal(ideal.gens, u))


def box_quotient_length(a, b, bound: int) -> int:
    """#(monomials in a but not in b) with every exponent below ``bound``."""
    d = a.ctx.dim
    return sum(1 for u in itertools.product(range(bound), repeat=d)
               if in_ideal(a.gens, u) and not in_ideal(b.gens, u))


def finite_difference_multiplicity(ideal, start: int = 4) -> int:
    """d-th forward difference of n -> l(R/I^n), which equals e(I) once it is polynomial."""
    from math import comb

    d = ideal.ctx.dim
    values = [box_colength(_power(ideal, n)) for n in range(start, start + d + 1)]
    return sum((-1) ** (d - k) * comb(d, k) * values[k] for k in range(d + 1))


def _power(ideal, n):
    gens = [ideal.ctx.unit]
    for _ in range(n):
        gens = [tuple(x + y for x, y in zip(a, b)) for a in gens for b in ideal.gens]
    return minimalize(ideal.ctx, gens)


# -- random ideals ------------------------------------------------------------------

def random_m_primary(rng: random.Random, ctx: RingContext, max_deg: int = 4, extra: int = 2):
    gens = [ctx.variable(i, rng.randint(1, max_deg)) for i in range(ctx.dim)]
    for _ in range(rng.randint(0, extra)):
        gens.append(_random_monomial(rng, ctx, max_deg))
    return minimalize(ctx, gens)


def random_proper(rng: random.Random, ctx: RingContext, max_deg: int = 4, count: int = 2):
    return minimalize(ctx, [_random_monomial(rng, ctx, max_deg) for _ in range(rng.randint(1, count))])


def _random_monomial(rng, ctx, max_deg):
    while True:
        u = tuple(rng.randint(0, max_deg) for _ in range(ctx.dim))
        if 1 <= sum(u) <= max_deg:
            return u


@st.composite
def staircases(draw, dim: int = 2, max_exp: int = 6, m_primary: bool = True):
    ctx = RingContext.standard(dim)
    gens = []
    if m_primary:
        gens += [ctx.variable(i, draw(st.integers(1, max_exp))) for i in range(dim)]
    n_extra = draw(st.integers(0 if m_primary else 1, 3))
    for _ in range(n_extra):
        u = tuple(draw(st.integers(0, max_exp)) for _ in range(dim))
        if any(u):
            gens.append(u)
    if not gens:
        gens.append(ctx.variable(0))
    return minimalize(ctx, gens)
