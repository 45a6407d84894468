"""Closed-form multiplicity formulas and their comparison with the graded oracle.

Every formula here is evaluated from mixed multiplicities of monomial ideals
of R (see :mod:`reesmult.hilbert`).  The matching ``oracle_*`` functions
compute the same numbers inside the graded algebra with
:mod:`reesmult.rees`, without using any formula.

Throughout, L = m^2 + I_1 + ... + I_g.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Dict, Optional, Sequence

from .errors import DimensionUnsupported, HypothesisViolated, IndexOutOfRange, NonIntegerResult
from .hilbert import DEFAULT_OPTIONS, FitOptions, compositions, e_q, mixed_multiplicities, multiplicity_e
from .monomials import MonomialIdeal, ideal_sum, is_m_primary, is_subset, power
from .rees import (
    ReesContext,
    Variant,
    extend_ideal,
    graded_mixed_multiplicities,
    graded_multiplicity,
    maximal_ideal,
    mg_power,
    mg_sum,
)


@dataclass(frozen=True)
class FormulaReport:
    name: str
    inputs: str
    formula_value: Fraction
    oracle_value: Optional[Fraction] = None
    agree: Optional[bool] = None
    detail: Dict[str, Fraction] = field(default_factory=dict)

    def with_oracle(self, value) -> FormulaReport:
        value = Fraction(value)
        return replace(self, oracle_value=value, agree=value == self.formula_value)


def _describe(ideals: Sequence[MonomialIdeal]) -> str:
    return ", ".join(str(i) for i in ideals)


def _check_ideals(ideals: Sequence[MonomialIdeal]) -> None:
    if not ideals:
        raise HypothesisViolated("need at least one ideal")
    ctx = ideals[0].ctx
    for ideal in ideals:
        if ideal.ctx != ctx:
            raise HypothesisViolated("ideals live in different rings")
        if ideal.is_zero or ideal.is_unit:
            raise HypothesisViolated(f"{ideal} must be nonzero and contained in m")


def _positive_integer(name: str, value: Fraction) -> Fraction:
    if value.denominator != 1 or value <= 0:
        raise NonIntegerResult(f"{name} evaluated to {value}, not a positive integer")
    return value


def _label(first: str, names: Sequence[str], q: Sequence[int]) -> str:
    parts = [f"{first}^[{q[0] + 1}]"] + [f"{n}^[{k}]" for n, k in zip(names, q[1:])]
    return "e(" + " | ".join(parts) + ")"


def l_ideal(ideals: Sequence[MonomialIdeal]) -> MonomialIdeal:
    """L = m^2 + I_1 + ... + I_g."""
    return ideal_sum(power(ideals[0].ctx.maximal_ideal(), 2), *ideals)


# -- multiplicity formulas ------------------------------------------------------

def rees_multiplicity_formula(*ideals: MonomialIdeal, options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    """e(R(I)) as the sum of all e(m^[q+1] | I_1^[q_1] | ... | I_g^[q_g])."""
    _check_ideals(ideals)
    table = mixed_multiplicities(ideals[0].ctx.maximal_ideal(), *ideals, options=options)
    names = [f"I{i + 1}" for i in range(len(ideals))]
    detail = {_label("m", names, q): Fraction(v) for q, v in table.items()}
    value = _positive_integer("Rees multiplicity", Fraction(table.total()))
    return FormulaReport("rees_multiplicity", _describe(ideals), value, detail=detail)


def extended_rees_multiplicity_formula(*ideals: MonomialIdeal,
                                       options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    """e(B(I)) = 2^-d sum over subsets S and compositions of 2^(q_S) e(L^[q+1] | I_S^[q_S])."""
    _check_ideals(ideals)
    d = ideals[0].ctx.dim
    big_l = l_ideal(ideals)
    total = Fraction(0)
    detail = {}
    # subsets by size, then lexicographically
    for t in range(len(ideals) + 1):
        for subset in combinations(range(len(ideals)), t):
            table = mixed_multiplicities(big_l, *(ideals[i] for i in subset), options=options)
            names = [f"I{i + 1}" for i in subset]
            for q, v in table.items():
                total += 2 ** sum(q[1:]) * v
                detail[_label("L", names, q)] = Fraction(v)
    value = _positive_integer("extended Rees multiplicity", total / 2 ** d)
    return FormulaReport("extended_rees_multiplicity", _describe(ideals), value, detail=detail)


def katz_verma_formula(j_ideal: MonomialIdeal, i_ideal: MonomialIdeal,
                       options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    """e((t^-1, J, It)) = 2^-d [e(K) + sum_q 2^q e_q(K | I)] with K = J^2 + I."""
    if not is_m_primary(j_ideal):
        raise HypothesisViolated(f"{j_ideal} must be m-primary")
    _check_ideals([i_ideal])
    d = j_ideal.ctx.dim
    k = ideal_sum(power(j_ideal, 2), i_ideal)
    detail = {"e(K)": Fraction(multiplicity_e(k, options))}
    total = detail["e(K)"]
    for q in range(d):
        v = e_q(k, i_ideal, q, options)
        detail[f"e_{q}(K | I)"] = Fraction(v)
        total += 2 ** q * v
    value = _positive_integer("Katz-Verma multiplicity", total / 2 ** d)
    return FormulaReport("katz_verma", f"J={j_ideal}, I={i_ideal}", value, detail=detail)


def low_dimension_formula(*ideals: MonomialIdeal, options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    """e(B(I)) specialised to d = 1 (2^(g-1) e(L)) and d = 2 (2^(g-2)[e(L) + sum_j e_1(L | I_j)])."""
    _check_ideals(ideals)
    d, g = ideals[0].ctx.dim, len(ideals)
    big_l = l_ideal(ideals)
    detail = {"e(L)": Fraction(multiplicity_e(big_l, options))}
    if d == 1:
        value = Fraction(2) ** (g - 1) * detail["e(L)"]
    elif d == 2:
        bracket = detail["e(L)"]
        for i, ideal in enumerate(ideals):
            v = Fraction(e_q(big_l, ideal, 1, options))
            detail[f"e_1(L | I{i + 1})"] = v
            bracket += v
        value = Fraction(2) ** (g - 2) * bracket
    else:
        raise DimensionUnsupported(f"closed low-dimensional form exists only for d in (1, 2), not {d}")
    return FormulaReport("low_dimension", _describe(ideals), _positive_integer("low-dimension form", value),
                         detail=detail)


def tower_formula(ideals: Sequence[MonomialIdeal], j: int, q0: int, trailing: Sequence[int],
                  options: FitOptions = DEFAULT_OPTIONS) -> Fraction:
    """Mixed multiplicity e(L_j^[q0+j+1] | I_(j+1)^[q_(j+1)] | ... ) of the j-th tower stage.

    Evaluates 2^j sum_{S in {1..j}} sum_{q + q_S = q0} 2^(q0 - q)
    e(L^[q+1] | I_S^[q_S] | I_(j+1)^[q_(j+1)] | ... | I_g^[q_g]).
    The bracket exponents of the left side add up to d + j, the dimension of
    the j-th stage, so ``q0 + sum(trailing) = d - 1``.
    """
    _check_ideals(ideals)
    d, g = ideals[0].ctx.dim, len(ideals)
    trailing = tuple(trailing)
    if not 1 <= j <= g:
        raise IndexOutOfRange(f"j must lie in 1..{g}, got {j}")
    if len(trailing) != g - j or q0 < 0 or min(trailing, default=0) < 0:
        raise IndexOutOfRange(f"need q0 >= 0 and {g - j} non-negative trailing exponents")
    if q0 + sum(trailing) != d - 1:
        raise IndexOutOfRange(f"q0 + trailing must add up to {d - 1}")
    big_l = l_ideal(ideals)
    tail = list(ideals[j:])
    total = 0
    for t in range(j + 1):
        for subset in combinations(range(j), t):
            table = mixed_multiplicities(big_l, *(ideals[i] for i in subset), *tail, options=options)
            for head in compositions(q0, t + 1):
                total += 2 ** (q0 - head[0]) * table[head + trailing]
    return Fraction(2 ** j * total)


# -- oracles ---------------------------------------------------------------------

def oracle_rees_multiplicity(*ideals: MonomialIdeal, options: FitOptions = DEFAULT_OPTIONS) -> int:
    _check_ideals(ideals)
    rc = ReesContext(ideals[0].ctx, ideals, Variant.REES)
    return graded_multiplicity(rc, maximal_ideal(rc), options)


def oracle_extended_rees_multiplicity(*ideals: MonomialIdeal, options: FitOptions = DEFAULT_OPTIONS) -> int:
    _check_ideals(ideals)
    rc = ReesContext(ideals[0].ctx, ideals, Variant.EXTENDED)
    return graded_multiplicity(rc, maximal_ideal(rc), options)


def oracle_katz_verma(j_ideal: MonomialIdeal, i_ideal: MonomialIdeal,
                      options: FitOptions = DEFAULT_OPTIONS) -> int:
    rc = ReesContext(j_ideal.ctx, (i_ideal,), Variant.EXTENDED)
    return graded_multiplicity(rc, maximal_ideal(rc, base=j_ideal), options)


def verify_rees_multiplicity(*ideals, options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    return rees_multiplicity_formula(*ideals, options=options).with_oracle(
        oracle_rees_multiplicity(*ideals, options=options))


def verify_extended_rees_multiplicity(*ideals, options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    return extended_rees_multiplicity_formula(*ideals, options=options).with_oracle(
        oracle_extended_rees_multiplicity(*ideals, options=options))


def verify_katz_verma(j_ideal, i_ideal, options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    return katz_verma_formula(j_ideal, i_ideal, options).with_oracle(
        oracle_katz_verma(j_ideal, i_ideal, options))


# -- identities between graded and base-ring mixed multiplicities ---------------

IDENTITY_KINDS = ("square_with_extension", "maximal_with_extension", "square_with_companions",
                  "tower_first_step")
# short names used in job files
KIND_ALIASES = {
    "prop_l4": "square_with_extension",
    "cor_extra1": "maximal_with_extension",
    "cor_l5": "square_with_companions",
    "lemma_l7_j1": "tower_first_step",
}


def _square_plus(rc: ReesContext, base: MonomialIdeal, extra: MonomialIdeal | None):
    """M^2 + J_1 T for M = (t^-1, base, It)."""
    a = mg_power(maximal_ideal(rc, base=base), 2)
    if extra is not None and not extra.is_zero:
        a = mg_sum(a, extend_ideal(rc, extra))
    return a


def _check_extension(j_ideal, i_ideal, j1) -> None:
    if not is_m_primary(j_ideal):
        raise HypothesisViolated(f"{j_ideal} must be m-primary")
    _check_ideals([i_ideal])
    if j1 is not None and not is_subset(j1, ideal_sum(j_ideal, i_ideal)):
        raise HypothesisViolated(f"J1 = {j1} is not contained in J + I")


def _compare(name: str, inputs: str, pairs) -> FormulaReport:
    """Report built from (label, graded side, base-ring side) triples."""
    detail = {}
    agree = True
    for label, lhs, rhs in pairs:
        detail[f"graded {label}"] = Fraction(lhs)
        detail[f"formula {label}"] = Fraction(rhs)
        agree = agree and Fraction(lhs) == Fraction(rhs)
    _, first_lhs, first_rhs = pairs[0]
    return FormulaReport(name, inputs, Fraction(first_rhs), Fraction(first_lhs), agree, detail)


def _square_with_extension(j_ideal, i_ideal, i1, j1, options) -> FormulaReport:
    _check_extension(j_ideal, i_ideal, j1)
    _check_ideals([i1])
    d = j_ideal.ctx.dim
    rc = ReesContext(j_ideal.ctx, (i_ideal,), Variant.EXTENDED)
    table = graded_mixed_multiplicities(
        rc, _square_plus(rc, j_ideal, j1), (extend_ideal(rc, i1),), options)
    kj = ideal_sum(power(j_ideal, 2), i_ideal, *([j1] if j1 is not None and not j1.is_zero else []))
    triple = mixed_multiplicities(kj, i_ideal, i1, options=options)
    pairs = []
    for q in range(d + 1):
        rhs = e_q(kj, i1, q, options)
        for q0, q1 in compositions(d - 1 - q, 2) if q <= d - 1 else ():
            rhs += 2 ** q1 * triple[(q0, q1, q)]
        pairs.append((f"e_{q}", table[(d - q, q)], 2 * rhs))
    return _compare("square_with_extension", f"J={j_ideal}, I={i_ideal}, I1={i1}, J1={j1}", pairs)


def _maximal_with_extension(j_ideal, i_ideal, i1, options) -> FormulaReport:
    _check_extension(j_ideal, i_ideal, None)
    _check_ideals([i1])
    d = j_ideal.ctx.dim
    rc = ReesContext(j_ideal.ctx, (i_ideal,), Variant.EXTENDED)
    table = graded_mixed_multiplicities(
        rc, maximal_ideal(rc, base=j_ideal), (extend_ideal(rc, i1),), options)
    k = ideal_sum(power(j_ideal, 2), i_ideal)
    triple = mixed_multiplicities(k, i_ideal, i1, options=options)
    pairs = []
    for q in range(d + 1):
        rhs = Fraction(e_q(k, i1, q, options))
        for q0, q1 in compositions(d - 1 - q, 2) if q <= d - 1 else ():
            rhs += 2 ** q1 * triple[(q0, q1, q)]
        pairs.append((f"e_{q}", table[(d - q, q)], rhs / 2 ** (d - q)))
    return _compare("maximal_with_extension", f"J={j_ideal}, I={i_ideal}, I1={i1}", pairs)


def _square_with_companions(j_ideal, i_ideal, companions, j1, options) -> FormulaReport:
    _check_extension(j_ideal, i_ideal, j1)
    _check_ideals(companions)
    d = j_ideal.ctx.dim
    rc = ReesContext(j_ideal.ctx, (i_ideal,), Variant.EXTENDED)
    table = graded_mixed_multiplicities(
        rc, _square_plus(rc, j_ideal, j1), tuple(extend_ideal(rc, c) for c in companions), options)
    kj = ideal_sum(power(j_ideal, 2), i_ideal, *([j1] if j1 is not None and not j1.is_zero else []))
    plain = mixed_multiplicities(kj, *companions, options=options)
    with_i = mixed_multiplicities(kj, i_ideal, *companions, options=options)
    pairs = []
    for key, lhs in table.items():
        if key[0] == 0:
            continue
        q0, rest = key[0] - 1, key[1:]
        rhs = plain[(q0,) + rest]
        for k, l in compositions(q0, 2):
            rhs += 2 ** l * with_i[(k, l) + rest]
        pairs.append((f"q={(q0,) + rest}", lhs, 2 * rhs))
    return _compare("square_with_companions",
                    f"J={j_ideal}, I={i_ideal}, companions=[{_describe(companions)}], J1={j1}", pairs)


def _tower_first_step(ideals, options) -> FormulaReport:
    _check_ideals(ideals)
    ctx = ideals[0].ctx
    rc = ReesContext(ctx, (ideals[0],), Variant.EXTENDED)
    rest = list(ideals[1:])
    a = _square_plus(rc, ctx.maximal_ideal(), ideal_sum(*rest) if rest else None)
    table = graded_mixed_multiplicities(rc, a, tuple(extend_ideal(rc, c) for c in rest), options)
    pairs = []
    for key, lhs in table.items():
        if key[0] == 0:
            continue
        q0, trailing = key[0] - 1, key[1:]
        pairs.append((f"q={(q0,) + trailing}", lhs, tower_formula(ideals, 1, q0, trailing, options)))
    return _compare("tower_first_step", _describe(ideals), pairs)


def identity_check(kind: str, *, j_ideal: MonomialIdeal | None = None, i_ideal: MonomialIdeal | None = None,
                   companions: Sequence[MonomialIdeal] = (), j1: MonomialIdeal | None = None,
                   ideals: Sequence[MonomialIdeal] = (), options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    """Compare mixed multiplicities computed in B(I) with their base-ring expressions.

    Kinds, with T = B(I), M = (t^-1, J, It), K = J^2 + I:

    ``square_with_extension``
        e_q(M^2 + J1 T | I1 T) for q = 0..d; ``companions`` holds I1.
    ``maximal_with_extension``
        e_q(M | I1 T) for q = 0..d.
    ``square_with_companions``
        e((M^2 + J1 T)^[q0+2] | (I1 T)^[q1] | ... | (In T)^[qn]).
    ``tower_first_step``
        first stage of the tower over B(I_1) for ``ideals`` = I_1..I_g.
    """
    kind = KIND_ALIASES.get(kind, kind)
    if kind == "tower_first_step":
        return _tower_first_step(list(ideals), options)
    if j_ideal is None or i_ideal is None:
        raise HypothesisViolated(f"{kind} needs both J and I")
    companions = list(companions)
    if kind == "square_with_companions":
        return _square_with_companions(j_ideal, i_ideal, companions, j1, options)
    if len(companions) != 1:
        raise HypothesisViolated(f"{kind} needs exactly one companion ideal I1")
    if kind == "square_with_extension":
        return _square_with_extension(j_ideal, i_ideal, companions[0], j1, options)
    if kind == "maximal_with_extension":
        if j1 is not None and not j1.is_zero:
            raise HypothesisViolated("maximal_with_extension takes no J1")
        return _maximal_with_extension(j_ideal, i_ideal, companions[0], options)
    raise ValueError(f"unknown identity kind {kind!r}")


def subset_decomposition_check(*ideals: MonomialIdeal, options: FitOptions = DEFAULT_OPTIONS) -> FormulaReport:
    """For I_i inside m^2: e(B(I)) = e(R) + sum over nonempty subsets S of e(R(I_S))."""
    _check_ideals(ideals)
    for ideal in ideals:
        if ideal.order < 2:
            raise HypothesisViolated(f"{ideal} is not contained in m^2")
    main = extended_rees_multiplicity_formula(*ideals, options=options)
    detail = {"e(R)": Fraction(multiplicity_e(ideals[0].ctx.maximal_ideal(), options))}
    total = detail["e(R)"]
    for t in range(1, len(ideals) + 1):
        for subset in combinations(range(len(ideals)), t):
            v = rees_multiplicity_formula(*(ideals[i] for i in subset), options=options).formula_value
            detail["e(R(" + ",".join(f"I{i + 1}" for i in subset) + "))"] = v
            total += v
    return FormulaReport("subset_decomposition", _describe(ideals), main.formula_value, total,
                         main.formula_value == total, detail)
