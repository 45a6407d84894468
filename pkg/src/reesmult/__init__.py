"""Exact multiplicities of monomial ideals and of their multi-graded Rees algebras."""

from .errors import ReesMultError
from .formulas import (
    FormulaReport,
    extended_rees_multiplicity_formula,
    identity_check,
    katz_verma_formula,
    low_dimension_formula,
    oracle_extended_rees_multiplicity,
    oracle_katz_verma,
    oracle_rees_multiplicity,
    rees_multiplicity_formula,
    subset_decomposition_check,
    tower_formula,
    verify_extended_rees_multiplicity,
    verify_katz_verma,
    verify_rees_multiplicity,
)
from .hilbert import FitOptions, e_q, mixed_multiplicities, multiplicity_e
from .monomials import MonomialIdeal, RingContext, colength, quotient_length
from .rees import ReesContext, Variant, graded_multiplicity, maximal_ideal

__version__ = "0.1.0"


def clear_caches() -> None:
    """Drop memoized mixed-multiplicity tables (ideal powers stay cached)."""
    from . import hilbert, rees

    hilbert.clear_caches()
    rees.clear_caches()
