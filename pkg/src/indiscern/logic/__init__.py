"""First-order syntax, parsing, satisfaction and enumeration."""

from .enumeration import DEFAULT_BUDGET, Enumeration, EnumerationBudget, FormulaEnumerator, enumerate_formulas
from .identity import CheckReport, frege_congruence_check, hb_identity
from .parser import parse_formula
from .semantics import TableSemantics, evaluate, satisfying_tuples, truth_table
from .syntax import (And, Atom, Const, Eq, Exists, ForAll, Formula, Iff, Implies, Not, Or, Var,
                     canonicalize, free_variables, node_count, quantifier_rank, substitute)

__all__ = [
    'DEFAULT_BUDGET',
    'Enumeration',
    'EnumerationBudget',
    'FormulaEnumerator',
    'enumerate_formulas',
    'CheckReport',
    'frege_congruence_check',
    'hb_identity',
    'parse_formula',
    'TableSemantics',
    'evaluate',
    'satisfying_tuples',
    'truth_table',
    'And',
    'Atom',
    'Const',
    'Eq',
    'Exists',
    'ForAll',
    'Formula',
    'Iff',
    'Implies',
    'Not',
    'Or',
    'Var',
    'canonicalize',
    'free_variables',
    'node_count',
    'quantifier_rank',
    'substitute',
]
