"""Toolkit for a quantifier-free term-modal epistemic logic with assignment
operators and non-rigid names."""

from .syntax import (
    And,
    Assign,
    Bot,
    Eq,
    Formula,
    Iff,
    Implies,
    Knows,
    Name,
    Not,
    Or,
    Pred,
    Signature,
    Term,
    Top,
    Var,
    free_vars,
    is_admissible,
    is_el_fragment,
    knows_who,
    parse_formula,
    print_formula,
    reletter,
    substitute,
)

__all__ = [
    "And", "Assign", "Bot", "Eq", "Formula", "Iff", "Implies", "Knows",
    "Name", "Not", "Or", "Pred", "Signature", "Term", "Top", "Var",
    "free_vars", "is_admissible", "is_el_fragment", "knows_who",
    "parse_formula", "print_formula", "reletter", "substitute",
]
