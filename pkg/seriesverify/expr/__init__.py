from seriesverify.expr.evaluate import eval_closed_form, eval_summand_rational, interpret_rational
from seriesverify.expr.nodes import ClosedFormExpr, CongruenceRHS, SummandExpr, Term
from seriesverify.expr.parser import (
    parse_closed_form,
    parse_congruence_rhs,
    parse_polynomial,
    parse_rational,
    parse_summand,
)
from seriesverify.expr.printer import print_expr
from seriesverify.expr.registry import ConjectureRegistry, load_registry, parse_registry
from seriesverify.expr.templates import derive_general_conjecture

__all__ = [
    "eval_closed_form", "eval_summand_rational", "interpret_rational", "ClosedFormExpr",
    "CongruenceRHS", "SummandExpr", "Term", "parse_closed_form", "parse_congruence_rhs",
    "parse_polynomial", "parse_rational", "parse_summand", "print_expr", "ConjectureRegistry",
    "load_registry", "parse_registry", "derive_general_conjecture",
]
