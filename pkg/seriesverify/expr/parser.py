"""
Recursive-descent parser for the conjecture DSL.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := unary (('*'|'/') unary | unary)*      juxtaposition multiplies: 2k, 4(2n+1)
    unary  := '-' unary | power
    power  := atom ['^' unary]
    atom   := integer | name | name '(' expr (',' expr)* ')' | '(' expr ')'
"""
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple

from seriesverify.exceptions import ExprSyntaxError
from seriesverify.expr.nodes import (
    CLOSED_FORM_FUNCTIONS,
    CONGRUENCE_FUNCTIONS,
    CONSTANT_NAMES,
    BinOp,
    Call,
    ClosedFormExpr,
    CongruenceRHS,
    Name,
    Neg,
    Node,
    Num,
    SummandExpr,
    Var,
    free_vars,
    substitute,
)

VARIABLES = ("k", "p")
PARAMETERS = ("x", "m", "n")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            break
        start = match.start(match.lastindex) if match.lastindex else match.end()
        if match.group(1) is not None:
            tokens.append(("num", match.group(1), start))
        elif match.group(2) is not None:
            tokens.append(("name", match.group(2), start))
        elif match.group(3) is not None:
            ch = match.group(3)
            if ch not in "+-*/^(),":
                raise ExprSyntaxError(f"unexpected character {ch!r}", start, text)
            tokens.append(("op", ch, start))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class Parser:
    """Builds a generic AST; interpretation is left to the normalizer and evaluators."""

    def __init__(self, text: str, calls: Iterable[str] = ()):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        # Identifiers that are functions when followed by '('; anything else multiplies
        self.calls = set(calls)

    @property
    def current(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def error(self, message: str) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.current[2], self.text)

    def advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, value: str) -> None:
        if self.current[1] != value or self.current[0] != "op":
            raise self.error(f"expected {value!r}")
        self.advance()

    def parse(self) -> Node:
        if self.current[0] == "end":
            raise self.error("empty expression")
        node = self.parse_expr()
        if self.current[0] != "end":
            raise self.error(f"unexpected {self.current[1]!r}")
        return node

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while self.current[0] == "op" and self.current[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.parse_term())
        return node

    def _starts_atom(self) -> bool:
        kind, value, _ = self.current
        return kind in ("num", "name") or (kind == "op" and value == "(")

    def parse_term(self) -> Node:
        node = self.parse_unary()
        while True:
            kind, value, _ = self.current
            if kind == "op" and value in "*/":
                self.advance()
                node = BinOp(value, node, self.parse_unary())
            elif self._starts_atom():
                node = BinOp("*", node, self.parse_power())
            else:
                return node

    def parse_unary(self) -> Node:
        if self.current[0] == "op" and self.current[1] == "-":
            self.advance()
            return Neg(self.parse_unary())
        if self.current[0] == "op" and self.current[1] == "+":
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Node:
        node = self.parse_atom()
        if self.current[0] == "op" and self.current[1] == "^":
            self.advance()
            node = BinOp("^", node, self.parse_unary())
        return node

    def parse_atom(self) -> Node:
        kind, value, _ = self.current
        if kind == "num":
            self.advance()
            return Num(Fraction(int(value)))
        if kind == "name":
            self.advance()
            if value in self.calls and self.current[1] == "(" and self.current[0] == "op":
                self.advance()
                args = [self.parse_expr()]
                while self.current[0] == "op" and self.current[1] == ",":
                    self.advance()
                    args.append(self.parse_expr())
                self.expect(")")
                return Call(value, tuple(args))
            if value in VARIABLES or value in PARAMETERS:
                return Var(value)
            if value in CONSTANT_NAMES:
                return Name(value)
            raise ExprSyntaxError(f"unknown name {value!r}", self.tokens[self.index - 1][2], self.text)
        if kind == "op" and value == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        if kind == "end":
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected {value!r}")


def parse_node(text: str, calls: Iterable[str]) -> Node:
    return Parser(text, calls).parse()


def _env(params) -> dict:
    if not params:
        return {}
    items = params.items() if isinstance(params, dict) else params
    return {name: Fraction(value) for name, value in items}


def _freeze(params) -> Tuple[Tuple[str, Fraction], ...]:
    return tuple(sorted(_env(params).items()))


def parse_summand(text: str, params=None, sequences: Iterable[str] = ()) -> SummandExpr:
    """Parse and normalize a summand in k; `params` binds x, m, n; `sequences` names a(k)-style references."""
    return _parse_summand(text, _freeze(params), tuple(sorted(sequences)))


@lru_cache(maxsize=4096)
def _parse_summand(text: str, params: tuple, sequences: tuple) -> SummandExpr:
    from seriesverify.expr.normalize import normalize_summand

    calls = ("C", "H", "OddH", "AltH") + CLOSED_FORM_FUNCTIONS + sequences
    node = substitute(parse_node(text, calls), dict(params))
    return normalize_summand(node, text=text, sequences=sequences)


def parse_closed_form(text: str, params=None) -> ClosedFormExpr:
    """Parse an analytic right-hand side; it may not mention k or p."""
    return _parse_closed_form(text, _freeze(params))


@lru_cache(maxsize=4096)
def _parse_closed_form(text: str, params: tuple) -> ClosedFormExpr:
    from seriesverify.expr.normalize import canonical_node

    node = substitute(parse_node(text, CLOSED_FORM_FUNCTIONS), dict(params))
    unbound = free_vars(node)
    if unbound:
        raise ExprSyntaxError(f"closed form has free variables {sorted(unbound)}", None, text)
    return ClosedFormExpr(canonical_node(node), text)


def parse_congruence_rhs(text: str, params=None) -> CongruenceRHS:
    """Parse a mod p^e right-hand side over the atoms kron, q, B, E, H(p-1, m)."""
    return _parse_congruence_rhs(text, _freeze(params))


@lru_cache(maxsize=4096)
def _parse_congruence_rhs(text: str, params: tuple) -> CongruenceRHS:
    from seriesverify.expr.normalize import canonical_node

    node = substitute(parse_node(text, CONGRUENCE_FUNCTIONS), dict(params))
    unbound = free_vars(node) - {"p"}
    if unbound:
        raise ExprSyntaxError(f"congruence right-hand side has free variables {sorted(unbound)}", None, text)
    return CongruenceRHS(canonical_node(node), text)


def parse_polynomial(text: str, variable: str = "n") -> Tuple[Fraction, ...]:
    """Coefficients (low to high) of a polynomial in one variable, e.g. for recurrences."""
    from seriesverify.expr.normalize import node_to_poly

    node = parse_node(text, ())
    return node_to_poly(node, variable, text)


def parse_rational(text: Optional[str]) -> Fraction:
    from seriesverify.expr.evaluate import interpret_rational

    return interpret_rational(parse_node(str(text), CLOSED_FORM_FUNCTIONS))
