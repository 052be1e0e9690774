"""Canonical text for DSL objects; parsing the output gives back the same structure."""
from fractions import Fraction
from typing import Sequence, Union

from seriesverify.expr.nodes import (
    BinOp,
    Call,
    ClosedFormExpr,
    CongruenceRHS,
    HForm,
    Name,
    Neg,
    Node,
    Num,
    SummandExpr,
    Term,
    Var,
)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY = 3
_POWER = 4
_ATOM = 5


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _level(node: Node) -> int:
    if isinstance(node, Num):
        if node.value < 0:
            return _UNARY
        return _ATOM if node.value.denominator == 1 else _PREC["/"]
    if isinstance(node, Neg):
        return _UNARY
    if isinstance(node, BinOp):
        return _POWER if node.op == "^" else _PREC[node.op]
    return _ATOM


def _leads_with_minus(node: Node) -> bool:
    if isinstance(node, Num):
        return node.value < 0
    if isinstance(node, Neg):
        return True
    if isinstance(node, BinOp) and node.op != "^":
        return _leads_with_minus(node.left)
    return False


def _wrap(text: str, cond: bool) -> str:
    return f"({text})" if cond else text


def print_node(node: Node) -> str:
    if isinstance(node, Num):
        return format_rational(node.value)
    if isinstance(node, (Var, Name)):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({','.join(print_node(a) for a in node.args)})"
    if isinstance(node, Neg):
        return "-" + _wrap(print_node(node.operand), _level(node.operand) < _POWER)
    if node.op == "^":
        base = _wrap(print_node(node.left), _level(node.left) < _ATOM)
        exponent = node.right
        simple = (isinstance(exponent, Num) and exponent.value >= 0 and exponent.value.denominator == 1) \
            or isinstance(exponent, (Var, Name))
        return f"{base}^{_wrap(print_node(exponent), not simple)}"
    level = _PREC[node.op]
    left = _wrap(print_node(node.left), _level(node.left) < level)
    right_node = node.right
    right = _wrap(
        print_node(right_node),
        _level(right_node) <= level or _leads_with_minus(right_node),
    )
    if node.op in "+-":
        return f"{left} {node.op} {right}"
    return f"{left}{node.op}{right}"


# ---------------------------------------------------------------------------
# summands
# ---------------------------------------------------------------------------


def format_affine(mult: int, shift: int, var: str = "k") -> str:
    if mult == 0:
        return str(shift)
    head = var if mult == 1 else f"{mult}{var}"
    if shift == 0:
        return head
    return f"{head}{shift:+d}"


def format_poly(coeffs: Sequence, var: str = "k") -> str:
    """Highest power first, e.g. 205k^2-160k+32."""
    parts = []
    for power in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[power])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if power == 0:
            body = format_rational(mag)
        else:
            mono = var if power == 1 else f"{var}^{power}"
            if mag == 1:
                body = mono
            elif mag.denominator == 1:
                body = f"{mag.numerator}{mono}"
            else:
                body = f"{format_rational(mag)}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f"{sign}{body}"
    return text


def _signed_power(text: str, n: int) -> str:
    if n == 1:
        return text
    return f"{text}^{n}" if n > 0 else f"{text}^({n})"


def format_hform(hf: HForm) -> str:
    if hf.is_unit():
        (mult, shift, order), _ = hf.items[0]
        return f"H({format_affine(mult, shift)},{order})"
    pieces = []
    for (mult, shift, order), coeff in hf.items:
        atom = f"H({format_affine(mult, shift)},{order})"
        mag = abs(coeff)
        pieces.append(("-" if coeff < 0 else "+", atom if mag == 1 else f"{format_rational(mag)}*{atom}"))
    if hf.c0:
        pieces.append(("-" if hf.c0 < 0 else "+", format_rational(abs(hf.c0))))
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f"{sign}{body}"
    return f"({text})"


def format_term(term: Term) -> str:
    factors = []
    poly = term.poly
    scalar_only = len(poly) == 1
    if not scalar_only:
        factors.append(f"({format_poly(poly)})")
    for factor, n in term.denominators:
        factors.append(_signed_power(f"({format_poly(factor)})", -n))
    for (a, a0, b, b0), e in term.binoms:
        factors.append(_signed_power(f"C({format_affine(a, a0)},{format_affine(b, b0)})", e))
    if term.base != 1:
        base = term.base
        text = str(base.numerator) if base.denominator == 1 and base > 0 else f"({format_rational(base)})"
        factors.append(f"{text}^k")
    if term.base_irr is not None:
        factors.append(f"({print_node(term.base_irr)})^k")
    if term.hf is not None:
        factors.append(format_hform(term.hf))
    if term.seq:
        factors.append(f"{term.seq}(k)")
    if term.p_power:
        factors.append(_signed_power("p", term.p_power))
    if term.const is not None:
        factors.append(f"({print_node(term.const)})")

    if scalar_only:
        c = poly[0]
        if not factors:
            return format_rational(c)
        if c == 1:
            return "*".join(factors)
        if c == -1:
            return "-" + "*".join(factors)
        factors.insert(0, format_rational(c))
    return "*".join(factors)


def format_summand(expr: SummandExpr) -> str:
    if not expr.terms:
        return "0"
    text = ""
    for i, term in enumerate(expr.terms):
        piece = format_term(term)
        if i == 0:
            text = piece
        elif piece.startswith("-"):
            text += f" - {piece[1:]}"
        else:
            text += f" + {piece}"
    return text


def print_expr(obj: Union[SummandExpr, ClosedFormExpr, CongruenceRHS, Term, Node]) -> str:
    """Canonical text of any DSL object."""
    if isinstance(obj, SummandExpr):
        return format_summand(obj)
    if isinstance(obj, Term):
        return format_term(obj)
    if isinstance(obj, (ClosedFormExpr, CongruenceRHS)):
        return print_node(obj.node)
    return print_node(obj)
