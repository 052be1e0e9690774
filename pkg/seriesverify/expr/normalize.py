"""
Expansion of summand ASTs into the Term normal form.

A summand becomes a sum of Terms. Harmonic sums written as one parenthesized
group stay together as a single HForm; everything else is distributed.
"""
import math
from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Poly as SymPoly
from sympy import Rational as SymRational
from sympy import factor_list, symbols

from seriesverify.exceptions import ExprSyntaxError, NotRationalError, SummandEvaluationError
from seriesverify.expr.evaluate import interpret_rational
from seriesverify.expr.nodes import (
    MAX_HARMONIC_ORDER,
    BinOp,
    Call,
    HForm,
    Name,
    Neg,
    Node,
    Num,
    Poly,
    SummandExpr,
    Term,
    Var,
)

_K = symbols("k")

ONE = (Fraction(1),)

# ---------------------------------------------------------------------------
# polynomial helpers (coefficients low to high)
# ---------------------------------------------------------------------------


def poly_trim(poly: Sequence[Fraction]) -> Poly:
    coeffs = [Fraction(c) for c in poly]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (Fraction(0),)


def poly_add(a: Poly, b: Poly) -> Poly:
    size = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size)])


def poly_mul(a: Sequence, b: Sequence) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_scale(a: Poly, c: Fraction) -> Poly:
    return poly_trim([x * c for x in a])


def poly_is_zero(a: Poly) -> bool:
    return all(c == 0 for c in a)


def poly_degree(a: Poly) -> int:
    return -1 if poly_is_zero(a) else len(poly_trim(a)) - 1


def poly_eval(a: Sequence, x) -> Fraction:
    total = Fraction(0)
    for c in reversed(a):
        total = total * x + c
    return total


def poly_divmod(a: Poly, b: Sequence) -> Tuple[Poly, Poly]:
    rem = list(poly_trim(a))
    b = [Fraction(c) for c in b]
    db = len(b) - 1
    if len(rem) - 1 < db:
        return (Fraction(0),), poly_trim(rem)
    quot = [Fraction(0)] * (len(rem) - db)
    for i in range(len(rem) - 1 - db, -1, -1):
        coef = rem[i + db] / b[db]
        quot[i] = coef
        for j in range(db + 1):
            rem[i + j] -= coef * b[j]
    return poly_trim(quot), poly_trim(rem[:db] or [0])


def factor_polynomial(poly: Poly) -> Tuple[Fraction, List[Tuple[Tuple[int, ...], int]]]:
    """content * prod f_i^n_i with f_i primitive integer polynomials, positive leading coefficient."""
    expr = sum(SymRational(c.numerator, c.denominator) * _K ** i for i, c in enumerate(poly))
    content, factors = factor_list(expr, _K)
    content = Fraction(int(SymRational(content).p), int(SymRational(content).q))
    out = []
    for factor, mult in factors:
        coeffs = [int(c) for c in reversed(SymPoly(factor, _K).all_coeffs())]
        g = math.gcd(*coeffs)
        coeffs = [c // g for c in coeffs]
        content *= Fraction(g) ** mult
        if coeffs[-1] < 0:
            coeffs = [-c for c in coeffs]
            content *= (-1) ** mult
        out.append((tuple(coeffs), mult))
    return content, sorted(out)


# ---------------------------------------------------------------------------
# node helpers
# ---------------------------------------------------------------------------

_STRUCTURAL_CALLS = {"C", "H", "OddH", "AltH", "kron", "q", "B", "E"}


def _is_constant(node: Node, sequences: Sequence[str]) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, (Num, Name)):
        return True
    if isinstance(node, Neg):
        return _is_constant(node.operand, sequences)
    if isinstance(node, BinOp):
        return _is_constant(node.left, sequences) and _is_constant(node.right, sequences)
    if isinstance(node, Call):
        if node.name in _STRUCTURAL_CALLS or node.name in sequences:
            return False
        return all(_is_constant(a, sequences) for a in node.args)
    return False


def canonical_node(node: Node) -> Node:
    """Fold rational subtrees to literals, e.g. 2/4 -> 1/2."""
    try:
        return Num(interpret_rational(node))
    except (NotRationalError, ExprSyntaxError, SummandEvaluationError, ZeroDivisionError, ValueError):
        pass
    if isinstance(node, Neg):
        inner = canonical_node(node.operand)
        return Num(-inner.value) if isinstance(inner, Num) else Neg(inner)
    if isinstance(node, BinOp):
        return BinOp(node.op, canonical_node(node.left), canonical_node(node.right))
    if isinstance(node, Call):
        return Call(node.name, tuple(canonical_node(a) for a in node.args))
    return node


def _node_mul(a: Optional[Node], b: Optional[Node]) -> Optional[Node]:
    if a is None:
        return b
    if b is None:
        return a
    return BinOp("*", a, b)


def _node_inv(a: Optional[Node]) -> Optional[Node]:
    return None if a is None else BinOp("/", Num(Fraction(1)), a)


def _node_pow(a: Optional[Node], n: int) -> Optional[Node]:
    if a is None or n == 1:
        return a
    if n == 0:
        return None
    return BinOp("^", a, Num(Fraction(n)))


# ---------------------------------------------------------------------------
# Term algebra
# ---------------------------------------------------------------------------


def _merge_counts(*groups) -> tuple:
    counts: Dict = defaultdict(int)
    for group in groups:
        for key, n in group:
            counts[key] += n
    return tuple(sorted((key, n) for key, n in counts.items() if n))


def _cancel(poly: Poly, denominators) -> Tuple[Poly, tuple]:
    if poly_degree(poly) < 1 or not denominators:
        return poly, denominators
    kept = []
    for factor, n in denominators:
        while n > 0 and poly_degree(poly) >= len(factor) - 1:
            quot, rem = poly_divmod(poly, factor)
            if not poly_is_zero(rem):
                break
            poly, n = quot, n - 1
        if n:
            kept.append((factor, n))
    return poly, tuple(kept)


def _build(poly, denominators=(), binoms=(), **fields) -> Term:
    poly, denominators = _cancel(poly_trim(poly), tuple(denominators))
    return Term(poly=poly, denominators=denominators, binoms=tuple(binoms), **fields)


def mul_terms(a: Term, b: Term, text: str = "") -> Term:
    if a.hf is not None and b.hf is not None:
        raise ExprSyntaxError("product of two harmonic factors is not supported", None, text)
    if a.seq and b.seq:
        raise ExprSyntaxError("product of two sequence references is not supported", None, text)
    return _build(
        poly_mul(a.poly, b.poly),
        _merge_counts(a.denominators, b.denominators),
        _merge_counts(a.binoms, b.binoms),
        base=a.base * b.base,
        base_irr=_node_mul(a.base_irr, b.base_irr),
        hf=a.hf if a.hf is not None else b.hf,
        seq=a.seq or b.seq,
        p_power=a.p_power + b.p_power,
        const=_node_mul(a.const, b.const),
    )


def merge_terms(terms: Sequence[Term]) -> List[Term]:
    """Add up like terms and drop zeros; order is canonical."""
    grouped: Dict[tuple, Poly] = {}
    sample: Dict[tuple, Term] = {}
    for term in terms:
        sig = term.signature()
        grouped[sig] = poly_add(grouped[sig], term.poly) if sig in grouped else term.poly
        sample.setdefault(sig, term)
    out = []
    for sig, poly in grouped.items():
        if poly_is_zero(poly):
            continue
        t = sample[sig]
        out.append(_build(
            poly, t.denominators, t.binoms, base=t.base, base_irr=t.base_irr,
            hf=t.hf, seq=t.seq, p_power=t.p_power, const=t.const,
        ))
    return sorted(out, key=lambda t: repr(t.signature()))


def _is_h_scalar(term: Term) -> bool:
    return (
        poly_degree(term.poly) <= 0 and not term.denominators and not term.binoms
        and term.base == 1 and term.base_irr is None and term.seq is None
        and term.p_power == 0 and term.const is None
    )


def h_term(items: Dict[Tuple[int, int, int], Fraction], c0: Fraction) -> List[Term]:
    items = {key: c for key, c in items.items() if c}
    if not items:
        return [Term(poly=(Fraction(c0),))] if c0 else []
    if len(items) == 1 and c0 == 0:
        (key, coeff), = items.items()
        return [Term(poly=(coeff,), hf=HForm(((key, Fraction(1)),), Fraction(0)))]
    return [Term(poly=ONE, hf=HForm(tuple(sorted(items.items())), Fraction(c0)))]


def _collapse_h(terms: Sequence[Term]) -> List[Term]:
    items: Dict[Tuple[int, int, int], Fraction] = defaultdict(Fraction)
    c0 = Fraction(0)
    for term in terms:
        scale = term.poly[0]
        if term.hf is None:
            c0 += scale
            continue
        for key, coeff in term.hf.items:
            items[key] += scale * coeff
        c0 += scale * term.hf.c0
    return h_term(items, c0)


class SummandNormalizer:
    """Walks a parameter-free AST and produces merged Terms."""

    def __init__(self, text: str = "", sequences: Sequence[str] = ()):
        self.text = text
        self.sequences = tuple(sequences)

    def error(self, message: str) -> ExprSyntaxError:
        return ExprSyntaxError(message, None, self.text)

    def normalize(self, node: Node) -> List[Term]:
        if _is_constant(node, self.sequences):
            return self._constant(node)
        if isinstance(node, Var):
            if node.name == "k":
                return [Term(poly=(Fraction(0), Fraction(1)))]
            if node.name == "p":
                return [Term(poly=ONE, p_power=1)]
            raise self.error(f"unbound parameter {node.name!r}")
        if isinstance(node, Neg):
            return [self._scaled(t, Fraction(-1)) for t in self.normalize(node.operand)]
        if isinstance(node, BinOp):
            if node.op in "+-":
                left = self.normalize(node.left)
                right = self.normalize(node.right)
                if node.op == "-":
                    right = [self._scaled(t, Fraction(-1)) for t in right]
                return self._add(left + right)
            if node.op == "*":
                return self._mul(self.normalize(node.left), self.normalize(node.right))
            if node.op == "/":
                return self._mul(self.normalize(node.left), self._invert(self.normalize(node.right)))
            if node.op == "^":
                return self._pow(node.left, node.right)
        if isinstance(node, Call):
            return self._call(node)
        raise self.error(f"cannot interpret {node!r} in a summand")

    # pieces

    def _constant(self, node: Node) -> List[Term]:
        try:
            value = interpret_rational(node)
        except NotRationalError:
            return [Term(poly=ONE, const=canonical_node(node))]
        except ZeroDivisionError:
            raise self.error("division by zero in a constant factor")
        return [Term(poly=(value,))] if value else []

    @staticmethod
    def _scaled(term: Term, c: Fraction) -> Term:
        return Term(
            poly=poly_scale(term.poly, c), denominators=term.denominators, binoms=term.binoms,
            base=term.base, base_irr=term.base_irr, hf=term.hf, seq=term.seq,
            p_power=term.p_power, const=term.const,
        )

    def _add(self, terms: List[Term]) -> List[Term]:
        if len(terms) > 1 and all(_is_h_scalar(t) for t in terms) and any(t.hf for t in terms):
            return _collapse_h(terms)
        return merge_terms(terms)

    def _mul(self, left: List[Term], right: List[Term]) -> List[Term]:
        return merge_terms([mul_terms(a, b, self.text) for a in left for b in right])

    def _invert(self, terms: List[Term]) -> List[Term]:
        if not terms:
            raise self.error("division by zero")
        if len(terms) != 1:
            raise self.error("cannot divide by a sum of unlike terms")
        t = terms[0]
        if t.hf is not None or t.seq:
            raise self.error("harmonic factors and sequences cannot appear in a denominator")
        if t.base == 0:
            raise self.error("zero base in a denominator")
        numerator = ONE
        for factor, n in t.denominators:
            for _ in range(n):
                numerator = poly_mul(numerator, [Fraction(c) for c in factor])
        if poly_degree(t.poly) == 0:
            content, factors = t.poly[0], []
        else:
            content, factors = factor_polynomial(t.poly)
        return [_build(
            poly_scale(numerator, 1 / content),
            tuple(factors),
            tuple((key, -n) for key, n in t.binoms),
            base=1 / t.base,
            base_irr=_node_inv(t.base_irr),
            p_power=-t.p_power,
            const=_node_inv(t.const),
        )]

    def _int_poly(self, node: Node, what: str) -> Tuple[int, int]:
        """Read an integer-affine form c*k + d."""
        terms = self.normalize(node)
        if not terms:
            return 0, 0
        if len(terms) != 1 or terms[0].signature() != Term(poly=ONE).signature():
            raise self.error(f"{what} must be an integer-affine form in k")
        poly = terms[0].poly
        if poly_degree(poly) > 1 or any(c.denominator != 1 for c in poly):
            raise self.error(f"{what} must be an integer-affine form in k")
        d = int(poly[0])
        c = int(poly[1]) if len(poly) > 1 else 0
        return c, d

    def _pow(self, base: Node, exponent: Node) -> List[Term]:
        c, d = self._int_poly(exponent, "exponent")
        if c == 0:
            return self._int_power(self.normalize(base), d)
        if not _is_constant(base, self.sequences):
            raise self.error("only constants may be raised to a power involving k")
        try:
            r = interpret_rational(base)
        except NotRationalError:
            node = canonical_node(base)
            return [Term(poly=ONE, base_irr=_node_pow(node, c), const=_node_pow(node, d))]
        if r == 0:
            raise self.error("zero raised to a power of k")
        return [Term(poly=(r ** d,), base=r ** c)]

    def _int_power(self, terms: List[Term], n: int) -> List[Term]:
        if n < 0:
            terms, n = self._invert(terms), -n
        result = [Term(poly=ONE)]
        for _ in range(n):
            result = self._mul(result, terms)
        return result

    def _harmonic(self, arg: Node, order: Node, name: str) -> Tuple[int, int, int]:
        mult, shift = self._int_poly(arg, f"{name} argument")
        try:
            m = interpret_rational(order)
        except (NotRationalError, ExprSyntaxError):
            raise self.error(f"unknown harmonic order in {name}")
        if m.denominator != 1 or not 1 <= m <= MAX_HARMONIC_ORDER:
            raise self.error(f"unknown harmonic order {m} (expected 1..{MAX_HARMONIC_ORDER})")
        if mult < 0:
            raise self.error(f"{name} argument must not decrease with k")
        return mult, shift, int(m)

    def _call(self, node: Call) -> List[Term]:
        name, args = node.name, node.args
        if name == "C":
            if len(args) != 2:
                raise self.error("C takes two arguments")
            a, a0 = self._int_poly(args[0], "binomial top")
            b, b0 = self._int_poly(args[1], "binomial bottom")
            if a == 0 and b == 0:
                value = math.comb(a0, b0) if 0 <= b0 <= a0 else 0
                return [Term(poly=(Fraction(value),))] if value else []
            if not a >= b >= 0:
                raise self.error(f"malformed binomial C({a}k{a0:+d},{b}k{b0:+d})")
            return [Term(poly=ONE, binoms=(((a, a0, b, b0), 1),))]
        if name in ("H", "OddH", "AltH"):
            if len(args) not in (1, 2):
                raise self.error(f"{name} takes one or two arguments")
            order = args[1] if len(args) == 2 else Num(Fraction(1))
            mult, shift, m = self._harmonic(args[0], order, name)
            if name == "H":
                items = {(mult, shift, m): Fraction(1)}
            elif name == "OddH":
                # sum_{j<=n} (2j-1)^-m = H_2n - 2^-m H_n
                items = {(2 * mult, 2 * shift, m): Fraction(1), (mult, shift, m): -Fraction(1, 2 ** m)}
            else:
                if mult % 2 or shift % 2:
                    raise self.error("AltH needs an even argument")
                # sum_{j<=2n} (-1)^j / j^m = 2^(1-m) H_n - H_2n
                items = {(mult // 2, shift // 2, m): Fraction(2, 2 ** m), (mult, shift, m): Fraction(-1)}
            if mult == 0:
                # constant index: fold to a rational
                return self._constant(node)
            merged: Dict[Tuple[int, int, int], Fraction] = defaultdict(Fraction)
            for key, coeff in items.items():
                merged[key] += coeff
            return h_term(merged, Fraction(0))
        if name in self.sequences:
            if len(args) != 1 or self._int_poly(args[0], f"{name} argument") != (1, 0):
                raise self.error(f"sequence {name} must be referenced as {name}(k)")
            return [Term(poly=ONE, seq=name)]
        raise self.error(f"unknown function {name!r} in a summand")


def normalize_summand(node: Node, text: str = "", sequences: Sequence[str] = ()) -> SummandExpr:
    terms = SummandNormalizer(text, sequences).normalize(node)
    return SummandExpr(tuple(merge_terms(terms)), text)


def node_to_poly(node: Node, variable: str, text: str = "") -> Poly:
    """Expand an AST that is a polynomial in one variable into coefficients."""
    if isinstance(node, Num):
        return (node.value,)
    if isinstance(node, Var):
        if node.name != variable:
            raise ExprSyntaxError(f"unexpected variable {node.name!r}", None, text)
        return (Fraction(0), Fraction(1))
    if isinstance(node, Neg):
        return poly_scale(node_to_poly(node.operand, variable, text), Fraction(-1))
    if isinstance(node, BinOp):
        left = node_to_poly(node.left, variable, text)
        if node.op == "^":
            power = interpret_rational(node.right)
            if power.denominator != 1 or power < 0:
                raise ExprSyntaxError("polynomial powers must be nonnegative integers", None, text)
            out = ONE
            for _ in range(int(power)):
                out = poly_mul(out, left)
            return out
        right = node_to_poly(node.right, variable, text)
        if node.op == "+":
            return poly_add(left, right)
        if node.op == "-":
            return poly_add(left, poly_scale(right, Fraction(-1)))
        if node.op == "*":
            return poly_mul(left, right)
        if node.op == "/" and poly_degree(right) <= 0 and right[0] != 0:
            return poly_scale(left, 1 / right[0])
    raise ExprSyntaxError("not a polynomial", None, text)
