"""
Evaluators over the DSL.

`interpret_rational` walks the raw AST with exact rationals and direct sums.
It shares nothing with the Term machinery, so it doubles as an independent
oracle for `eval_summand_rational`. `eval_closed_form` encloses analytic
right-hand sides in balls.
"""
import math
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

from sympy import integer_nthroot

from seriesverify.arith.exact import (
    bernoulli_number,
    binomial,
    euler_number,
    harmonic,
    kronecker_symbol,
)
from seriesverify.arith.realball import RealBall
from seriesverify.constants import keys
from seriesverify.constants.cache import get_constant
from seriesverify.exceptions import (
    BallDomainError,
    ExprSyntaxError,
    NotRationalError,
    SummandEvaluationError,
)
from seriesverify.expr.nodes import (
    BinOp,
    Call,
    ClosedFormExpr,
    Name,
    Neg,
    Node,
    Num,
    SummandExpr,
    Term,
    Var,
)

SequenceTable = Mapping[str, Callable[[int], Fraction]]


def _as_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise ExprSyntaxError(f"{what} must be an integer, got {value}")
    return int(value)


def _exact_root(value: Fraction, degree: int) -> Fraction:
    if value < 0:
        raise NotRationalError(f"root of negative rational {value}")
    num, num_exact = integer_nthroot(value.numerator, degree)
    den, den_exact = integer_nthroot(value.denominator, degree)
    if not (num_exact and den_exact):
        raise NotRationalError(f"{value}^(1/{degree}) is irrational")
    return Fraction(int(num), int(den))


def _bernoulli_poly(n: int, x: Fraction) -> Fraction:
    return sum((math.comb(n, k) * bernoulli_number(k) * x ** (n - k) for k in range(n + 1)), Fraction(0))


def _euler_poly(n: int, x: Fraction) -> Fraction:
    shifted = x - Fraction(1, 2)
    return sum(
        (math.comb(n, k) * Fraction(euler_number(k), 2 ** k) * shifted ** (n - k) for k in range(n + 1)),
        Fraction(0),
    )


def interpret_rational(node: Node, env: Optional[dict] = None, sequences: Optional[SequenceTable] = None) -> Fraction:
    """Exact value of an AST; NotRationalError on any irrational constant."""
    env = env or {}
    ev = lambda n: interpret_rational(n, env, sequences)  # noqa: E731

    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise ExprSyntaxError(f"unbound variable {node.name!r}")
        return Fraction(env[node.name])
    if isinstance(node, Name):
        raise NotRationalError(f"{node.name} is irrational")
    if isinstance(node, Neg):
        return -ev(node.operand)
    if isinstance(node, BinOp):
        left = ev(node.left)
        right = ev(node.right)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            if right == 0:
                raise ZeroDivisionError("division by zero")
            return left / right
        if node.op == "^":
            if right.denominator == 1:
                if left == 0 and right < 0:
                    raise ZeroDivisionError("zero to a negative power")
                return left ** int(right)
            return _exact_root(left, right.denominator) ** right.numerator
    if isinstance(node, Call):
        return _interpret_call(node, ev, env, sequences)
    raise ExprSyntaxError(f"cannot evaluate {node!r}")


def _interpret_call(node: Call, ev, env, sequences) -> Fraction:
    name = node.name
    args = [ev(a) for a in node.args]
    if name == "C":
        return Fraction(binomial(_as_int(args[0], "C top"), _as_int(args[1], "C bottom")))
    if name in ("H", "OddH", "AltH"):
        n = _as_int(args[0], f"{name} index")
        m = _as_int(args[1], f"{name} order") if len(args) > 1 else 1
        if n < 0:
            raise SummandEvaluationError(f"{name} at negative index {n}")
        if name == "H":
            terms = (Fraction(1, j ** m) for j in range(1, n + 1))
        elif name == "OddH":
            terms = (Fraction(1, (2 * j - 1) ** m) for j in range(1, n + 1))
        else:
            terms = (Fraction((-1) ** j, j ** m) for j in range(1, n + 1))
        return sum(terms, Fraction(0))
    if name == "kron":
        return Fraction(kronecker_symbol(_as_int(args[0], "kron"), _as_int(args[1], "kron")))
    if name == "q":
        p = _as_int(Fraction(env["p"]), "p") if "p" in env else None
        if p is None:
            raise ExprSyntaxError("q(a) needs the prime p")
        a = _as_int(args[0], "q argument")
        if a % p == 0:
            raise ZeroDivisionError(f"q_{p}({a}) is undefined")
        return Fraction(a ** (p - 1) - 1, p)
    if name == "B":
        n = _as_int(args[0], "Bernoulli index")
        return bernoulli_number(n) if len(args) == 1 else _bernoulli_poly(n, args[1])
    if name == "E":
        n = _as_int(args[0], "Euler index")
        return Fraction(euler_number(n)) if len(args) == 1 else _euler_poly(n, args[1])
    if name == "sqrt":
        return _exact_root(args[0], 2)
    if name == "log":
        if args[0] == 1:
            return Fraction(0)
        raise NotRationalError(f"log({args[0]}) is irrational")
    if name == "exp":
        if args[0] == 0:
            return Fraction(1)
        raise NotRationalError(f"exp({args[0]}) is irrational")
    if name == "Gamma":
        if args[0].denominator == 1 and args[0] > 0:
            return Fraction(math.factorial(int(args[0]) - 1))
        raise NotRationalError(f"Gamma({args[0]}) is not a rational value")
    if name in ("zeta", "beta"):
        raise NotRationalError(f"{name}({args[0]}) is irrational")
    if sequences and name in sequences:
        return Fraction(sequences[name](_as_int(args[0], f"{name} index")))
    raise ExprSyntaxError(f"unknown function {name!r}")


# ---------------------------------------------------------------------------
# Term evaluation
# ---------------------------------------------------------------------------


def _horner(coeffs, k) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * k + c
    return total


def eval_term_rational(term: Term, k: int, p: Optional[int] = None,
                       sequences: Optional[SequenceTable] = None) -> Fraction:
    if not term.is_rational:
        raise NotRationalError("term carries an irrational constant")
    value = _horner(term.poly, k)
    for factor, n in term.denominators:
        d = _horner(factor, k)
        if d == 0:
            raise SummandEvaluationError(f"denominator vanishes at k={k}")
        value /= d ** n
    for (a, a0, b, b0), e in term.binoms:
        top, bottom = a * k + a0, b * k + b0
        if top < 0:
            raise SummandEvaluationError(f"binomial C({top},{bottom}) at k={k} has a negative top")
        c = binomial(top, bottom)
        if c == 0 and e < 0:
            raise SummandEvaluationError(f"zero binomial C({top},{bottom}) in a denominator at k={k}")
        value *= Fraction(c) ** e
    if term.base != 1:
        value *= term.base ** k
    if term.hf is not None:
        h = term.hf.c0
        for (mult, shift, order), coeff in term.hf.items:
            index = mult * k + shift
            if index < 0:
                raise SummandEvaluationError(f"harmonic index {index} < 0 at k={k}")
            h += coeff * harmonic(index, order)
        value *= h
    if term.seq:
        if not sequences or term.seq not in sequences:
            raise SummandEvaluationError(f"unknown sequence {term.seq!r}")
        value *= Fraction(sequences[term.seq](k))
    if term.p_power:
        if p is None:
            raise SummandEvaluationError("summand mentions p but no prime was given")
        value *= Fraction(p) ** term.p_power
    return value


def eval_summand_rational(expr: SummandExpr, k: int, p: Optional[int] = None,
                          sequences: Optional[SequenceTable] = None) -> Fraction:
    """Exact value of the summand at index k."""
    return sum((eval_term_rational(t, k, p, sequences) for t in expr.terms), Fraction(0))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

_NAMED = {
    "pi": keys.PI,
    "G": keys.CATALAN,
    "K": keys.K3,
    "L": keys.L8,
    "phi": keys.GOLDEN_PHI,
    "log2": keys.log_q(2),
}


def _try_rational(node: Node) -> Optional[Fraction]:
    try:
        return interpret_rational(node)
    except (NotRationalError, ExprSyntaxError):
        return None


def _gamma_ball(x: Fraction, prec: int) -> RealBall:
    if x.denominator == 1:
        if x <= 0:
            raise BallDomainError(f"Gamma has a pole at {x}")
        return RealBall.exact(math.factorial(int(x) - 1), prec)
    frac = x - math.floor(x)
    value = get_constant(keys.gamma_rat(frac), prec)
    if x > frac:
        for j in range(int(x - frac)):
            value = value * (frac + j)
    else:
        for j in range(1, int(frac - x) + 1):
            value = value / (frac - j)
    return value


def _ball(node: Node, prec: int) -> RealBall:
    value = _try_rational(node)
    if value is not None:
        return RealBall.exact(value, prec)
    if isinstance(node, Name):
        return get_constant(_NAMED[node.name], prec)
    if isinstance(node, Neg):
        return -_ball(node.operand, prec)
    if isinstance(node, BinOp):
        if node.op == "^":
            return _power(node.left, node.right, prec)
        left, right = _ball(node.left, prec), _ball(node.right, prec)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    if isinstance(node, Call):
        return _call_ball(node, prec)
    raise ExprSyntaxError(f"cannot enclose {node!r}")


def _power(base: Node, exponent: Node, prec: int) -> RealBall:
    e = _try_rational(exponent)
    b = _try_rational(base)
    if e is not None and e.denominator == 1:
        return _ball(base, prec) ** int(e)
    if b is not None and b < 0:
        raise BallDomainError(f"fractional power of negative {b}")
    if e is not None and e.denominator == 2 and b is not None:
        return get_constant(keys.sqrt_q(b), prec) ** e.numerator
    base_ball = _ball(base, prec)
    exp_ball = RealBall.exact(e, prec) if e is not None else _ball(exponent, prec)
    return (base_ball.log() * exp_ball).exp()


def _call_ball(node: Call, prec: int) -> RealBall:
    name = node.name
    arg = node.args[0]
    q = _try_rational(arg)
    if name == "sqrt":
        if q is not None:
            if q < 0:
                raise BallDomainError(f"sqrt of negative {q}")
            return RealBall.exact(0, prec) if q == 0 else get_constant(keys.sqrt_q(q), prec)
        return _ball(arg, prec).sqrt()
    if name == "log":
        if q is not None:
            if q <= 0:
                raise BallDomainError(f"log of nonpositive {q}")
            return get_constant(keys.log_q(q), prec)
        return _ball(arg, prec).log()
    if name == "exp":
        return _ball(arg, prec).exp()
    if name in ("zeta", "beta", "Gamma") and q is None:
        raise ExprSyntaxError(f"{name} needs a rational argument")
    if name == "zeta":
        return get_constant(keys.zeta(_as_int(q, "zeta argument")), prec)
    if name == "beta":
        return get_constant(keys.beta(_as_int(q, "beta argument")), prec)
    if name == "Gamma":
        return _gamma_ball(q, prec)
    raise ExprSyntaxError(f"unknown function {name!r} in a closed form")


def eval_closed_form(expr: Union[ClosedFormExpr, Node], prec: int) -> RealBall:
    """Enclosure of an analytic expression at `prec` bits."""
    node = expr.node if isinstance(expr, ClosedFormExpr) else expr
    return _ball(node, prec)
