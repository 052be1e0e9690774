from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seriesverify.exceptions import ExprSyntaxError
from seriesverify.expr.evaluate import eval_summand_rational
from seriesverify.expr.nodes import BinOp, Call, Name, Neg, Num, Term
from seriesverify.expr.normalize import canonical_node
from seriesverify.expr.parser import (
    parse_closed_form,
    parse_congruence_rhs,
    parse_polynomial,
    parse_rational,
    parse_summand,
    tokenize,
)
from seriesverify.expr.printer import format_poly, print_expr, print_node

REGISTRY_SUMMANDS = [
    "(6*k+1)*C(2k,k)^3/256^k*(H(2k,3)-7/64*H(k,3))",
    "(-1)^(k-1)/(k^3*C(2k,k))",
    "(25*k-3)/(2^k*C(3k,k))",
    "(205*k^2-160*k+32)*(-1)^k/(k^5*C(2k,k)^5)",
    "C(2k,k)^2*C(3k,k)/(-192)^k*((5*k+1)*(3*H(3k)+2*H(2k)-5*H(k))+5)",
    "(4*k+1)*C(2k,k)/(-4)^k*OddH(k,3)",
    "C(2k,k)/((2*k+1)*16^k)",
    "(-1)^k*(3*k+1)/(-8)^k*AltH(2k,2)",
    "64^(k-1)/(k*C(2k,k)^2)",
]


def test_tokenize_positions():
    assert tokenize("2k + C(2k,k)")[:3] == [("num", "2", 0), ("name", "k", 1), ("op", "+", 3)]
    with pytest.raises(ExprSyntaxError) as excinfo:
        tokenize("k % 2")
    assert excinfo.value.position == 2


def test_gosper_term():
    expr = parse_summand("(25k-3)/(2^k*C(3k,k))")
    assert len(expr.terms) == 1
    term = expr.terms[0]
    assert term.poly == (Fraction(-3), Fraction(25))
    assert term.binoms == (((3, 0, 1, 0), -1),)
    assert term.base == Fraction(1, 2)


def test_harmonic_factor_stays_grouped():
    expr = parse_summand(REGISTRY_SUMMANDS[0])
    assert len(expr.terms) == 1
    term = expr.terms[0]
    assert term.poly == (Fraction(1), Fraction(6))
    assert term.binoms == (((2, 0, 1, 0), 3),)
    assert term.base == Fraction(1, 256)
    assert dict(term.hf.items) == {(1, 0, 3): Fraction(-7, 64), (2, 0, 3): Fraction(1)}


def test_sign_shift_folds_into_the_coefficient():
    term = parse_summand("(-1)^(k-1)/(k^3*C(2k,k))").terms[0]
    assert term.base == -1
    assert term.poly == (Fraction(-1),)
    assert term.denominators == (((0, 1), 3),)
    assert term.binoms == (((2, 0, 1, 0), -1),)


def test_constant_powers_fold_into_the_base():
    assert parse_summand("1/(-2^20)^k").terms[0].base == Fraction(1, -2 ** 20)
    term = parse_summand("64^(k-1)").terms[0]
    assert (term.base, term.poly) == (64, (Fraction(1, 64),))


def test_irrational_factors_are_kept_aside():
    expr = parse_summand("log(8/9)*C(2k,k)/16^k")
    assert not expr.is_rational
    assert expr.terms[0].const is not None


def test_parameters_are_substituted():
    expr = parse_summand("C(2k,k)^n*x^k", {"n": 2, "x": Fraction(1, 16)})
    term = expr.terms[0]
    assert term.binoms == (((2, 0, 1, 0), 2),)
    assert term.base == Fraction(1, 16)


@pytest.mark.parametrize("text", [
    "1/(H(k)+1)",
    "1/(k+C(2k,k))",
    "H(k,9)",
    "H(k)*H(2k)",
    "k^k",
    "H(-k)",
    "C(k,2k)",
    "frob(k)",
    "(k+1",
    "",
])
def test_malformed_summands(text):
    with pytest.raises(ExprSyntaxError):
        parse_summand(text)


def test_unknown_sequence_is_a_name_error():
    with pytest.raises(ExprSyntaxError):
        parse_summand("a(k)/16^k")
    assert parse_summand("a(k)/16^k", sequences=("a",)).sequences == ("a",)


@pytest.mark.parametrize("text", [
    "25*zeta(3)/(8*pi) - G",
    "Gamma(1/4)^2*(pi^2-8*G)/(32*pi*sqrt(pi))",
    "2*sqrt(2)/pi",
    "-7/2*log(2)^3 + pi^2/3*L",
])
def test_closed_form_round_trip(text):
    parsed = parse_closed_form(text)
    assert parse_closed_form(print_expr(parsed)).node == parsed.node


def test_closed_form_rejects_free_variables():
    with pytest.raises(ExprSyntaxError):
        parse_closed_form("pi*k")
    assert parse_closed_form("x*pi", {"x": 2}).node == BinOp("*", Num(Fraction(2)), Name("pi"))


def test_rational_normalization():
    assert print_node(canonical_node(parse_closed_form("2/4").node)) == "1/2"
    assert parse_rational("2^(16)/(-3)") == Fraction(-65536, 3)


def test_congruence_rhs_keeps_p_symbolic():
    rhs = parse_congruence_rhs("(-1)^((p+1)/2)*q(2)^2")
    assert print_expr(rhs) == "(-1)^((p + 1)/2)*q(2)^2"
    with pytest.raises(ExprSyntaxError):
        parse_congruence_rhs("k*p")


def test_polynomials():
    assert parse_polynomial("(n+1)^3") == (Fraction(1), Fraction(3), Fraction(3), Fraction(1))
    assert format_poly(parse_polynomial("8*(2*n-1)^3"), "n") == "64n^3-96n^2+48n-8"


@pytest.mark.parametrize("text", REGISTRY_SUMMANDS)
def test_summand_print_reparse_agrees_termwise(text):
    expr = parse_summand(text)
    again = parse_summand(print_expr(expr))
    for k in range(1, 8):
        assert eval_summand_rational(again, k) == eval_summand_rational(expr, k)


def test_harmonic_terms_print_in_sorted_order():
    text = print_expr(parse_summand("H(k,3)+H(2k)+H(k)"))
    assert text == "(H(k,1)+H(k,3)+H(2k,1))"


leaves = st.one_of(
    st.integers(min_value=0, max_value=12).map(lambda n: Num(Fraction(n))),
    st.fractions(min_value=-5, max_value=5, max_denominator=12).map(Num),
    st.sampled_from([Name("pi"), Name("G"), Name("K"), Name("L")]),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/"]), children, children),
        st.builds(BinOp, st.just("^"), children, st.integers(min_value=-2, max_value=2).map(lambda n: Num(Fraction(n)))),
        children.map(lambda c: Call("sqrt", (c,))),
        children.map(lambda c: Call("log", (c,))),
    )


closed_forms = st.recursive(leaves, _extend, max_leaves=8)


@settings(max_examples=300, deadline=None)
@given(closed_forms)
def test_print_then_parse_is_a_fixed_point(node):
    canonical = canonical_node(node)
    reparsed = parse_closed_form(print_node(canonical)).node
    assert reparsed == canonical
