from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath.libmp import mpf_shift

from seriesverify.arith.realball import RealBall, Verdict, ball_compare, mpf_to_fraction, working_prec
from seriesverify.exceptions import BallDomainError

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 6)
precisions = st.sampled_from([53, 64, 128, 300])


def bounds(ball: RealBall):
    return mpf_to_fraction(ball.lower()), mpf_to_fraction(ball.upper())


def test_exact_rational_is_contained():
    assert RealBall.exact(Fraction(1, 3), 64).contains(Fraction(1, 3))


def test_small_integers_are_exact():
    total = RealBall.exact(2, 64) + RealBall.exact(3, 64)
    assert total.contains(5)
    assert RealBall.exact(5, 64).radius == 0


def test_sqrt_two():
    ball = RealBall.exact(2, working_prec(30)).sqrt()
    lo, hi = bounds(ball)
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo < Fraction(1, 10 ** 30)


def test_exp_log_round_trip():
    ball = RealBall.exact(Fraction(3, 7), 200).exp().log()
    assert ball.contains(Fraction(3, 7))


def check_arithmetic_contains_exact_result(a, b, prec):
    x, y = RealBall.exact(a, prec), RealBall.exact(b, prec)
    assert (x + y).contains(a + b)
    assert (x - y).contains(a - b)
    assert (x * y).contains(a * b)
    if b != 0:
        assert (x / y).contains(a / b)


@given(a=rationals, b=rationals, prec=precisions)
def test_arithmetic_contains_exact_result(a, b, prec):
    check_arithmetic_contains_exact_result(a, b, prec)


@pytest.mark.slow
@settings(max_examples=10_000, deadline=None)
@given(a=rationals, b=rationals, prec=precisions)
def test_arithmetic_contains_exact_result_long_run(a, b, prec):
    check_arithmetic_contains_exact_result(a, b, prec)


@given(a=rationals.filter(lambda x: x > 0), b=rationals, prec=precisions)
def test_raising_precision_never_widens(a, b, prec):
    def enclose(bits):
        x, y = RealBall.exact(a, bits), RealBall.exact(b, bits)
        return [(x * y + x) / a, x.sqrt(), x.log(), (x / 7).exp()]

    for coarse, fine in zip(enclose(prec), enclose(2 * prec)):
        assert fine.radius <= coarse.radius
        # fine may stick out of coarse only by its own diameter
        assert coarse.widen(mpf_shift(fine.rad, 1)).contains_ball(fine)
    assert enclose(2 * prec)[0].contains(b + 1)


@given(a=rationals, n=st.integers(min_value=-4, max_value=6))
def test_integer_powers(a, n):
    if a == 0 and n < 0:
        return
    assert (RealBall.exact(a, 128) ** n).contains(a ** n)


def test_compare_identical_tight_balls():
    x = RealBall.exact(Fraction(1, 3), working_prec(40))
    assert ball_compare(x, x, 30) is Verdict.CERTIFIED_EQUAL


def test_compare_disjoint_balls():
    assert ball_compare(RealBall.exact(1, 100), RealBall.exact(2, 100), 30) is Verdict.CERTIFIED_DISTINCT


def test_compare_overlapping_wide_balls():
    a = RealBall.from_bounds(Fraction(0), Fraction(1), 100)
    b = RealBall.from_bounds(Fraction(1, 2), Fraction(3, 2), 100)
    assert ball_compare(a, b, 30) is Verdict.INCONCLUSIVE


def test_domain_errors():
    with pytest.raises(BallDomainError):
        RealBall.exact(1, 64) / RealBall.from_bounds(Fraction(-1), Fraction(1), 64)
    with pytest.raises(BallDomainError):
        RealBall.exact(-2, 64).sqrt()
    with pytest.raises(BallDomainError):
        RealBall.exact(0, 64).log()


def test_widen_and_contains_ball():
    inner = RealBall.exact(Fraction(1, 3), 100)
    outer = inner.widen(RealBall.exact(Fraction(1, 1000), 100).mid)
    assert outer.contains_ball(inner)
    assert outer.overlaps(inner)
    assert not inner.contains_ball(outer)
