from fractions import Fraction

import mpmath
import pytest

from seriesverify.arith.realball import RealBall, Verdict, ball_compare, mpf_to_fraction, working_prec
from seriesverify.constants import keys
from seriesverify.constants.kernels import (
    const_beta,
    const_dirichlet_l,
    const_gamma_rational,
    const_golden_phi,
    const_log,
    const_pi,
    const_sqrt,
    const_zeta,
    evaluate_key,
    hurwitz_zeta,
)
from seriesverify.expr.parser import parse_summand
from seriesverify.services.series_engine import sum_to_tolerance

ORACLE_EXTRA_BITS = 128


def encloses(ball: RealBall, oracle) -> bool:
    """True when the ball contains a far more accurate mpmath reference value."""
    with mpmath.workprec(ball.prec + ORACLE_EXTRA_BITS):
        value = mpmath.mpf(oracle())
    return ball.contains(mpf_to_fraction(value._mpf_))


def equal(a: RealBall, b: RealBall, digits: int) -> bool:
    return ball_compare(a, b, digits) is Verdict.CERTIFIED_EQUAL


@pytest.mark.parametrize("digits", [20, 30, 50])
def test_pi(digits):
    prec = working_prec(digits)
    assert encloses(const_pi(prec), lambda: mpmath.pi)


def test_log():
    prec = working_prec(30)
    assert const_log(1, prec).contains(0)
    assert encloses(const_log(2, prec), lambda: mpmath.log(2))
    assert equal(const_log(192, prec), const_log(2, prec) * 6 + const_log(3, prec), 28)
    with pytest.raises(ValueError):
        const_log(0, prec)


def test_sqrt_and_golden_ratio():
    prec = working_prec(30)
    assert encloses(const_sqrt(Fraction(3, 2), prec), lambda: mpmath.sqrt(mpmath.mpf(3) / 2))
    assert encloses(const_golden_phi(prec), lambda: (1 + mpmath.sqrt(5)) / 2)


@pytest.mark.parametrize("digits", [20, 50, 100])
def test_zeta_two_is_pi_squared_over_six(digits):
    prec = working_prec(digits)
    assert equal(const_zeta(2, prec), const_pi(prec) ** 2 / 6, digits - 3)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_odd_zeta(n):
    assert encloses(const_zeta(n, working_prec(30)), lambda: mpmath.zeta(n))


def test_zeta_rejects_pole():
    with pytest.raises(ValueError):
        const_zeta(1, 64)


def test_beta_values():
    prec = working_prec(30)
    assert equal(const_beta(1, prec), const_pi(prec) / 4, 28)
    assert encloses(const_beta(2, prec), lambda: mpmath.catalan)
    assert encloses(const_beta(4, prec), lambda: mpmath.dirichlet(4, [0, 1, 0, -1]))


def test_dirichlet_l_values():
    prec = working_prec(30)
    assert encloses(const_dirichlet_l(-3, prec), lambda: mpmath.dirichlet(2, [0, 1, -1]))
    assert encloses(const_dirichlet_l(-8, prec), lambda: mpmath.dirichlet(2, [0, 1, 0, 1, 0, -1, 0, -1]))
    with pytest.raises(ValueError):
        const_dirichlet_l(-4, prec)


def test_hurwitz_zeta_at_one_is_riemann_zeta():
    prec = working_prec(30)
    assert equal(hurwitz_zeta(3, 1, prec), const_zeta(3, prec), 28)
    assert encloses(hurwitz_zeta(2, Fraction(1, 3), prec), lambda: mpmath.zeta(2, mpmath.mpf(1) / 3))


def test_gamma_rational():
    prec = working_prec(30)
    pi = const_pi(prec)
    assert equal(const_gamma_rational(Fraction(1, 2), prec) ** 2, pi, 28)
    reflection = const_gamma_rational(Fraction(1, 4), prec) * const_gamma_rational(Fraction(3, 4), prec)
    assert equal(reflection, pi * const_sqrt(2, prec), 28)
    for x in (Fraction(1, 4), Fraction(1, 3), Fraction(5, 6), Fraction(7, 12)):
        assert encloses(const_gamma_rational(x, prec), lambda: mpmath.gamma(mpmath.mpf(x.numerator) / x.denominator))


def _sin_pi(x: Fraction, prec: int) -> RealBall:
    """sin(pi x) for the angles used below, from nested square roots."""
    root2, root3, root6 = const_sqrt(2, prec), const_sqrt(3, prec), const_sqrt(6, prec)
    return {
        Fraction(1, 3): root3 / 2,
        Fraction(1, 4): root2 / 2,
        Fraction(5, 8): (root2 + 2).sqrt() / 2,
        Fraction(7, 12): (root6 + root2) / 4,
    }[x]


@pytest.mark.parametrize("x", [Fraction(1, 3), Fraction(1, 4), Fraction(5, 8), Fraction(7, 12)])
def test_gamma_reflection_formula(x):
    prec = working_prec(50)
    product = const_gamma_rational(x, prec) * const_gamma_rational(1 - x, prec)
    one = product * _sin_pi(x, prec) / const_pi(prec)
    assert one.contains(1)
    assert one.radius < mpmath.mpf(10) ** -48


@pytest.mark.parametrize(
    "key",
    [
        keys.PI, keys.CATALAN, keys.K3, keys.L8, keys.GOLDEN_PHI,
        keys.zeta(2), keys.zeta(3), keys.zeta(4), keys.zeta(5),
        keys.beta(1), keys.beta(3), keys.beta(4),
        keys.log_q(2), keys.log_q(Fraction(3, 4)), keys.sqrt_q(2), keys.sqrt_q(Fraction(5, 3)),
        keys.gamma_rat(Fraction(1, 4)), keys.gamma_rat(Fraction(1, 3)), keys.gamma_rat(Fraction(5, 8)),
    ],
    ids=str,
)
def test_doubling_precision_tightens_every_constant(key):
    prec = working_prec(30)
    coarse, fine = evaluate_key(key, prec), evaluate_key(key, 2 * prec)
    assert fine.radius * 2 ** 40 <= coarse.radius
    assert coarse.overlaps(fine)


@pytest.mark.parametrize(
    "character, summand, scale",
    [
        (-3, "(-1)^k*(1/(3*k+1)^2+1/(3*k+2)^2)", Fraction(3, 2)),
        (-8, "(-1)^k*(1/(4*k+1)^2+1/(4*k+3)^2)", Fraction(1)),
    ],
)
def test_dirichlet_l_matches_character_series(character, summand, scale):
    enclosure = sum_to_tolerance(parse_summand(summand), 40)
    assert enclosure.converged
    assert enclosure.method == "euler"
    assert equal(enclosure.value, const_dirichlet_l(character, working_prec(40)) * scale, 40)
