import logging
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seriesverify.arith.exact import bernoulli_number, euler_number, primes_between, valuation
from seriesverify.arith.modpk import (
    FactorialTable,
    ModPK,
    PrimeCtx,
    bernoulli_mod,
    bernoulli_poly_mod,
    euler_mod,
    euler_poly_mod,
    fermat_quotient,
    prime_context,
    reduce_mod,
)
from seriesverify.exceptions import AtomUndefinedError, SeriesVerifyError

GUARD = 40

nonzero = st.fractions(min_value=-10 ** 4, max_value=10 ** 4, max_denominator=10 ** 4).filter(lambda x: x != 0)
primes = st.sampled_from(primes_between(3, 31))
exponents = st.integers(min_value=1, max_value=4)


def test_reduce_mod_harmonic_six():
    value = reduce_mod(Fraction(49, 20), 7, 3)
    assert value.v == 2
    assert value.unit % 7 == 6


def test_reduce_mod_third():
    value = reduce_mod(Fraction(1, 3), 5, 2)
    assert (value.v, value.unit) == (0, 17)
    assert value.residue() == 17


def test_reduce_mod_zero():
    value = reduce_mod(0, 5, 2)
    assert value.is_zero
    assert value.residue() == 0
    assert value.describe() == "0 (mod 5^2)"


def test_add_across_valuations():
    total = ModPK.from_parts(5, 2, 1, 1) + ModPK.from_parts(5, 2, 0, 3)
    assert (total.v, total.unit) == (0, 8)


def test_inverse():
    assert ModPK.from_parts(5, 2, 0, 2).inverse().unit == 13
    with pytest.raises(ZeroDivisionError):
        ModPK.zero(5, 2, 10).inverse()


def test_negative_valuation_has_no_residue():
    value = reduce_mod(Fraction(1, 25), 5, 2)
    assert value.v == -2
    with pytest.raises(ValueError):
        value.residue()
    assert value.describe().startswith("5^-2*")


def test_mixing_moduli_is_an_error():
    with pytest.raises(ValueError):
        reduce_mod(1, 5, 2) + reduce_mod(1, 7, 2)


def check_valuation_is_additive(a, b, p, e):
    product = reduce_mod(a, p, e, GUARD) * reduce_mod(b, p, e, GUARD)
    assert product.v == valuation(a, p) + valuation(b, p)


def check_field_operations(a, b, p, e):
    x, y = reduce_mod(a, p, e, GUARD), reduce_mod(b, p, e, GUARD)
    assert (x + y).congruent(reduce_mod(a + b, p, e, GUARD))
    assert (x - y).congruent(reduce_mod(a - b, p, e, GUARD))
    assert (x * y).congruent(reduce_mod(a * b, p, e, GUARD))
    assert (x / y).congruent(reduce_mod(a / b, p, e, GUARD))


@given(a=nonzero, b=nonzero, p=primes, e=exponents)
def test_valuation_is_additive(a, b, p, e):
    check_valuation_is_additive(a, b, p, e)


@given(a=nonzero, b=nonzero, p=primes, e=exponents)
def test_field_operations_match_exact_rationals(a, b, p, e):
    check_field_operations(a, b, p, e)


@pytest.mark.slow
@settings(max_examples=10_000, deadline=None)
@given(a=nonzero, b=nonzero, p=primes, e=exponents)
def test_field_operations_long_run(a, b, p, e):
    check_valuation_is_additive(a, b, p, e)
    check_field_operations(a, b, p, e)


def test_self_check_runs_under_debug_logging(monkeypatch, caplog):
    prime_context.cache_clear()
    monkeypatch.setattr(PrimeCtx, "self_check", lambda self: False)
    caplog.set_level(logging.INFO, logger="seriesverify.arith.modpk")
    assert prime_context(41, 2).p == 41

    prime_context.cache_clear()
    caplog.set_level(logging.DEBUG, logger="seriesverify.arith.modpk")
    with pytest.raises(SeriesVerifyError, match="self-check"):
        prime_context(41, 2)
    prime_context.cache_clear()


def test_bernoulli_residues():
    ctx = prime_context(7, 1)
    assert bernoulli_mod(0, ctx).residue() == 1
    assert bernoulli_mod(3, ctx).is_zero
    assert bernoulli_mod(2, ctx).residue() == 6


def test_euler_residues():
    ctx = prime_context(5, 1)
    assert euler_mod(0, ctx).residue() == 1
    assert euler_mod(1, ctx).is_zero
    assert euler_mod(2, ctx).residue() == 4


@pytest.mark.parametrize("p", primes_between(5, 50))
def test_cached_numbers_match_exact_values(p):
    ctx = prime_context(p, 3)
    assert ctx.self_check()
    for n in range(0, p - 2, 2):
        assert bernoulli_mod(n, ctx).congruent(reduce_mod(bernoulli_number(n), p, 3))
    for n in range(0, p, 2):
        assert euler_mod(n, ctx).congruent(reduce_mod(euler_number(n), p, 3))


def test_bernoulli_polynomials():
    ctx = prime_context(7, 1)
    assert bernoulli_poly_mod(0, Fraction(2, 5), ctx).residue() == 1
    assert bernoulli_poly_mod(1, Fraction(1, 3), ctx).residue() == 1
    assert bernoulli_poly_mod(2, 0, ctx).residue() == 6
    with pytest.raises(AtomUndefinedError):
        bernoulli_poly_mod(1, Fraction(1, 7), ctx)


def test_euler_polynomials():
    assert euler_poly_mod(0, Fraction(1, 4), prime_context(7, 1)).residue() == 1
    assert euler_poly_mod(1, Fraction(1, 4), prime_context(7, 1)).residue() == 5
    assert euler_poly_mod(2, Fraction(1, 2), prime_context(5, 1)).residue() == 1


def test_fermat_quotient():
    assert fermat_quotient(2, 3, 1).residue() == 1
    assert fermat_quotient(2, 5, 1).residue() == 3
    with pytest.raises(AtomUndefinedError):
        fermat_quotient(10, 5, 1)


@given(a=st.integers(min_value=2, max_value=10 ** 6), p=st.sampled_from(primes_between(3, 100)))
def test_fermat_quotient_of_square(a, p):
    if a % p == 0:
        return
    assert fermat_quotient(a * a, p, 1).congruent(fermat_quotient(a, p, 1) * 2)


def test_factorial_table_binomials():
    table = FactorialTable(7, 3, 60)
    for n in range(61):
        for k in range(0, n + 1, 3):
            assert table.binomial(n, k).congruent(reduce_mod(math.comb(n, k), 7, 3))
    assert table.binomial(4, 6).is_zero
