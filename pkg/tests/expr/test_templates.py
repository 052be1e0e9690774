import pytest

from seriesverify.arith.realball import Verdict
from seriesverify.exceptions import RegistryError
from seriesverify.expr.parser import parse_congruence_rhs, parse_summand
from seriesverify.expr.templates import base_summand, derive_general_conjecture
from seriesverify.models.records import Category, RecordKind, UpperLimit
from seriesverify.services.congruence_engine import verify_congruence
from seriesverify.services.series_engine import verify_identity


def test_bauer_pair():
    identity, congruence = derive_general_conjecture(1, 4, 1, -64, 2, 1)

    assert identity.id == "GENERAL.F1.4.1.-64.identity"
    assert identity.kind is RecordKind.IDENTITY
    assert identity.category is Category.CONJECTURE
    assert identity.series.summand == "C(2k,k)^3/(-64)^k*(6*(4*k+1)*(H(2k)-H(k))+4)"
    assert identity.rhs == "(2)*sqrt(1)/pi*log(64)"

    assert congruence.id == "GENERAL.F1.4.1.-64.congruence"
    assert congruence.series.limit is UpperLimit.PRIME_MINUS_ONE
    assert congruence.rhs == "kron(-1,p)*(4+1*((-64)^(p-1)-1))"
    assert congruence.modexp == 2
    assert not congruence.prime_filter.admits(2)
    assert congruence.prime_filter.admits(3)


def test_derived_expressions_parse():
    identity, congruence = derive_general_conjecture(2, 5, 1, -192, "4", 3, record_id="EX")
    assert identity.id == "EX.identity"
    assert not congruence.prime_filter.admits(3)
    assert congruence.prime_filter.admits(5)
    assert parse_summand(identity.series.summand).is_rational
    parse_congruence_rhs(congruence.rhs)
    assert base_summand(2, 5, 1, -192) == "(5*k+1)*C(2k,k)^2*C(3k,k)/(-192)^k"


def test_zero_shift_and_fractional_c():
    identity, _ = derive_general_conjecture(4, 545140134, 13591409, -(640320 ** 3), "426880/3", 10005)
    assert "(545140134*k+13591409)" in identity.series.summand
    assert identity.rhs.startswith("(426880/3)*sqrt(10005)/pi")
    identity, _ = derive_general_conjecture(3, 8, 0, 81, "1", 3)
    assert "(8*k)" in identity.series.summand


@pytest.mark.parametrize(
    "family, a, b, m, c, d",
    [
        (5, 4, 1, -64, 2, 1),
        (1, 4, 1, -64, 2, 4),
        (1, 4, 1, -64, 2, 0),
        (1, 0, 1, -64, 2, 1),
        (1, 4, 1, 0, 2, 1),
        (1, 4, 1, -64, 0, 1),
    ],
)
def test_invalid_parameters(family, a, b, m, c, d):
    with pytest.raises(RegistryError):
        derive_general_conjecture(family, a, b, m, c, d)


@pytest.mark.slow
def test_bauer_companion_holds():
    identity, congruence = derive_general_conjecture(1, 4, 1, -64, 2, 1)
    (verdict,) = verify_identity(identity, 25)
    assert verdict.verdict is Verdict.CERTIFIED_EQUAL
    verdicts = verify_congruence(congruence, 3, 40, "exact")
    assert verdicts and all(v.holds for v in verdicts)
