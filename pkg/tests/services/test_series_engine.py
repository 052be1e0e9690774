from fractions import Fraction

import mpmath
import pytest

from seriesverify.arith.realball import Verdict, ball_compare, rational_upper, working_prec
from seriesverify.expr.evaluate import eval_closed_form, eval_summand_rational
from seriesverify.expr.parser import parse_closed_form, parse_summand
from seriesverify.models.records import ConjectureRecord
from seriesverify.models.verdicts import SeriesStatus
from seriesverify.services.series_engine import (
    RatioWindow,
    exact_partial_sum,
    partial_sum,
    recurrence_sequence,
    sequence_table,
    sum_to_tolerance,
    verify_identity,
)

APERY = "(-1)^(k-1)/(k^3*C(2k,k))"

STEPPED_SUMMANDS = [
    APERY,
    "(25*k-3)/(2^k*C(3k,k))",
    "(6*k+1)*C(2k,k)^3/256^k*(H(2k,3)-7/64*H(k,3))",
    "C(2k+1,k)*C(4k,2k)/(k+1)^2/(-144)^k*(H(4k)-H(k))",
    "C(2k,k)^2*C(3k,k)/(-192)^k*((5*k+1)*(3*H(3k)+2*H(2k)-5*H(k))+5)",
]


def _closed(text: str, digits: int):
    return eval_closed_form(parse_closed_form(text), working_prec(digits))


def _identity(summand, rhs, start=0, **extra) -> ConjectureRecord:
    return ConjectureRecord.model_validate({
        "id": "T",
        "kind": "identity",
        "series": {"summand": summand, "start": start},
        "rhs": rhs,
        "provenance": {"label": "test"},
        **extra,
    })


def test_recurrence_sequence(fixture_registry):
    spec = fixture_registry.sequences["a"]
    assert [recurrence_sequence(spec, n) for n in range(4)] == [1, 4, 20, 120]
    table = sequence_table(fixture_registry.sequences)
    assert table["a"](3) == 120
    assert all(recurrence_sequence(spec, n).denominator == 1 for n in range(30))


def test_partial_sum_small():
    expr = parse_summand(APERY)
    assert partial_sum(expr, 2, 128, start=1).contains(Fraction(23, 48))
    assert exact_partial_sum(expr, 2, start=1) == Fraction(23, 48)
    assert exact_partial_sum(expr, 0, start=1) == 0


@pytest.mark.parametrize("text", STEPPED_SUMMANDS)
def test_incremental_terms_match_direct_evaluation(text):
    expr = parse_summand(text)
    direct = sum((eval_summand_rational(expr, k) for k in range(1, 51)), Fraction(0))
    assert exact_partial_sum(expr, 50, start=1) == direct
    assert partial_sum(expr, 50, 256, start=1).contains(direct)


def test_ratio_window():
    window = RatioWindow(20, 1.05, 0.95)
    for k in range(21):
        window.push(rational_upper(Fraction(1, 2 ** k)))
    assert window.full
    expected = 2.0 ** -20 * 0.525 / 0.475
    assert float(mpmath.mpf(window.tail_bound())) == pytest.approx(expected, rel=1e-6)

    window.push(rational_upper(0))
    assert not window.full
    assert window.tail_bound() is None

    slow = RatioWindow(20, 1.05, 0.95)
    for k in range(1, 30):
        slow.push(rational_upper(Fraction(1, k)))
    assert slow.tail_bound() is None


@pytest.mark.parametrize(
    "summand, start, rhs",
    [
        (APERY, 1, "2/5*zeta(3)"),
        ("C(2k,k)/((2*k+1)*16^k)", 0, "pi/3"),
        ("(25*k-3)/(2^k*C(3k,k))", 0, "pi/2"),
        ("(6*k+1)*C(2k,k)^3/(-512)^k", 0, "2*sqrt(2)/pi"),
    ],
)
def test_sum_to_tolerance_encloses_known_values(summand, start, rhs):
    enclosure = sum_to_tolerance(parse_summand(summand), 30, start)
    assert enclosure.converged
    assert enclosure.method == "direct"
    assert ball_compare(enclosure.value, _closed(rhs, 30), 30) is Verdict.CERTIFIED_EQUAL


def test_euler_transform_for_ratio_near_minus_one():
    enclosure = sum_to_tolerance(parse_summand("(4*k+1)*C(2k,k)^3/(-64)^k"), 25)
    assert enclosure.converged
    assert enclosure.method == "euler"
    assert ball_compare(enclosure.value, _closed("2/pi", 25), 25) is Verdict.CERTIFIED_EQUAL


def test_guillera_alternating_baseline(shipped_registry):
    record = shipped_registry.get("GUILLERA.NEG64")
    enclosure = sum_to_tolerance(parse_summand(record.series.summand), 25, record.series.lower())
    assert enclosure.method == "euler"
    assert ball_compare(enclosure.value, _closed(record.rhs, 25), 25) is Verdict.CERTIFIED_EQUAL


def test_term_cap():
    enclosure = sum_to_tolerance(parse_summand(APERY), 30, 1, max_terms=5)
    assert enclosure.status is SeriesStatus.TAIL_CAP_HIT
    assert not enclosure.converged
    assert enclosure.terms_used == 5


def test_divergent_series_never_certifies():
    enclosure = sum_to_tolerance(parse_summand("1/(k+1)"), 20, max_terms=500)
    assert enclosure.status is SeriesStatus.TAIL_CAP_HIT


def test_fixture_identity_verdicts(fixture_registry):
    (equal,) = verify_identity(fixture_registry.get("APERY"), 30)
    assert equal.verdict is Verdict.CERTIFIED_EQUAL
    assert equal.status is SeriesStatus.CONVERGED

    (distinct,) = verify_identity(fixture_registry.get("PERTURBED_TEST"), 30)
    assert distinct.verdict is Verdict.CERTIFIED_DISTINCT

    (capped,) = verify_identity(fixture_registry.get("CAPPED_TEST"), 30)
    assert capped.verdict is Verdict.INCONCLUSIVE
    assert capped.status is SeriesStatus.TAIL_CAP_HIT
    assert capped.terms_used == 5
    assert "TailCapHit" in capped.reason


def test_sequence_summand(shipped_registry):
    (verdict,) = verify_identity(shipped_registry.get("HSY"), 25, shipped_registry.sequences)
    assert verdict.verdict is Verdict.CERTIFIED_EQUAL


def test_one_verdict_per_sample():
    record = _identity("C(2k,k)/((2*k+1)*x^k)", "pi/3", samples=[{"x": 16}, {"x": 8}])
    verdicts = verify_identity(record, 20)
    assert [(v.sample, v.verdict) for v in verdicts] == [
        ("x=16", Verdict.CERTIFIED_EQUAL),
        ("x=8", Verdict.CERTIFIED_DISTINCT),
    ]


def test_evaluation_errors_become_inconclusive():
    (verdict,) = verify_identity(_identity("1/(k-3)^2", "pi^2/6"), 20)
    assert verdict.verdict is Verdict.INCONCLUSIVE
    assert "vanishes" in verdict.reason


def test_negative_base_fractional_power_is_inconclusive():
    (verdict,) = verify_identity(_identity("1/2^k", "(-2)^(1/2)"), 20)
    assert verdict.verdict is Verdict.INCONCLUSIVE
    assert "negative" in verdict.reason


def test_verify_identity_rejects_congruences(fixture_registry):
    with pytest.raises(ValueError):
        verify_identity(fixture_registry.get("WOLSTENHOLME"))


@pytest.mark.slow
def test_baseline_identities(shipped_registry):
    from seriesverify.models.records import Category, RecordKind

    baselines = [
        r for r in shipped_registry.by_kind(RecordKind.IDENTITY) if r.category is Category.BASELINE
    ]
    assert len(baselines) >= 20
    for record in baselines:
        for verdict in verify_identity(record, 40, shipped_registry.sequences):
            assert verdict.verdict is Verdict.CERTIFIED_EQUAL, (record.id, verdict.sample, verdict.reason)
