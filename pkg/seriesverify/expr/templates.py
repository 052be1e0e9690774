"""
Instantiation of the four Ramanujan-type families.

Given sum_k (a k + b) * B_k / m^k = c sqrt(d) / pi with the family's binomial
product B_k, the harmonic companion series is conjectured to equal
(c sqrt(d) / pi) log|m|, and its partial sums up to p - 1 to be congruent to
(-d/p)(a + b(m^(p-1) - 1)) modulo p^2 for p not dividing d m.
"""
import logging
from fractions import Fraction
from typing import Optional, Tuple

from sympy import factorint

from seriesverify.exceptions import RegistryError
from seriesverify.expr.printer import format_rational
from seriesverify.models.records import (
    Category,
    ConjectureRecord,
    PrimeFilter,
    Provenance,
    RecordKind,
    SeriesSpec,
    TemplateSpec,
    UpperLimit,
)

logger = logging.getLogger(__name__)

FAMILY_BINOMIALS = {
    1: "C(2k,k)^3",
    2: "C(2k,k)^2*C(3k,k)",
    3: "C(2k,k)^2*C(4k,2k)",
    4: "C(2k,k)*C(3k,k)*C(6k,3k)",
}

# {lin} is the linear factor a*k + b, {a} the constant a
FAMILY_FACTORS = {
    1: "(6*{lin}*(H(2k)-H(k))+{a})",
    2: "({lin}*(3*H(3k)+2*H(2k)-5*H(k))+{a})",
    3: "(4*{lin}*(H(4k)-H(k))+{a})",
    4: "(3*{lin}*(2*H(6k)-H(3k)-H(k))+{a})",
}


def _linear(a: int, b: int) -> str:
    return f"({a}*k{b:+d})" if b else f"({a}*k)"


def _check(family: int, a: int, b: int, m: int, c: Fraction, d: int) -> None:
    if family not in FAMILY_BINOMIALS:
        raise RegistryError(f"unknown series family {family} (expected 1..4)")
    if a * m == 0:
        raise RegistryError("template needs a*m != 0")
    if c == 0:
        raise RegistryError("template needs c != 0")
    if d < 1 or any(exponent > 1 for exponent in factorint(d).values()):
        raise RegistryError(f"template needs a squarefree positive d, got {d}")


def base_summand(family: int, a: int, b: int, m: int) -> str:
    """The Ramanujan-type summand (a k + b) B_k / m^k itself."""
    return f"{_linear(a, b)}*{FAMILY_BINOMIALS[family]}/({m})^k"


def derive_general_conjecture(
    family: int,
    a: int,
    b: int,
    m: int,
    c,
    d: int,
    record_id: Optional[str] = None,
    provenance: Optional[Provenance] = None,
) -> Tuple[ConjectureRecord, ConjectureRecord]:
    """Return the (identity, congruence) pair conjectured for one Ramanujan-type series."""
    c = Fraction(str(c))
    _check(family, a, b, m, c, d)
    prefix = record_id or f"GENERAL.F{family}.{a}.{b}.{m}"
    provenance = provenance or Provenance(label=f"General Conjecture, family {family}")
    summand = f"{FAMILY_BINOMIALS[family]}/({m})^k*" + FAMILY_FACTORS[family].format(lin=_linear(a, b), a=a)

    identity = ConjectureRecord(
        id=f"{prefix}.identity",
        kind=RecordKind.IDENTITY,
        category=Category.CONJECTURE,
        series=SeriesSpec(summand=summand, start=0, limit=UpperLimit.INFINITY),
        rhs=f"({format_rational(c)})*sqrt({d})/pi*log({abs(m)})",
        provenance=provenance,
        description=f"family {family} harmonic companion of sum {base_summand(family, a, b, m)}",
    )
    congruence = ConjectureRecord(
        id=f"{prefix}.congruence",
        kind=RecordKind.CONGRUENCE,
        category=Category.CONJECTURE,
        series=SeriesSpec(summand=summand, start=0, limit=UpperLimit.PRIME_MINUS_ONE),
        rhs=f"kron({-d},p)*({a}+{b}*(({m})^(p-1)-1))",
        modexp=2,
        prime_filter=PrimeFilter(gt=2, coprime_to=d * abs(m)),
        provenance=provenance,
        description=f"family {family} companion congruence mod p^2",
    )
    logger.debug(f"Derived template pair {prefix} from family {family}, (a, b, m) = ({a}, {b}, {m})")
    return identity, congruence


def derive_from_spec(spec: TemplateSpec) -> Tuple[ConjectureRecord, ConjectureRecord]:
    return derive_general_conjecture(
        spec.family, spec.a, spec.b, spec.m, spec.c, spec.d,
        record_id=spec.id, provenance=spec.provenance,
    )
