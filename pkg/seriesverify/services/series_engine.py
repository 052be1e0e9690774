"""
Certified summation of hypergeometric-harmonic series.

Terms are produced exactly (binomials and powers updated by ratio, harmonic
numbers from the shared prefix tables) and accumulated in balls. A tail is
certified once RATIO_WINDOW consecutive term ratios stay below the cutoff:
with r the inflated maximal ratio, |sum_{k>N} t_k| <= |t_N| r / (1 - r).
Alternating series whose ratio tends to -1 switch to an exact Euler transform
of the remaining terms, which is then certified the same way.
"""
import logging
import math
import threading
import time
from collections import deque
from fractions import Fraction
from functools import partial
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from mpmath.libmp import (
    finf,
    fone,
    from_float,
    fzero,
    mpf_div,
    mpf_gt,
    mpf_le,
    mpf_lt,
    mpf_mul,
    mpf_sub,
    round_ceiling,
    round_floor,
)

from seriesverify.arith.exact import binomial, harmonic
from seriesverify.arith.realball import (
    RAD_PREC,
    RealBall,
    Verdict,
    ball_compare,
    difference_bound,
    rational_upper,
    working_prec,
)
from seriesverify.config import settings
from seriesverify.exceptions import (
    ExprSyntaxError,
    SeriesVerifyError,
    SummandEvaluationError,
)
from seriesverify.expr.evaluate import SequenceTable, eval_closed_form
from seriesverify.expr.nodes import Node, SummandExpr, Term
from seriesverify.expr.normalize import poly_eval
from seriesverify.expr.parser import parse_closed_form, parse_polynomial, parse_summand
from seriesverify.models.records import ConjectureRecord, RecordKind, RecurrenceSpec
from seriesverify.models.verdicts import IdentityVerdict, SeriesEnclosure, SeriesStatus

logger = logging.getLogger(__name__)

GroupKey = Tuple[Optional[Node], Optional[Node]]

# ---------------------------------------------------------------------------
# Recurrence sequences
# ---------------------------------------------------------------------------

_SEQUENCE_VALUES: Dict[tuple, List[Fraction]] = {}
_SEQUENCE_LOCK = threading.Lock()


def _sequence_key(spec: RecurrenceSpec) -> tuple:
    return (spec.name, tuple(spec.initial), spec.lead, tuple(spec.terms))


def recurrence_sequence(spec: RecurrenceSpec, n: int) -> Fraction:
    """a(n) for lead(i) a(i+1) = sum_j terms[j](i) a(i-j), memoized per recurrence."""
    if n < 0:
        raise SummandEvaluationError(f"sequence {spec.name} is not defined at n={n}")
    key = _sequence_key(spec)
    with _SEQUENCE_LOCK:
        values = _SEQUENCE_VALUES.setdefault(key, [Fraction(v) for v in spec.initial])
        if n < len(values):
            return values[n]
        lead = parse_polynomial(spec.lead)
        terms = [parse_polynomial(text) for text in spec.terms]
        while len(values) <= n:
            i = len(values) - 1
            den = poly_eval(lead, i)
            if den == 0:
                raise SummandEvaluationError(f"sequence {spec.name}: leading coefficient vanishes at n={i}")
            total = sum((poly_eval(c, i) * values[i - j] for j, c in enumerate(terms)), Fraction(0))
            values.append(total / den)
        return values[n]


def sequence_table(specs: Optional[Mapping[str, RecurrenceSpec]] = None) -> Dict[str, Callable[[int], Fraction]]:
    """Callables a(n) for every named recurrence, as expected by the evaluators."""
    return {name: partial(recurrence_sequence, spec) for name, spec in (specs or {}).items()}


# ---------------------------------------------------------------------------
# Term streaming
# ---------------------------------------------------------------------------

def _step_binomial(value: int, n: int, r: int, a: int, b: int) -> int:
    """C(n + a, r + b) from value = C(n, r)."""
    if value == 0 or n < 0 or r < 0 or r > n:
        return binomial(n + a, r + b)
    num = 1
    for i in range(1, a + 1):
        num *= n + i
    den = 1
    for i in range(1, b + 1):
        den *= r + i
    for i in range(1, a - b + 1):
        den *= n - r + i
    return value * num // den


class TermStream:
    """
    Exact rational parts of a summand at k = start, start + 1, ...

    Terms are grouped by their irrational factors (base_irr, const); a purely
    rational summand has the single group (None, None).
    """

    def __init__(self, expr: SummandExpr, start: int = 0, sequences: Optional[SequenceTable] = None,
                 p: Optional[int] = None):
        self.expr = expr
        self.k = start
        self.sequences = sequences or {}
        self.p = p
        self._binoms: Dict[Tuple[int, int, int, int], int] = {}
        self._powers: Dict[Fraction, Fraction] = {}
        for term in expr.terms:
            for (a, a0, b, b0), _ in term.binoms:
                self._binoms[(a, a0, b, b0)] = binomial(a * start + a0, b * start + b0)
            self._powers[term.base] = term.base ** start
        self.groups: List[GroupKey] = sorted(
            {(t.base_irr, t.const) for t in expr.terms}, key=repr
        )

    def _term(self, term: Term) -> Fraction:
        k = self.k
        value = poly_eval(term.poly, k)
        if value == 0:
            return value
        for factor, n in term.denominators:
            d = poly_eval(factor, k)
            if d == 0:
                raise SummandEvaluationError(f"denominator vanishes at k={k}")
            value /= d ** n
        for key, e in term.binoms:
            top = key[0] * k + key[1]
            if top < 0:
                raise SummandEvaluationError(f"binomial with negative top {top} at k={k}")
            c = self._binoms[key]
            if c == 0:
                if e < 0:
                    raise SummandEvaluationError(f"zero binomial in a denominator at k={k}")
                return Fraction(0)
            value *= Fraction(c) ** e
        value *= self._powers[term.base]
        if term.hf is not None:
            h = term.hf.c0
            for (mult, shift, order), coeff in term.hf.items:
                index = mult * k + shift
                if index < 0:
                    raise SummandEvaluationError(f"harmonic index {index} < 0 at k={k}")
                h += coeff * harmonic(index, order)
            value *= h
        if term.seq:
            if term.seq not in self.sequences:
                raise SummandEvaluationError(f"unknown sequence {term.seq!r}")
            value *= Fraction(self.sequences[term.seq](k))
        if term.p_power:
            if self.p is None:
                raise SummandEvaluationError("summand mentions p but no prime was given")
            value *= Fraction(self.p) ** term.p_power
        return value

    def parts(self) -> Dict[GroupKey, Fraction]:
        """Rational coefficient of each irrational group at the current k."""
        out = {group: Fraction(0) for group in self.groups}
        for term in self.expr.terms:
            out[(term.base_irr, term.const)] += self._term(term)
        return out

    def advance(self) -> None:
        k = self.k
        for (a, a0, b, b0), value in list(self._binoms.items()):
            self._binoms[(a, a0, b, b0)] = _step_binomial(value, a * k + a0, b * k + b0, a, b)
        for base in self._powers:
            self._powers[base] *= base
        self.k = k + 1


class BallTerms:
    """Iterator over (k, exact term or None, ball term) at a fixed working precision."""

    def __init__(self, expr: SummandExpr, start: int, prec: int, sequences: Optional[SequenceTable] = None):
        self.stream = TermStream(expr, start, sequences)
        self.prec = prec
        self.rational = expr.is_rational
        # Per group: constant factor and running power of the irrational base
        self._scale: Dict[GroupKey, Optional[RealBall]] = {}
        self._base: Dict[GroupKey, Optional[RealBall]] = {}
        self._power: Dict[GroupKey, Optional[RealBall]] = {}
        for group in self.stream.groups:
            base_irr, const = group
            self._scale[group] = eval_closed_form(const, prec) if const is not None else None
            if base_irr is not None:
                base = eval_closed_form(base_irr, prec)
                self._base[group] = base
                self._power[group] = base ** start
            else:
                self._base[group] = self._power[group] = None

    def __iter__(self):
        return self

    def __next__(self) -> Tuple[int, Optional[Fraction], RealBall]:
        k = self.stream.k
        parts = self.stream.parts()
        if self.rational:
            exact = parts[(None, None)]
            ball = RealBall.exact(exact, self.prec)
        else:
            exact = None
            ball = RealBall.exact(0, self.prec)
            for group, coeff in parts.items():
                if coeff == 0:
                    continue
                piece = RealBall.exact(coeff, self.prec)
                if self._power[group] is not None:
                    piece = piece * self._power[group]
                if self._scale[group] is not None:
                    piece = piece * self._scale[group]
                ball = ball + piece
            if all(coeff == 0 for coeff in parts.values()):
                exact = Fraction(0)
        self.stream.advance()
        for group, base in self._base.items():
            if base is not None:
                self._power[group] = self._power[group] * base
        return k, exact, ball


def partial_sum(expr: SummandExpr, N: int, prec: int, start: int = 0,
                sequences: Optional[SequenceTable] = None) -> RealBall:
    """Ball enclosing sum_{k=start}^{N} t_k."""
    total = RealBall.exact(0, prec)
    for k, _, ball in BallTerms(expr, start, prec, sequences):
        if k > N:
            break
        total = total + ball
    return total


def exact_partial_sum(expr: SummandExpr, N: int, start: int = 0,
                      sequences: Optional[SequenceTable] = None, p: Optional[int] = None) -> Fraction:
    """Exact sum_{k=start}^{N} t_k of a rational summand."""
    stream = TermStream(expr, start, sequences, p)
    total = Fraction(0)
    while stream.k <= N:
        total += stream.parts()[(None, None)]
        stream.advance()
    return total


# ---------------------------------------------------------------------------
# Tail certification
# ---------------------------------------------------------------------------

class RatioWindow:
    """Sliding window of |t_{k+1} / t_k| over consecutive nonzero terms."""

    def __init__(self, size: int, safety: float, cutoff: float):
        self.size = size
        self.safety = from_float(safety)
        self.cutoff = from_float(cutoff)
        self.ratios = deque(maxlen=size)
        self.previous = None

    def push(self, magnitude) -> None:
        # A zero term breaks the run of consecutive ratios
        if magnitude == fzero:
            self.ratios.clear()
            self.previous = None
            return
        if self.previous is not None:
            self.ratios.append(mpf_div(magnitude, self.previous, RAD_PREC, round_ceiling))
        self.previous = magnitude

    @property
    def full(self) -> bool:
        return len(self.ratios) == self.size

    def rate(self):
        """Inflated maximal ratio, or None while the window is not full."""
        if not self.full:
            return None
        worst = fzero
        for r in self.ratios:
            if mpf_gt(r, worst):
                worst = r
        return mpf_mul(worst, self.safety, RAD_PREC, round_ceiling)

    def tail_bound(self):
        """|t_N| r / (1 - r) for the latest term, or None when no certificate holds."""
        rate = self.rate()
        if rate is None or not mpf_lt(rate, self.cutoff):
            return None
        gap = mpf_sub(fone, rate, RAD_PREC, round_floor)
        return mpf_div(mpf_mul(self.previous, rate, RAD_PREC, round_ceiling), gap, RAD_PREC, round_ceiling)


def _target(digits: int):
    return rational_upper(Fraction(1, 10 ** (digits + 2)))


def _alternates(signs) -> bool:
    signs = list(signs)
    return all(a * b < 0 for a, b in zip(signs, signs[1:]))


def _euler_tail(terms: BallTerms, first: Tuple[int, Fraction], prec: int, target, window: int,
                safety: float, cutoff: float, max_terms: int) -> Tuple[RealBall, int, object, bool]:
    """
    Enclose sum_{j>=0} t_{s+j} through sum_n (-1)^n (Delta^n a)_0 / 2^(n+1), a_j = (-1)^j t_{s+j}.

    Returns (ball, transformed terms used, tail bound, converged).
    """
    a: List[Fraction] = [first[1]]
    ratios = RatioWindow(window, safety, cutoff)
    total = RealBall.exact(0, prec)
    n = 0
    while n < max_terms:
        while len(a) <= n:
            _, exact, _ = next(terms)
            a.append(exact if len(a) % 2 == 0 else -exact)
        # (Delta^n a)_0 = sum_j (-1)^(n-j) C(n, j) a_j
        delta = Fraction(0)
        c = 1
        for j in range(n + 1):
            delta += c * a[j] if (n - j) % 2 == 0 else -c * a[j]
            c = c * (n - j) // (j + 1)
        u = Fraction(delta if n % 2 == 0 else -delta, 2 ** (n + 1))
        total = total + RealBall.exact(u, prec)
        ratios.push(rational_upper(u))
        bound = ratios.tail_bound()
        if bound is not None and mpf_le(bound, target):
            return total.widen(bound), n + 1, bound, True
        n += 1
    return total.widen(finf), n, finf, False


def sum_to_tolerance(
    expr: SummandExpr,
    digits: int,
    start: int = 0,
    sequences: Optional[SequenceTable] = None,
    prec: Optional[int] = None,
    max_terms: Optional[int] = None,
) -> SeriesEnclosure:
    """Enclose sum_{k>=start} t_k with a certified tail below 10^-(digits+2)."""
    prec = prec or working_prec(digits)
    max_terms = max_terms or settings.MAX_TERMS
    window = settings.RATIO_WINDOW
    target = _target(digits)
    terms = BallTerms(expr, start, prec, sequences)
    ratios = RatioWindow(window, settings.RATIO_SAFETY, settings.RATIO_CUTOFF)
    signs = deque(maxlen=window + 1)
    total = RealBall.exact(0, prec)
    used = 0

    for k, exact, ball in terms:
        if used >= max_terms:
            break
        total = total + ball
        used += 1
        if exact is not None and exact == 0:
            ratios.push(fzero)
            signs.clear()
            continue
        ratios.push(ball.abs_upper())
        if exact is not None:
            signs.append(1 if exact > 0 else -1)

        bound = ratios.tail_bound()
        if bound is not None:
            if mpf_le(bound, target):
                logger.debug(f"Tail certified after {used} terms, bound {bound}")
                return SeriesEnclosure(total.widen(bound), used, bound, SeriesStatus.CONVERGED)
            continue

        # Ratio close to -1: hand the remaining terms to the Euler transform
        if ratios.full and exact is not None and len(signs) == window + 1 and _alternates(signs):
            next_k, next_exact, _ = next(terms)
            logger.debug(f"Switching to the Euler transform at k={next_k}")
            tail, extra, bound, ok = _euler_tail(
                terms, (next_k, next_exact), prec, target, window,
                settings.RATIO_SAFETY, settings.RATIO_CUTOFF, max(max_terms - used, 1),
            )
            status = SeriesStatus.CONVERGED if ok else SeriesStatus.TAIL_CAP_HIT
            return SeriesEnclosure(total + tail, used + extra, bound, status, method="euler")

    logger.debug(f"No tail certificate within {max_terms} terms")
    return SeriesEnclosure(total.widen(finf), used, finf, SeriesStatus.TAIL_CAP_HIT)


# ---------------------------------------------------------------------------
# Identity verdicts
# ---------------------------------------------------------------------------

def _effective_digits(digits: int, prec: int) -> int:
    return max(digits, math.floor((prec - 64) / 3.33))


def _verify_sample(record: ConjectureRecord, sample: dict, digits: int, table: Dict[str, Callable]) -> IdentityVerdict:
    start_time = time.time()
    label = record.sample_label(sample)
    verdict = IdentityVerdict(record.id, digits, Verdict.INCONCLUSIVE, sample=label, flags=list(record.flags))
    try:
        expr = parse_summand(record.series.summand, sample, tuple(table))
        rhs_expr = parse_closed_form(record.rhs, sample)
    except ExprSyntaxError as e:
        verdict.reason = str(e)
        return verdict

    prec = working_prec(digits)
    cap = max(settings.PRECISION_CAP_BITS, prec)
    max_terms = record.max_terms or settings.MAX_TERMS
    while True:
        try:
            enclosure = sum_to_tolerance(
                expr, _effective_digits(digits, prec), record.series.lower(),
                table, prec=prec, max_terms=max_terms,
            )
            rhs = eval_closed_form(rhs_expr, prec)
        except (SeriesVerifyError, ZeroDivisionError) as e:
            logger.error(f"Error evaluating {record.id} {label}: {str(e)}")
            verdict.reason = str(e)
            break

        verdict.lhs, verdict.rhs = enclosure.value, rhs
        verdict.terms_used, verdict.status, verdict.prec = enclosure.terms_used, enclosure.status, prec
        if not enclosure.converged:
            verdict.reason = f"TailCapHit after {enclosure.terms_used} terms"
            logger.warning(f"{record.id} {label}: no tail certificate within {max_terms} terms")
            break

        verdict.bound = difference_bound(enclosure.value, rhs)
        verdict.verdict = ball_compare(enclosure.value, rhs, digits)
        if verdict.verdict is not Verdict.INCONCLUSIVE or prec * 2 > cap:
            break
        logger.warning(f"{record.id} {label}: inconclusive at {prec} bits, retrying at {prec * 2}")
        prec *= 2

    if verdict.verdict is Verdict.INCONCLUSIVE and not verdict.reason:
        verdict.reason = f"enclosures overlap at {prec} bits"
    verdict.elapsed = time.time() - start_time
    return verdict


def verify_identity(record: ConjectureRecord, digits: Optional[int] = None,
                    sequences: Optional[Mapping[str, RecurrenceSpec]] = None) -> List[IdentityVerdict]:
    """One verdict per sample point of an identity record."""
    if record.kind is not RecordKind.IDENTITY:
        raise ValueError(f"{record.id} is not an identity record")
    digits = digits or settings.DEFAULT_DIGITS
    table = sequence_table(sequences)
    verdicts = [_verify_sample(record, sample, digits, table) for sample in record.sample_points()]
    for v in verdicts:
        logger.info(f"{record.id} {v.sample}: {v.verdict.value} at {digits} digits ({v.terms_used} terms)")
    return verdicts
