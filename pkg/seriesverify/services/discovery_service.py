"""Integer-relation search for closed forms of series without a known value."""
import logging
import math
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Union

import mpmath
from mpmath.libmp import from_rational, mpf_lt, round_floor

from seriesverify.arith.realball import RAD_PREC, RealBall, working_prec
from seriesverify.config import settings
from seriesverify.exceptions import InsufficientPrecisionError
from seriesverify.expr.evaluate import eval_closed_form
from seriesverify.expr.parser import parse_closed_form, parse_summand
from seriesverify.expr.printer import format_rational
from seriesverify.models.records import ConjectureRecord, OpenSeries, RecurrenceSpec
from seriesverify.models.verdicts import Candidate, RelationResult
from seriesverify.services.series_engine import sequence_table, sum_to_tolerance

logger = logging.getLogger(__name__)

# Radii must sit this many digits below the requested tolerance
RADIUS_HEADROOM = 10

# Digits carried by the series evaluation beyond the PSLQ tolerance
EVALUATION_HEADROOM = 20

PSLQ_MAX_STEPS = 20_000

Target = Union[str, ConjectureRecord, OpenSeries]


def _power_of_ten(digits: int):
    return from_rational(1, 10 ** digits, RAD_PREC, round_floor)


def _normalized(coefficients: Sequence[int]) -> List[int]:
    """Relation scaled by its content, first nonzero coefficient positive."""
    coefficients = [int(c) for c in coefficients]
    g = 0
    for c in coefficients:
        g = math.gcd(g, c)
    if g > 1:
        coefficients = [c // g for c in coefficients]
    lead = next(c for c in coefficients if c)
    return [-c for c in coefficients] if lead < 0 else coefficients


def pslq(values: Sequence[RealBall], max_height: Optional[int] = None,
         tolerance_digits: Optional[int] = None) -> RelationResult:
    """
    Integer relation sum c_i x_i ~ 0 among ball midpoints, with the residual re-checked on the balls.

    Raises InsufficientPrecisionError when a radius is not at least
    RADIUS_HEADROOM digits below 10^-tolerance_digits.
    """
    if len(values) < 2:
        raise ValueError("pslq needs at least two values")
    max_height = max_height or settings.PSLQ_MAX_HEIGHT
    tolerance_digits = tolerance_digits or settings.DISCOVERY_DIGITS
    prec = min(v.prec for v in values)

    limit = _power_of_ten(tolerance_digits + RADIUS_HEADROOM)
    for i, value in enumerate(values):
        if not mpf_lt(value.rad, limit):
            raise InsufficientPrecisionError(
                f"value {i} has radius {value.radius} but 10^-{tolerance_digits + RADIUS_HEADROOM} is required"
            )
    if prec < working_prec(tolerance_digits) - 64:
        raise InsufficientPrecisionError(f"{prec} bits cannot support {tolerance_digits} digits")

    with mpmath.workprec(prec):
        xs = [value.midpoint for value in values]
        tol = mpmath.mpf(10) ** (-tolerance_digits)
        try:
            relation = mpmath.pslq(xs, tol=tol, maxcoeff=max_height, maxsteps=PSLQ_MAX_STEPS)
        except ValueError as e:
            # mpmath rejects vectors containing an exact zero
            logger.warning(f"PSLQ rejected its input: {str(e)}")
            relation = None

    if relation is None:
        logger.info(f"No relation of height <= {max_height} among {len(values)} values at {tolerance_digits} digits")
        return RelationResult(None, None, prec, tolerance_digits)

    coefficients = _normalized(relation)
    residual = RealBall.exact(0, prec)
    for c, value in zip(coefficients, values):
        residual = residual + value * c
    bound = residual.abs_upper()
    if not mpf_lt(bound, _power_of_ten(tolerance_digits)):
        logger.warning(f"Discarding PSLQ relation {coefficients}: residual {mpmath.mpf(bound)} is too large")
        return RelationResult(None, None, prec, tolerance_digits)

    logger.info(f"Found relation {coefficients} at {tolerance_digits} digits")
    return RelationResult(coefficients, bound, prec, tolerance_digits)


def _target_series(target: Target):
    if isinstance(target, ConjectureRecord):
        return target.id, target.series.summand, target.series.lower()
    if isinstance(target, OpenSeries):
        return target.id, target.summand, target.start
    return target, target, 0


def format_candidate(coefficients: Sequence[int], basis: Sequence[str]) -> Optional[str]:
    """Closed-form text for value = -sum_{i>0} c_i b_i / c_0, or None when c_0 vanishes."""
    lead = coefficients[0]
    if lead == 0:
        return None
    pieces = []
    for c, element in zip(coefficients[1:], basis):
        if c == 0:
            continue
        ratio = Fraction(-c, lead)
        sign = "-" if ratio < 0 else "+"
        magnitude = abs(ratio)
        text = f"({element})" if magnitude == 1 else f"{format_rational(magnitude)}*({element})"
        pieces.append((sign, text))
    if not pieces:
        return "0"
    head_sign, head = pieces[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out


def margin(coefficients: Sequence[int], digits: int) -> float:
    """Digits used minus the digits the coefficient heights can account for."""
    explained = sum(math.log10(abs(c)) for c in coefficients if c)
    return digits - explained


def discover_closed_form(
    target: Target,
    basis: Optional[Sequence[str]] = None,
    digits: Optional[int] = None,
    sequences: Optional[Mapping[str, RecurrenceSpec]] = None,
    start: Optional[int] = None,
) -> Candidate:
    """Evaluate the series and look for a rational combination of the basis equal to it."""
    if isinstance(target, OpenSeries) and basis is None and target.basis:
        basis = target.basis
    basis = list(basis or settings.DISCOVERY_BASIS)
    if not basis:
        raise ValueError("discovery needs a nonempty basis")
    digits = digits or settings.DISCOVERY_DIGITS
    name, summand, series_start = _target_series(target)
    if start is not None:
        series_start = start

    table = sequence_table(sequences)
    expr = parse_summand(summand, None, tuple(table))
    prec = working_prec(digits + EVALUATION_HEADROOM)
    enclosure = sum_to_tolerance(expr, digits + EVALUATION_HEADROOM, series_start, table, prec=prec)
    if not enclosure.converged:
        raise InsufficientPrecisionError(f"series {name} did not converge within {enclosure.terms_used} terms")
    values = [enclosure.value] + [eval_closed_form(parse_closed_form(b), prec) for b in basis]

    relation = pslq(values, settings.PSLQ_MAX_HEIGHT, digits)
    if not relation.found:
        return Candidate(name, None, relation, basis)
    expression = format_candidate(relation.coefficients, basis)
    if expression is None:
        logger.warning(f"Relation {relation.coefficients} does not involve the series {name}")
    result = Candidate(name, expression, relation, basis, margin(relation.coefficients, digits))
    logger.info(f"Candidate for {name}: {expression} (margin {result.margin:.1f} digits)")
    return result
