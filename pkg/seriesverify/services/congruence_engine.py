"""
Finite sums modulo prime powers and per-prime congruence verdicts.

Two strategies evaluate a truncated sum:

* ExactRational sums the exact rational terms, then reduces once.
* ModPKFast never leaves valuated residues: binomials come from factorial unit
  parts and valuations, harmonic numbers from residue prefix sums.

Sums running to p - 1 meet p-divisible binomials in denominators, so neither
path ever inverts a residue naively.
"""
import logging
import time
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from seriesverify.arith.exact import (
    bernoulli_number,
    euler_number,
    harmonic,
    kronecker_symbol,
    primes_between,
    valuation,
)
from seriesverify.arith.modpk import (
    FactorialTable,
    ModPK,
    bernoulli_mod,
    bernoulli_poly_mod,
    euler_mod,
    euler_poly_mod,
    fermat_quotient,
    prime_context,
    reduce_mod,
)
from seriesverify.common.logging import verification_context
from seriesverify.common.metrics import STRATEGY_FALLBACKS_TOTAL
from seriesverify.config import settings
from seriesverify.exceptions import (
    AtomUndefinedError,
    ExprSyntaxError,
    NotRationalError,
    PrecisionExhaustedError,
    StrategyMismatchError,
    SummandEvaluationError,
)
from seriesverify.expr.evaluate import SequenceTable, interpret_rational
from seriesverify.expr.nodes import BinOp, Call, CongruenceRHS, Neg, Node, Num, SummandExpr, Var
from seriesverify.expr.normalize import poly_eval
from seriesverify.expr.parser import parse_congruence_rhs, parse_summand
from seriesverify.models.records import ConjectureRecord, RecordKind, RecurrenceSpec, SeriesSpec
from seriesverify.models.verdicts import CongruenceVerdict, Strategy
from seriesverify.services.series_engine import exact_partial_sum, sequence_table

logger = logging.getLogger(__name__)

STRATEGIES = ("auto", "exact", "fast", "both")

# Each retry multiplies the guard digits by this factor
GUARD_GROWTH = (1, 2, 4)


# ---------------------------------------------------------------------------
# Left-hand sides
# ---------------------------------------------------------------------------

def sum_exact(expr: SummandExpr, lo: int, hi: int, p: int, e: int,
              sequences: Optional[SequenceTable] = None) -> ModPK:
    """Exact rational sum over lo..hi, reduced mod p^e."""
    total = exact_partial_sum(expr, hi, lo, sequences, p) if hi >= lo else Fraction(0)
    if total == 0:
        return ModPK.zero(p, e, e + settings.MODPK_GUARD_DIGITS)
    guard = settings.MODPK_GUARD_DIGITS + max(0, -valuation(total, p))
    return reduce_mod(total, p, e, guard)


def _largest_index(expr: SummandExpr, hi: int) -> int:
    top = 1
    for term in expr.terms:
        for (a, a0, _, _), _ in term.binoms:
            top = max(top, a * hi + a0)
        if term.hf is not None:
            for (mult, shift, _), _ in term.hf.items:
                top = max(top, mult * hi + shift)
    return top


class FastSum:
    """ModPK evaluation of a rational summand at one prime and guard."""

    def __init__(self, expr: SummandExpr, p: int, e: int, hi: int, guard: int,
                 sequences: Optional[SequenceTable] = None):
        self.expr = expr
        self.p = p
        self.e = e
        self.guard = guard
        self.sequences = sequences or {}
        size = _largest_index(expr, hi)
        self.factorials = FactorialTable(p, e, size, guard)
        self._harmonics: Dict[int, List[ModPK]] = {}
        orders = {order for t in expr.terms if t.hf for (_, _, order), _ in t.hf.items}
        for order in orders:
            self._harmonics[order] = self._harmonic_prefix(order, size)
        self._bases = {t.base: reduce_mod(t.base, p, e, guard) for t in expr.terms}

    def _harmonic_prefix(self, order: int, size: int) -> List[ModPK]:
        prefix = [ModPK.zero(self.p, self.e, self.e + self.guard)]
        for j in range(1, size + 1):
            prefix.append(prefix[-1] + reduce_mod(Fraction(1, j ** order), self.p, self.e, self.guard))
        return prefix

    def _reduce(self, value: Fraction) -> ModPK:
        return reduce_mod(value, self.p, self.e, self.guard)

    def term(self, term, k: int) -> Optional[ModPK]:
        """Value of one Term at k, or None when it vanishes exactly."""
        p = self.p
        scalar = poly_eval(term.poly, k)
        if scalar == 0:
            return None
        for factor, n in term.denominators:
            d = poly_eval(factor, k)
            if d == 0:
                raise SummandEvaluationError(f"denominator vanishes at k={k}")
            scalar /= d ** n
        if term.seq:
            if term.seq not in self.sequences:
                raise SummandEvaluationError(f"unknown sequence {term.seq!r}")
            scalar *= Fraction(self.sequences[term.seq](k))
            if scalar == 0:
                return None
        value = self._reduce(scalar)

        for (a, a0, b, b0), exponent in term.binoms:
            top, bottom = a * k + a0, b * k + b0
            if top < 0:
                raise SummandEvaluationError(f"binomial with negative top {top} at k={k}")
            c = self.factorials.binomial(top, bottom)
            if c.is_zero:
                if exponent < 0:
                    raise SummandEvaluationError(f"zero binomial in a denominator at k={k}")
                return None
            if (a, a0, b, b0) == (2, 0, 1, 0) and 2 * k < p:
                assert c.v == 0, f"v_{p}(C(2k,k)) must vanish for k={k} <= (p-1)/2"
            value = value * c ** exponent

        if term.base != 1:
            value = value * self._bases[term.base] ** k
        if term.hf is not None:
            h = self._reduce(term.hf.c0)
            for (mult, shift, order), coeff in term.hf.items:
                index = mult * k + shift
                if index < 0:
                    raise SummandEvaluationError(f"harmonic index {index} < 0 at k={k}")
                h = h + self._harmonics[order][index] * coeff
            value = value * h
        if term.p_power:
            value = value * ModPK.from_parts(p, self.e, 1, 1, self.e + self.guard) ** term.p_power
        return value

    def total(self, lo: int, hi: int) -> ModPK:
        result = ModPK.zero(self.p, self.e, self.e + self.guard)
        for k in range(lo, hi + 1):
            for term in self.expr.terms:
                value = self.term(term, k)
                if value is not None:
                    result = result + value
        return result


def sum_fast(expr: SummandExpr, lo: int, hi: int, p: int, e: int,
             sequences: Optional[SequenceTable] = None) -> ModPK:
    """ModPK sum over lo..hi, retrying with larger guards before PrecisionExhaustedError escapes."""
    guard = settings.MODPK_GUARD_DIGITS
    last_error = None
    for factor in GUARD_GROWTH:
        try:
            return FastSum(expr, p, e, hi, guard * factor, sequences).total(lo, hi)
        except PrecisionExhaustedError as err:
            last_error = err
            logger.debug(f"Fast path at p={p} lost precision with guard {guard * factor}: {str(err)}")
    raise last_error


def finite_sum_mod(
    series: SeriesSpec,
    p: int,
    e: int,
    strategy: str = "auto",
    params: Optional[dict] = None,
    sequences: Optional[Mapping[str, RecurrenceSpec]] = None,
) -> ModPK:
    """Truncated sum of a congruence record mod p^e."""
    table = sequence_table(sequences)
    expr = parse_summand(series.summand, params, tuple(table))
    value, _ = evaluate_sum(expr, series, p, e, strategy, table)
    return value


def evaluate_sum(expr: SummandExpr, series: SeriesSpec, p: int, e: int, strategy: str,
                 table: SequenceTable) -> Tuple[ModPK, Strategy]:
    """Sum with the requested strategy; returns the value and the strategy that produced it."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not expr.is_rational:
        raise NotRationalError("congruence summands must be rational")
    lo, hi = series.lower(p), series.upper(p)

    if strategy == "auto":
        strategy = "exact" if p <= settings.EXACT_PRIME_LIMIT else "fast"
    if strategy == "exact":
        return sum_exact(expr, lo, hi, p, e, table), Strategy.EXACT

    try:
        fast = sum_fast(expr, lo, hi, p, e, table)
    except PrecisionExhaustedError as err:
        STRATEGY_FALLBACKS_TOTAL.labels(reason="precision").inc()
        logger.warning(f"Fast path exhausted its precision at p={p}, falling back to exact rationals: {str(err)}")
        return sum_exact(expr, lo, hi, p, e, table), Strategy.EXACT
    if strategy == "fast":
        return fast, Strategy.FAST

    exact = sum_exact(expr, lo, hi, p, e, table)
    if not exact.congruent(fast):
        raise StrategyMismatchError(
            f"exact {exact.describe()} and fast {fast.describe()} disagree at p={p}"
        )
    return exact, Strategy.EXACT


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------

def _integer(node: Node, p: int, what: str) -> int:
    value = interpret_rational(node, {"p": Fraction(p)})
    if value.denominator != 1:
        raise ExprSyntaxError(f"{what} must be an integer at p={p}, got {value}")
    return int(value)


class RhsEvaluator:
    """Walks a congruence right-hand side in ModPK at a fixed guard."""

    def __init__(self, p: int, e: int, guard: int):
        self.p = p
        self.e = e
        self.guard = guard
        self._ctx = None

    @property
    def ctx(self):
        if self._ctx is None:
            self._ctx = prime_context(self.p, self.e, self.guard)
        return self._ctx

    def reduce(self, value: Fraction) -> ModPK:
        value = Fraction(value)
        guard = self.guard
        if value != 0:
            guard += max(0, -valuation(value, self.p))
        return reduce_mod(value, self.p, self.e, guard)

    def eval(self, node: Node) -> ModPK:
        p = self.p
        if isinstance(node, Num):
            return self.reduce(node.value)
        if isinstance(node, Var):
            if node.name != "p":
                raise ExprSyntaxError(f"unbound variable {node.name!r} in a congruence")
            return ModPK.from_parts(p, self.e, 1, 1, self.e + self.guard)
        if isinstance(node, Neg):
            return -self.eval(node.operand)
        if isinstance(node, BinOp):
            if node.op == "^":
                return self._power(node.left, node.right)
            left, right = self.eval(node.left), self.eval(node.right)
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if right.is_zero:
                raise AtomUndefinedError(f"division by a quantity divisible by p^{right.v} at p={p}")
            return left / right
        if isinstance(node, Call):
            return self._call(node)
        raise ExprSyntaxError(f"cannot evaluate {node!r} in a congruence")

    def _power(self, base: Node, exponent: Node) -> ModPK:
        n = _integer(exponent, self.p, "exponent")
        value = self.eval(base)
        if value.is_zero and n < 0:
            raise AtomUndefinedError(f"zero to a negative power at p={self.p}")
        return value ** n

    def _call(self, node: Call) -> ModPK:
        p, name, args = self.p, node.name, node.args
        if name == "kron":
            return self.reduce(kronecker_symbol(_integer(args[0], p, "kron"), _integer(args[1], p, "kron")))
        if name == "q":
            return fermat_quotient(_integer(args[0], p, "q argument"), p, self.e, self.guard)
        if name == "H":
            n = _integer(args[0], p, "H index")
            m = _integer(args[1], p, "H order") if len(args) > 1 else 1
            if n < 0:
                raise AtomUndefinedError(f"H at negative index {n}")
            return self.reduce(harmonic(n, m))
        if name in ("B", "E"):
            n = _integer(args[0], p, f"{name} index")
            if n < 0:
                raise AtomUndefinedError(f"{name}_{n} at p={p}")
            if len(args) == 1:
                return self._number(name, n)
            x = interpret_rational(args[1], {"p": Fraction(p)})
            return self._polynomial(name, n, x, node)
        raise ExprSyntaxError(f"unknown congruence atom {name!r}")

    def _number(self, name: str, n: int) -> ModPK:
        if name == "B":
            if n <= self.p - 2:
                return bernoulli_mod(n, self.ctx)
            return self.reduce(bernoulli_number(n))
        if n <= self.p - 1:
            return euler_mod(n, self.ctx)
        return self.reduce(Fraction(euler_number(n)))

    def _polynomial(self, name: str, n: int, x: Fraction, node: Call) -> ModPK:
        p_integral = x.denominator % self.p != 0
        if name == "B" and p_integral and n <= self.p - 2:
            return bernoulli_poly_mod(n, x, self.ctx)
        if name == "E" and p_integral and n <= self.p - 1:
            return euler_poly_mod(n, x, self.ctx)
        return self.reduce(interpret_rational(node, {"p": Fraction(self.p)}))


def eval_congruence_rhs(rhs: CongruenceRHS, p: int, e: int) -> ModPK:
    """Right-hand side mod p^e; AtomUndefinedError when an atom does not exist at p."""
    guard = settings.MODPK_GUARD_DIGITS
    last_error = None
    for factor in GUARD_GROWTH:
        try:
            return RhsEvaluator(p, e, guard * factor).eval(rhs.node)
        except PrecisionExhaustedError as err:
            last_error = err
        except ZeroDivisionError as err:
            raise AtomUndefinedError(f"{str(err)} at p={p}") from err
    # Exact reduction of a rational right-hand side is the last resort
    logger.warning(f"Right-hand side {rhs.text!r} lost precision at p={p}, reducing exactly")
    try:
        value = interpret_rational(rhs.node, {"p": Fraction(p)})
    except (ZeroDivisionError, NotRationalError) as err:
        raise AtomUndefinedError(f"{str(err)} at p={p}") from last_error
    return RhsEvaluator(p, e, guard * GUARD_GROWTH[-1]).reduce(value)


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

def _verify_prime(record: ConjectureRecord, expr: SummandExpr, rhs_expr: CongruenceRHS, p: int,
                  label: str, strategy: str, table: Dict[str, Callable]) -> CongruenceVerdict:
    start_time = time.time()
    e = record.modexp
    verdict = CongruenceVerdict(record.id, p, e, None, sample=label, flags=list(record.flags))
    try:
        verdict.lhs, verdict.strategy = evaluate_sum(expr, record.series, p, e, strategy, table)
        verdict.rhs = eval_congruence_rhs(rhs_expr, p, e)
        verdict.holds = verdict.lhs.congruent(verdict.rhs)
    except (AtomUndefinedError, SummandEvaluationError, PrecisionExhaustedError, ValueError) as err:
        logger.warning(f"{record.id} {label} skipped at p={p}: {str(err)}")
        verdict.holds = None
        verdict.reason = str(err)
    if verdict.holds is False:
        logger.info(f"{record.id} {label} fails at p={p}: {verdict.lhs.describe()} vs {verdict.rhs.describe()}")
    verdict.elapsed = time.time() - start_time
    return verdict


def verify_congruence(
    record: ConjectureRecord,
    prime_lo: Optional[int] = None,
    prime_hi: Optional[int] = None,
    strategy: Optional[str] = None,
    sequences: Optional[Mapping[str, RecurrenceSpec]] = None,
) -> List[CongruenceVerdict]:
    """Verdicts for every admissible prime in [prime_lo, prime_hi] and every sample point."""
    if record.kind is not RecordKind.CONGRUENCE:
        raise ValueError(f"{record.id} is not a congruence record")
    prime_lo = settings.PRIME_MIN if prime_lo is None else prime_lo
    prime_hi = settings.PRIME_MAX if prime_hi is None else prime_hi
    strategy = strategy or settings.STRATEGY
    table = sequence_table(sequences)
    primes = [p for p in primes_between(prime_lo, prime_hi) if p > 2 and record.prime_filter.admits(p)]

    verdicts: List[CongruenceVerdict] = []
    for sample in record.sample_points():
        label = record.sample_label(sample)
        expr = parse_summand(record.series.summand, sample, tuple(table))
        rhs_expr = parse_congruence_rhs(record.rhs, sample)
        for p in primes:
            with verification_context(prime=p):
                verdicts.append(_verify_prime(record, expr, rhs_expr, p, label, strategy, table))

    verdicts.sort(key=lambda v: (v.record_id, v.prime, v.sample))
    held = sum(1 for v in verdicts if v.holds)
    skipped = sum(1 for v in verdicts if v.skipped)
    logger.info(
        f"{record.id}: holds at {held} of {len(verdicts)} (prime, sample) pairs "
        f"in [{prime_lo}, {prime_hi}], {skipped} skipped"
    )
    return verdicts
