import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List, Optional, Tuple

from mpmath.libmp import to_str

from seriesverify.arith.realball import Verdict
from seriesverify.common.logging import verification_context
from seriesverify.common.metrics import VERIFICATION_DURATION, record_verdict
from seriesverify.constants.cache import configure_constant_cache
from seriesverify.expr.registry import ConjectureRegistry
from seriesverify.models.records import GATE_EXEMPT_FLAGS, Category, ConjectureRecord, RecordKind, RecurrenceSpec
from seriesverify.models.report import Report, ReportEntry, ReportSummary
from seriesverify.models.run_config import RunConfig
from seriesverify.models.verdicts import CongruenceVerdict, IdentityVerdict, SeriesStatus
from seriesverify.services.congruence_engine import verify_congruence
from seriesverify.services.series_engine import verify_identity

logger = logging.getLogger(__name__)

# Digits shown for ball midpoints beyond the certified ones
DISPLAY_EXTRA_DIGITS = 5

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INCONCLUSIVE = 2


def identity_entry(verdict: IdentityVerdict) -> ReportEntry:
    shown = verdict.digits + DISPLAY_EXTRA_DIGITS
    status = "ok"
    if verdict.status is SeriesStatus.TAIL_CAP_HIT:
        status = SeriesStatus.TAIL_CAP_HIT.value
    elif verdict.lhs is None:
        status = "error"
    return ReportEntry(
        id=verdict.record_id,
        kind=RecordKind.IDENTITY.value,
        verdict=verdict.verdict.value,
        digits=verdict.digits,
        sample=verdict.sample,
        lhs=verdict.lhs.to_str(shown) if verdict.lhs is not None else None,
        rhs=verdict.rhs.to_str(shown) if verdict.rhs is not None else None,
        bound=to_str(verdict.bound, 5) if verdict.bound is not None else None,
        status=status,
        elapsed=round(verdict.elapsed, 3),
        flags=verdict.flags,
        reason=verdict.reason,
    )


def congruence_entry(verdict: CongruenceVerdict) -> ReportEntry:
    if verdict.skipped:
        outcome = "skipped"
    else:
        outcome = "holds" if verdict.holds else "fails"
    return ReportEntry(
        id=verdict.record_id,
        kind=RecordKind.CONGRUENCE.value,
        verdict=outcome,
        prime=verdict.prime,
        sample=verdict.sample,
        lhs=verdict.lhs.describe() if verdict.lhs is not None else None,
        rhs=verdict.rhs.describe() if verdict.rhs is not None else None,
        strategy=verdict.strategy.value if verdict.strategy is not None else None,
        elapsed=round(verdict.elapsed, 3),
        flags=verdict.flags,
        reason=verdict.reason,
    )


def error_entry(record: ConjectureRecord, reason: str) -> ReportEntry:
    return ReportEntry(
        id=record.id,
        kind=record.kind.value,
        verdict="error",
        status="error",
        flags=list(record.flags),
        reason=reason,
    )


def run_record(record: ConjectureRecord, config: RunConfig,
               sequences: Optional[Dict[str, RecurrenceSpec]] = None) -> List[ReportEntry]:
    """Verify one record; errors become a single "error" entry instead of escaping."""
    with verification_context(record_id=record.id):
        try:
            if record.kind is RecordKind.IDENTITY:
                verdicts = verify_identity(record, config.digits, sequences)
                return [identity_entry(v) for v in verdicts]
            verdicts = verify_congruence(record, config.prime_min, config.prime_max, config.strategy, sequences)
            return [congruence_entry(v) for v in verdicts]
        except Exception as e:
            logger.error(f"Error verifying {record.id}: {str(e)}")
            return [error_entry(record, str(e))]


def _init_worker(cache_dir, cache_enabled: bool) -> None:
    configure_constant_cache(cache_dir, cache_enabled)


def _is_exempt(entry: ReportEntry) -> bool:
    return bool(GATE_EXEMPT_FLAGS.intersection(entry.flags))


def summarize(entries: Iterable[ReportEntry], categories: Dict[str, Category]) -> ReportSummary:
    """Counts, gate failures (non-exempt distinct/fails) and findings (distinct on printed conjectures)."""
    summary = ReportSummary()
    for entry in entries:
        summary.total += 1
        label = entry.id + (f" [{entry.sample}]" if entry.sample else "")
        if entry.prime is not None:
            label += f" p={entry.prime}"
        if entry.verdict == Verdict.CERTIFIED_EQUAL.value:
            summary.certified_equal += 1
        elif entry.verdict == Verdict.CERTIFIED_DISTINCT.value:
            summary.certified_distinct += 1
            if categories.get(entry.id) is Category.CONJECTURE:
                summary.findings.append(label)
        elif entry.verdict == Verdict.INCONCLUSIVE.value:
            summary.inconclusive += 1
        elif entry.verdict == "holds":
            summary.holds += 1
        elif entry.verdict == "fails":
            summary.fails += 1
        elif entry.verdict == "skipped":
            summary.skipped += 1
        else:
            summary.errors += 1
        if entry.verdict in (Verdict.CERTIFIED_DISTINCT.value, "fails") and not _is_exempt(entry):
            summary.gating_failures.append(label)
    return summary


def exit_code(report: Report) -> int:
    """0 when everything gated holds, 1 on a gated failure, 2 when gated results are inconclusive."""
    if report.summary.gating_failures:
        return EXIT_FAILURE
    for entry in report.entries:
        if _is_exempt(entry):
            continue
        if entry.verdict in (Verdict.INCONCLUSIVE.value, "error"):
            return EXIT_INCONCLUSIVE
    return EXIT_OK


class VerificationService:
    """Runs registry records, serially or on a process pool, and assembles the report."""

    def __init__(self, registry: ConjectureRegistry, config: RunConfig):
        self.registry = registry
        self.config = config

    def _run_all(self, records: List[ConjectureRecord]) -> List[Tuple[ConjectureRecord, List[ReportEntry]]]:
        sequences = self.registry.sequences
        if self.config.parallelism <= 1 or len(records) <= 1:
            return [(record, run_record(record, self.config, sequences)) for record in records]

        logger.info(f"Verifying {len(records)} records on {self.config.parallelism} worker processes")
        with ProcessPoolExecutor(
            max_workers=self.config.parallelism,
            initializer=_init_worker,
            initargs=(self.config.cache_dir, self.config.cache_enabled),
        ) as executor:
            futures = [executor.submit(run_record, record, self.config, sequences) for record in records]
            return [(record, future.result()) for record, future in zip(records, futures)]

    def run(self, records: Optional[List[ConjectureRecord]] = None) -> Report:
        """Verify the selected records (config ids, or everything) and return a sorted report."""
        if records is None:
            records = self.registry.select(self.config.ids)
        start_time = time.time()

        entries: List[ReportEntry] = []
        for record, produced in self._run_all(records):
            kind = record.kind.value
            VERIFICATION_DURATION.labels(kind=kind).observe(sum(e.elapsed for e in produced))
            for entry in produced:
                record_verdict(kind, entry.verdict)
            entries.extend(produced)

        categories = {record.id: record.category for record in records}
        report = Report(
            config=self.config.public_dict(),
            summary=summarize(entries, categories),
            entries=entries,
        ).sorted()
        summary = report.summary
        logger.info(
            f"Verified {len(records)} records in {time.time() - start_time:.1f}s: "
            f"{summary.certified_equal} equal, {summary.certified_distinct} distinct, "
            f"{summary.inconclusive} inconclusive, {summary.holds} holds, {summary.fails} fails, "
            f"{summary.skipped} skipped, {summary.errors} errors"
        )
        for finding in summary.findings:
            logger.warning(f"Finding: printed conjecture {finding} is CertifiedDistinct")
        return report
