import json

import pytest

from seriesverify.common.metrics import REGISTRY
from seriesverify.models.records import Category, ConjectureRecord
from seriesverify.models.report import Report, ReportEntry
from seriesverify.models.run_config import RunConfig
from seriesverify.services.verification_service import (
    EXIT_FAILURE,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    VerificationService,
    exit_code,
    run_record,
    summarize,
)
from tests.conftest import FIXTURES

PROJECTED_FIELDS = ("id", "kind", "verdict", "digits", "prime", "sample", "strategy", "status", "flags")


def _project(report: Report) -> dict:
    return {
        "schema_version": report.schema_version,
        "config": report.config,
        "summary": report.summary.model_dump(),
        "entries": [{field: getattr(e, field) for field in PROJECTED_FIELDS} for e in report.entries],
    }


def _config(path, **overrides) -> RunConfig:
    options = dict(registry_path=path, digits=30, prime_min=3, prime_max=13, strategy="auto", cache_enabled=False)
    options.update(overrides)
    return RunConfig(**options)


def _entry(verdict, flags=(), **extra) -> ReportEntry:
    kind = "congruence" if verdict in ("holds", "fails", "skipped") else "identity"
    return ReportEntry(id=extra.pop("id", "X"), kind=kind, verdict=verdict, flags=list(flags), **extra)


def test_golden_report(fixture_registry, fixture_registry_path):
    report = VerificationService(fixture_registry, _config(fixture_registry_path)).run()
    golden = json.loads((FIXTURES / "golden_report.json").read_text(encoding="utf-8"))
    assert _project(report) == golden
    assert exit_code(report) == EXIT_FAILURE


def test_parallel_run_matches_serial(fixture_registry, fixture_registry_path):
    ids = ["WOLSTENHOLME", "REVIEW"]
    serial = VerificationService(fixture_registry, _config(fixture_registry_path, ids=ids)).run()
    parallel = VerificationService(fixture_registry, _config(fixture_registry_path, ids=ids, parallelism=2)).run()
    assert _project(parallel) == _project(serial)
    assert len(serial.entries) == 8


def test_summarize_counts_and_labels():
    entries = [
        _entry("CertifiedEqual", id="A"),
        _entry("CertifiedDistinct", id="B", sample="x=1/2"),
        _entry("CertifiedDistinct", id="C", flags=["alternate-variant"]),
        _entry("Inconclusive", id="D"),
        _entry("holds", id="E", prime=5),
        _entry("fails", id="E", prime=7),
        _entry("fails", id="F", prime=7, flags=["review"]),
        _entry("skipped", id="G", prime=5),
        _entry("error", id="H"),
    ]
    categories = {"B": Category.CONJECTURE, "C": Category.CONJECTURE, "E": Category.THEOREM}
    summary = summarize(entries, categories)
    assert (summary.total, summary.certified_equal, summary.certified_distinct, summary.inconclusive) == (9, 1, 2, 1)
    assert (summary.holds, summary.fails, summary.skipped, summary.errors) == (1, 2, 1, 1)
    assert summary.gating_failures == ["B [x=1/2]", "E p=7"]
    assert summary.findings == ["B [x=1/2]", "C"]


@pytest.mark.parametrize(
    "entries, expected",
    [
        ([_entry("CertifiedEqual"), _entry("holds", prime=5), _entry("skipped", prime=7)], EXIT_OK),
        ([_entry("CertifiedEqual"), _entry("Inconclusive")], EXIT_INCONCLUSIVE),
        ([_entry("Inconclusive", flags=["review"])], EXIT_OK),
        ([_entry("error")], EXIT_INCONCLUSIVE),
        ([_entry("Inconclusive"), _entry("fails", prime=5)], EXIT_FAILURE),
        ([_entry("fails", prime=5, flags=["limit-as-printed-ambiguous"])], EXIT_OK),
        ([], EXIT_OK),
    ],
)
def test_exit_code(entries, expected):
    report = Report(summary=summarize(entries, {}), entries=entries)
    assert exit_code(report) == expected


def test_run_record_turns_errors_into_entries(fixture_registry_path):
    record = ConjectureRecord.model_validate({
        "id": "BROKEN",
        "kind": "congruence",
        "series": {"summand": "1/(k", "start": 1, "limit": "p-1"},
        "rhs": "0",
        "modexp": 1,
        "flags": ["review"],
        "provenance": {"label": "test"},
    })
    (entry,) = run_record(record, _config(fixture_registry_path))
    assert entry.verdict == "error"
    assert entry.status == "error"
    assert entry.flags == ["review"]
    assert entry.reason


def test_identity_entries_carry_enclosures(fixture_registry, fixture_registry_path):
    config = _config(fixture_registry_path, ids=["APERY"])
    (entry,) = VerificationService(fixture_registry, config).run().entries
    assert entry.lhs.startswith("0.4808")
    assert entry.rhs.startswith("0.4808")
    assert "+/-" in entry.lhs
    assert entry.bound is not None
    assert entry.elapsed >= 0


def test_run_observes_duration_per_record(fixture_registry, fixture_registry_path):
    def count():
        return REGISTRY.get_sample_value(
            "seriesverify_verification_duration_seconds_count", {"kind": "congruence"}
        ) or 0.0

    before = count()
    config = _config(fixture_registry_path, ids=["WOLSTENHOLME", "REVIEW"], parallelism=2)
    VerificationService(fixture_registry, config).run()
    assert count() == before + 2
