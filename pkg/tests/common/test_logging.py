import json
import logging
import sys

from seriesverify.common.logging import ContextFilter, JSONFormatter, configure_logging, verification_context


def _record(**extra) -> logging.LogRecord:
    record = logging.LogRecord("seriesverify.test", logging.WARNING, __file__, 1, "prime %d skipped", (7,), None)
    record.__dict__.update(extra)
    return record


def test_json_formatter_fields():
    payload = json.loads(JSONFormatter("seriesverify").format(_record(record_id="C3.1", prime=7)))
    assert payload["service"] == "seriesverify"
    assert payload["level"] == "WARNING"
    assert payload["name"] == "seriesverify.test"
    assert payload["message"] == "prime 7 skipped"
    assert payload["record_id"] == "C3.1"
    assert payload["prime"] == 7
    assert "msg" not in payload and "timestamp" in payload


def test_json_formatter_exceptions():
    try:
        raise ZeroDivisionError("vanishing denominator")
    except ZeroDivisionError:
        record = _record()
        record.exc_info = sys.exc_info()
    payload = json.loads(JSONFormatter("seriesverify").format(record))
    assert "ZeroDivisionError: vanishing denominator" in payload["exception"]


def test_configure_logging_levels(monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "warning")
    configure_logging("seriesverify")
    assert logging.getLogger().level == logging.WARNING
    configure_logging("seriesverify", "debug")
    assert logging.getLogger().level == logging.DEBUG


def test_json_log_format(monkeypatch):
    monkeypatch.setenv("LOG_FORMAT", "json")
    configure_logging("seriesverify", "INFO")
    formatters = [h.formatter for h in logging.getLogger().handlers]
    assert any(isinstance(f, JSONFormatter) for f in formatters)


def test_verification_context_reaches_records():
    context_filter = ContextFilter()
    with verification_context(record_id="C3.1.ii"):
        with verification_context(prime=11):
            record = _record()
            context_filter.filter(record)
        outer = _record()
        context_filter.filter(outer)
    after = _record()
    context_filter.filter(after)

    assert (record.record_id, record.prime, record.context) == ("C3.1.ii", 11, "[record_id=C3.1.ii] [prime=11] ")
    assert outer.context == "[record_id=C3.1.ii] " and not hasattr(outer, "prime")
    assert after.context == ""

    payload = json.loads(JSONFormatter("seriesverify").format(record))
    assert payload["record_id"] == "C3.1.ii"
    assert "context" not in payload


def test_explicit_extra_wins_over_context():
    with verification_context(prime=5):
        record = _record(prime=7)
        ContextFilter().filter(record)
    assert record.prime == 7
