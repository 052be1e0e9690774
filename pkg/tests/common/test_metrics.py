from seriesverify.common.metrics import REGISTRY, record_verdict, write_metrics


def _value(name, **labels):
    return REGISTRY.get_sample_value(name, labels) or 0.0


def test_record_verdict_counts():
    before = _value("seriesverify_verifications_total", kind="identity", verdict="Inconclusive")
    record_verdict("identity", "Inconclusive")
    record_verdict("identity", "Inconclusive")
    assert _value("seriesverify_verifications_total", kind="identity", verdict="Inconclusive") == before + 2


def test_write_metrics(tmp_path):
    record_verdict("congruence", "holds")
    path = tmp_path / "seriesverify.prom"
    write_metrics(str(path))
    text = path.read_text(encoding="utf-8")
    assert "# TYPE seriesverify_verifications counter" in text
    assert "# TYPE seriesverify_verification_duration_seconds histogram" in text
