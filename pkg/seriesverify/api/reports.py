"""Report projections: canonical JSON, a markdown table (jinja2) and CSV."""
import csv
import io
from pathlib import Path
from typing import Union

from jinja2 import Environment, StrictUndefined

from seriesverify.models.report import Report, ReportEntry

CSV_COLUMNS = list(ReportEntry.model_fields)

MARKDOWN_TEMPLATE = """\
# Verification report

Generated {{ report.generated_at.strftime("%Y-%m-%d %H:%M:%S") }} (schema {{ report.schema_version }})
{% if report.config %}
| Setting | Value |
|---|---|
{% for key, value in report.config.items() -%}
| {{ key }} | {{ value if value is not none else "" }} |
{% endfor %}
{% endif %}
## Summary

| Total | Equal | Distinct | Inconclusive | Holds | Fails | Skipped | Errors |
|---|---|---|---|---|---|---|---|
| {{ s.total }} | {{ s.certified_equal }} | {{ s.certified_distinct }} | {{ s.inconclusive }} | {{ s.holds }} | {{ s.fails }} | {{ s.skipped }} | {{ s.errors }} |
{% if s.findings %}
### Findings

{% for finding in s.findings -%}
- {{ finding }} is CertifiedDistinct
{% endfor %}
{% endif %}
{% if s.gating_failures %}
### Gate failures

{% for failure in s.gating_failures -%}
- {{ failure }}
{% endfor %}
{% endif %}
## Entries

| Id | Sample | Digits / p | Verdict | LHS | RHS | Strategy | Flags | Reason |
|---|---|---|---|---|---|---|---|---|
{% for e in report.entries -%}
| {{ e.id }} | {{ e.sample }} | {{ e.prime if e.prime is not none else (e.digits if e.digits is not none else "") }} \
| {{ e.verdict }} | {{ e.lhs or "" }} | {{ e.rhs or "" }} | {{ e.strategy or "" }} \
| {{ e.flags | join(", ") }} | {{ e.reason | replace("|", "/") }} |
{% endfor %}
"""

_environment = Environment(undefined=StrictUndefined, keep_trailing_newline=True)


def render_json(report: Report) -> str:
    return report.model_dump_json(indent=2) + "\n"


def render_markdown(report: Report) -> str:
    template = _environment.from_string(MARKDOWN_TEMPLATE)
    return template.render(report=report, s=report.summary)


def render_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for entry in report.entries:
        row = entry.model_dump()
        row["flags"] = ";".join(entry.flags)
        writer.writerow(row)
    return buffer.getvalue()


RENDERERS = {
    "json": render_json,
    "markdown": render_markdown,
    "csv": render_csv,
}


def render(report: Report, fmt: str = "json") -> str:
    try:
        renderer = RENDERERS[fmt]
    except KeyError:
        raise ValueError(f"unknown report format {fmt!r}")
    return renderer(report)


def load_report(path: Union[str, Path]) -> Report:
    """Read a JSON report written by verify or verify-all."""
    return Report.model_validate_json(Path(path).read_text(encoding="utf-8"))
