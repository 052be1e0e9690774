from seriesverify.models.records import (
    Category,
    ConjectureRecord,
    OpenSeries,
    PrimeFilter,
    Provenance,
    RecordKind,
    RecurrenceSpec,
    SeriesSpec,
    TemplateSpec,
    UpperLimit,
)
from seriesverify.models.report import Report, ReportEntry, ReportSummary
from seriesverify.models.run_config import RunConfig
from seriesverify.models.verdicts import (
    Candidate,
    CongruenceVerdict,
    IdentityVerdict,
    RelationResult,
    SeriesEnclosure,
    SeriesStatus,
    Strategy,
)

__all__ = [
    "Category", "ConjectureRecord", "OpenSeries", "PrimeFilter", "Provenance", "RecordKind",
    "RecurrenceSpec", "SeriesSpec", "TemplateSpec", "UpperLimit", "Report", "ReportEntry",
    "ReportSummary", "RunConfig", "Candidate", "CongruenceVerdict", "IdentityVerdict",
    "RelationResult", "SeriesEnclosure", "SeriesStatus", "Strategy",
]
