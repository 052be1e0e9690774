from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

REPORT_SCHEMA_VERSION = 1

# Fields that legitimately differ between two runs of the same configuration
VOLATILE_FIELDS = ("generated_at", "elapsed")


class ReportEntry(BaseModel):
    """One verdict row; identity rows fill `digits`, congruence rows fill `prime`."""
    id: str
    kind: str
    verdict: str
    digits: Optional[int] = None
    prime: Optional[int] = None
    sample: str = ""
    lhs: Optional[str] = None
    rhs: Optional[str] = None
    bound: Optional[str] = None
    strategy: Optional[str] = None
    status: str = "ok"
    elapsed: float = 0.0
    flags: List[str] = []
    reason: str = ""

    def sort_key(self):
        return (self.id, self.prime or 0, self.sample)


class ReportSummary(BaseModel):
    total: int = 0
    certified_equal: int = 0
    certified_distinct: int = 0
    inconclusive: int = 0
    holds: int = 0
    fails: int = 0
    skipped: int = 0
    errors: int = 0
    gating_failures: List[str] = []
    findings: List[str] = []


class Report(BaseModel):
    schema_version: int = REPORT_SCHEMA_VERSION
    generated_at: datetime = Field(default_factory=datetime.now)
    config: Dict[str, Any] = {}
    summary: ReportSummary = Field(default_factory=ReportSummary)
    entries: List[ReportEntry] = []

    def sorted(self) -> "Report":
        return self.model_copy(update={"entries": sorted(self.entries, key=ReportEntry.sort_key)})
