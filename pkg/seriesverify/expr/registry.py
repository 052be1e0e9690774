"""Loading and validation of the TOML conjecture registry."""
import logging
import tomllib
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Union

from pydantic import ValidationError

from seriesverify.exceptions import ExprSyntaxError, RegistryError, UnknownRecordError
from seriesverify.expr.parser import parse_closed_form, parse_congruence_rhs, parse_polynomial, parse_summand
from seriesverify.expr.templates import derive_from_spec
from seriesverify.models.records import (
    ConjectureRecord,
    OpenSeries,
    RecordKind,
    RecurrenceSpec,
    TemplateSpec,
)

logger = logging.getLogger(__name__)

REGISTRY_SCHEMA_VERSION = 1


class ConjectureRegistry:
    """Immutable collection of validated records, sequences and discovery targets."""

    def __init__(
        self,
        records: Sequence[ConjectureRecord] = (),
        sequences: Sequence[RecurrenceSpec] = (),
        open_series: Sequence[OpenSeries] = (),
        source: Optional[Path] = None,
    ):
        self.source = source
        self.sequences: Dict[str, RecurrenceSpec] = {s.name: s for s in sequences}
        self.open_series: Dict[str, OpenSeries] = {s.id: s for s in open_series}
        self._records: Dict[str, ConjectureRecord] = {}
        for record in records:
            if record.id in self._records:
                raise RegistryError("duplicate record id", record.id)
            self._records[record.id] = record

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[ConjectureRecord]:
        return iter(self.records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    @property
    def records(self) -> List[ConjectureRecord]:
        return sorted(self._records.values(), key=lambda r: r.id)

    def get(self, record_id: str) -> ConjectureRecord:
        try:
            return self._records[record_id]
        except KeyError:
            raise UnknownRecordError("unknown record id", record_id)

    def select(self, selectors: Iterable[str]) -> List[ConjectureRecord]:
        """Records matching any selector; unknown selectors are an error."""
        selectors = list(selectors)
        if not selectors:
            return self.records
        chosen: Dict[str, ConjectureRecord] = {}
        for selector in selectors:
            matched = [r for r in self._records.values() if r.matches(selector)]
            if not matched:
                raise UnknownRecordError("no record matches this id", selector)
            chosen.update((r.id, r) for r in matched)
        return sorted(chosen.values(), key=lambda r: r.id)

    def by_kind(self, kind: RecordKind) -> List[ConjectureRecord]:
        return [r for r in self.records if r.kind is kind]

    def get_open_series(self, series_id: str) -> OpenSeries:
        try:
            return self.open_series[series_id]
        except KeyError:
            raise UnknownRecordError("unknown open series id", series_id)


def _validate_record(record: ConjectureRecord, sequence_names: Sequence[str]) -> None:
    """Parse every expression of the record at every sample point."""
    for sample in record.sample_points():
        try:
            expr = parse_summand(record.series.summand, sample, sequence_names)
            if record.kind is RecordKind.IDENTITY:
                if expr.uses_p:
                    raise RegistryError("identity summand mentions p", record.id)
                parse_closed_form(record.rhs, sample)
            else:
                if not expr.is_rational:
                    raise RegistryError("congruence summand must be rational", record.id)
                parse_congruence_rhs(record.rhs, sample)
        except ExprSyntaxError as e:
            label = record.sample_label(sample)
            where = f" (sample {label})" if label else ""
            raise RegistryError(f"expression error{where}: {str(e)}", record.id) from e


def _validate_sequence(spec: RecurrenceSpec) -> None:
    try:
        parse_polynomial(spec.lead)
        for text in spec.terms:
            parse_polynomial(text)
    except ExprSyntaxError as e:
        raise RegistryError(f"recurrence polynomial error: {str(e)}", spec.name) from e


def _model(cls, raw: dict, kind: str):
    try:
        return cls.model_validate(raw)
    except ValidationError as e:
        ident = raw.get("id") or raw.get("name") or f"<{kind}>"
        raise RegistryError(f"invalid {kind}: {e}", ident) from e


def parse_registry(data: dict, source: Optional[Path] = None) -> ConjectureRegistry:
    """Build a registry from already-decoded TOML data."""
    if not data:
        return ConjectureRegistry(source=source)
    version = data.get("schema_version")
    if version != REGISTRY_SCHEMA_VERSION:
        raise RegistryError(f"unsupported registry schema_version {version!r} (expected {REGISTRY_SCHEMA_VERSION})")

    sequences = [_model(RecurrenceSpec, raw, "sequence") for raw in data.get("sequence", [])]
    for spec in sequences:
        _validate_sequence(spec)
    names = tuple(s.name for s in sequences)

    records: List[ConjectureRecord] = [_model(ConjectureRecord, raw, "record") for raw in data.get("record", [])]
    for raw in data.get("template", []):
        records.extend(derive_from_spec(_model(TemplateSpec, raw, "template")))
    for record in records:
        _validate_record(record, names)

    open_series = [_model(OpenSeries, raw, "open_series") for raw in data.get("open_series", [])]
    for target in open_series:
        try:
            parse_summand(target.summand, None, names)
        except ExprSyntaxError as e:
            raise RegistryError(f"expression error: {str(e)}", target.id) from e

    registry = ConjectureRegistry(records, sequences, open_series, source)
    logger.info(
        f"Loaded {len(registry)} records, {len(sequences)} sequences and "
        f"{len(open_series)} open series from {source or 'memory'}"
    )
    return registry


def load_registry(path: Union[str, Path]) -> ConjectureRegistry:
    """Read and validate a registry file; FileNotFoundError propagates to the caller."""
    path = Path(path)
    with open(path, "rb") as f:
        try:
            data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise RegistryError(f"{path}: {str(e)}") from e
    return parse_registry(data, path)
