"""Registry records: series specs, prime filters, recurrence sequences, templates."""
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

HALF_PRIME_START = "(p+1)/2"

# Records carrying any of these flags are reported but never fail a run
GATE_EXEMPT_FLAGS = frozenset({"limit-as-printed-ambiguous", "alternate-variant", "review"})

PARAMETER_NAMES = ("x", "m", "n")


class RecordKind(str, Enum):
    IDENTITY = "identity"
    CONGRUENCE = "congruence"


class Category(str, Enum):
    CONJECTURE = "conjecture"
    BASELINE = "baseline"
    THEOREM = "theorem"


class UpperLimit(str, Enum):
    INFINITY = "inf"
    HALF_PRIME = "(p-1)/2"
    PRIME_MINUS_ONE = "p-1"


class PrimeFilter(BaseModel):
    """Conjunction of prime predicates: p > gt, p mod `mod` in `residues`, p not excluded, p coprime to N."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    gt: int = 2
    mod: Optional[int] = None
    residues: List[int] = []
    exclude: List[int] = []
    coprime_to: Optional[int] = None

    @model_validator(mode="after")
    def _check_residues(self):
        if self.mod is not None and not self.residues:
            raise ValueError("filter.mod needs at least one residue")
        if self.residues and self.mod is None:
            raise ValueError("filter.residues needs filter.mod")
        return self

    def admits(self, p: int) -> bool:
        if p <= self.gt:
            return False
        if self.mod is not None and p % self.mod not in {r % self.mod for r in self.residues}:
            return False
        if p in self.exclude:
            return False
        if self.coprime_to is not None and self.coprime_to % p == 0:
            return False
        return True

    def describe(self) -> str:
        parts = [f"p > {self.gt}"]
        if self.mod is not None:
            parts.append(f"p mod {self.mod} in {sorted(self.residues)}")
        if self.exclude:
            parts.append(f"p not in {sorted(self.exclude)}")
        if self.coprime_to is not None:
            parts.append(f"p does not divide {self.coprime_to}")
        return ", ".join(parts)


class Provenance(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    label: str
    date: Optional[str] = None


class SeriesSpec(BaseModel):
    """Summand text plus summation range."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    summand: str
    start: Union[int, str] = 0
    limit: UpperLimit = UpperLimit.INFINITY

    @field_validator("start")
    @classmethod
    def _check_start(cls, value):
        if isinstance(value, str) and value.replace(" ", "") != HALF_PRIME_START:
            raise ValueError(f"start must be an integer or {HALF_PRIME_START!r}, got {value!r}")
        if isinstance(value, int) and value < 0:
            raise ValueError("start must be nonnegative")
        return value

    @property
    def is_infinite(self) -> bool:
        return self.limit is UpperLimit.INFINITY

    def lower(self, p: Optional[int] = None) -> int:
        if isinstance(self.start, int):
            return self.start
        if p is None:
            raise ValueError("a prime is needed to resolve the start (p+1)/2")
        return (p + 1) // 2

    def upper(self, p: Optional[int] = None) -> Optional[int]:
        if self.limit is UpperLimit.INFINITY:
            return None
        if p is None:
            raise ValueError(f"a prime is needed to resolve the limit {self.limit.value}")
        return (p - 1) // 2 if self.limit is UpperLimit.HALF_PRIME else p - 1


class RecurrenceSpec(BaseModel):
    """lead(n) * a(n+1) = sum_i terms[i](n) * a(n-i), seeded by `initial`."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    initial: List[int]
    lead: str
    terms: List[str]
    description: str = ""

    @model_validator(mode="after")
    def _check_shape(self):
        if not self.terms:
            raise ValueError("a recurrence needs at least one term")
        if len(self.initial) < len(self.terms):
            raise ValueError(
                f"{len(self.terms)} recurrence terms need at least {len(self.terms)} initial values"
            )
        return self


class ConjectureRecord(BaseModel):
    """One displayed identity or congruence."""
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    id: str
    kind: RecordKind
    category: Category = Category.CONJECTURE
    series: SeriesSpec
    rhs: str
    modexp: Optional[int] = None
    prime_filter: PrimeFilter = Field(default_factory=PrimeFilter, alias="filter")
    samples: List[Dict[str, Union[str, int]]] = []
    flags: List[str] = []
    provenance: Provenance
    description: str = ""
    max_terms: Optional[int] = None

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind is RecordKind.IDENTITY:
            if not self.series.is_infinite:
                raise ValueError("identity records sum to infinity")
            if self.modexp is not None:
                raise ValueError("identity records take no modexp")
            if not isinstance(self.series.start, int):
                raise ValueError("identity records need an integer start")
        else:
            if self.series.is_infinite:
                raise ValueError("congruence records need a finite limit")
            if self.modexp is None or not 1 <= self.modexp <= 8:
                raise ValueError("congruence records need modexp in 1..8")
        for sample in self.samples:
            unknown = set(sample) - set(PARAMETER_NAMES)
            if unknown:
                raise ValueError(f"unknown sample parameters {sorted(unknown)}")
        if self.max_terms is not None and self.max_terms < 1:
            raise ValueError("max_terms must be positive")
        return self

    @property
    def gate_exempt(self) -> bool:
        return bool(GATE_EXEMPT_FLAGS.intersection(self.flags))

    def sample_points(self) -> List[Dict[str, Fraction]]:
        """Parameter bindings to verify; a single empty binding for plain records."""
        if not self.samples:
            return [{}]
        return [{name: Fraction(str(value)) for name, value in sample.items()} for sample in self.samples]

    @staticmethod
    def sample_label(sample: Dict[str, Fraction]) -> str:
        return ",".join(f"{name}={value}" for name, value in sorted(sample.items()))

    def matches(self, selector: str) -> bool:
        """`C2.1` selects C2.1, C2.1.i, C2.1.ii.a, ... but not C2.10."""
        return self.id == selector or self.id.startswith(selector + ".")


class OpenSeries(BaseModel):
    """A series without a known closed form, kept as a discovery target."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    summand: str
    start: int = 0
    basis: List[str] = []
    description: str = ""


class TemplateSpec(BaseModel):
    """Parameters of a Ramanujan-type series feeding derive_general_conjecture."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    family: int
    a: int
    b: int
    m: int
    c: str
    d: int
    provenance: Provenance
    description: str = ""
