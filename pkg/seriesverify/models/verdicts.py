"""Outcome objects produced by the engines."""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from seriesverify.arith.modpk import ModPK
from seriesverify.arith.realball import RealBall, Verdict


class SeriesStatus(str, Enum):
    CONVERGED = "Converged"
    TAIL_CAP_HIT = "TailCapHit"


class Strategy(str, Enum):
    EXACT = "ExactRational"
    FAST = "ModPKFast"


@dataclass(frozen=True)
class SeriesEnclosure:
    """value.rad already includes tail_bound; tail_bound is a raw binary float."""
    value: RealBall
    terms_used: int
    tail_bound: tuple
    status: SeriesStatus
    method: str = "direct"  # "direct" or "euler" for alternating series with ratio near -1

    @property
    def converged(self) -> bool:
        return self.status is SeriesStatus.CONVERGED


@dataclass
class IdentityVerdict:
    record_id: str
    digits: int
    verdict: Verdict
    sample: str = ""
    lhs: Optional[RealBall] = None
    rhs: Optional[RealBall] = None
    bound: Optional[tuple] = None  # upper bound on |LHS - RHS| as a raw binary float
    terms_used: int = 0
    status: Optional[SeriesStatus] = None
    prec: int = 0
    elapsed: float = 0.0
    reason: str = ""
    flags: List[str] = field(default_factory=list)


@dataclass
class CongruenceVerdict:
    record_id: str
    prime: int
    modexp: int
    holds: Optional[bool]  # None when the prime was skipped
    sample: str = ""
    lhs: Optional[ModPK] = None
    rhs: Optional[ModPK] = None
    strategy: Optional[Strategy] = None
    elapsed: float = 0.0
    reason: str = ""
    flags: List[str] = field(default_factory=list)

    @property
    def skipped(self) -> bool:
        return self.holds is None


@dataclass(frozen=True)
class RelationResult:
    """Integer relation sum c_i x_i ~ 0, or coefficients None when PSLQ found nothing."""
    coefficients: Optional[List[int]]
    residual: Optional[tuple]  # upper bound on |sum c_i x_i| as a raw binary float
    prec: int
    digits: int

    @property
    def found(self) -> bool:
        return self.coefficients is not None


@dataclass(frozen=True)
class Candidate:
    """A closed form proposed by discovery; never a claim of truth."""
    target: str
    expression: Optional[str]
    relation: RelationResult
    basis: List[str]
    margin: float = 0.0
    label: str = "candidate"
