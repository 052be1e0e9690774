from typing import Optional


class SeriesVerifyError(Exception):
    """Base class for every error raised by the verifier."""


class ExprSyntaxError(SeriesVerifyError):
    """DSL text could not be parsed or normalized."""

    def __init__(self, message: str, position: Optional[int] = None, text: Optional[str] = None):
        self.message = message
        self.position = position
        self.text = text
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}" + (f" in {text!r}" if text else ""))


class RegistryError(SeriesVerifyError):
    """Registry file is malformed or a record fails validation."""

    def __init__(self, message: str, record_id: Optional[str] = None):
        self.record_id = record_id
        prefix = f"[{record_id}] " if record_id else ""
        super().__init__(f"{prefix}{message}")


class SummandEvaluationError(SeriesVerifyError):
    """A summand is malformed at a particular index (zero divisor, negative H index)."""


class NotRationalError(SeriesVerifyError):
    """An exact evaluation met an irrational constant."""


class PrecisionExhaustedError(SeriesVerifyError):
    """A ModPK operation lost the ability to determine its value mod p^e."""


class AtomUndefinedError(SeriesVerifyError):
    """A congruence atom is undefined at the given prime (e.g. p | a in q_p(a))."""


class BallDomainError(SeriesVerifyError):
    """A ball operation was applied outside its domain."""


class InsufficientPrecisionError(SeriesVerifyError):
    """Inputs to PSLQ are not accurate enough for the requested tolerance."""


class StrategyMismatchError(SeriesVerifyError):
    """Exact and fast congruence strategies disagree."""


class UnknownRecordError(RegistryError):
    """A selector or id names nothing in the registry."""
