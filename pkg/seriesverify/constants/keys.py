"""Canonical identifiers for the named constants."""
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Tuple


class ConstantTag(str, Enum):
    PI = "Pi"
    LOG_Q = "LogQ"
    ZETA = "Zeta"
    BETA = "Beta"
    CATALAN = "Catalan"
    K3 = "K3"
    L8 = "L8"
    GAMMA_RAT = "GammaRat"
    SQRT_Q = "SqrtQ"
    GOLDEN_PHI = "GoldenPhi"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ConstantKey:
    tag: ConstantTag
    params: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(Fraction(x) for x in self.params))
        tag, params = self.tag, self.params
        if tag in (ConstantTag.ZETA, ConstantTag.BETA):
            if len(params) != 1 or params[0].denominator != 1:
                raise ValueError(f"{tag.value} takes one integer argument")
            lowest = 2 if tag is ConstantTag.ZETA else 1
            if params[0] < lowest:
                raise ValueError(f"{tag.value}({_fmt(params[0])}) requires argument >= {lowest}")
        elif tag is ConstantTag.GAMMA_RAT:
            if len(params) != 1 or not 0 < params[0] < 1:
                raise ValueError("GammaRat requires a rational argument in (0, 1)")
        elif tag in (ConstantTag.LOG_Q, ConstantTag.SQRT_Q):
            if len(params) != 1 or params[0] <= 0:
                raise ValueError(f"{tag.value} requires a positive rational argument")
        elif params:
            raise ValueError(f"{tag.value} takes no arguments")

    @property
    def text(self) -> str:
        """Canonical serialization used as the cache key."""
        if not self.params:
            return self.tag.value
        return f"{self.tag.value}({','.join(_fmt(x) for x in self.params)})"

    def __str__(self) -> str:
        return self.text

    @classmethod
    def parse(cls, text: str) -> "ConstantKey":
        match = re.fullmatch(r"\s*([A-Za-z0-9]+)\s*(?:\(([^)]*)\))?\s*", text)
        if not match:
            raise ValueError(f"not a constant key: {text!r}")
        tag = ConstantTag(match.group(1))
        args = match.group(2)
        params = tuple(Fraction(a.strip()) for a in args.split(",")) if args else ()
        return cls(tag, params)


PI = ConstantKey(ConstantTag.PI)
CATALAN = ConstantKey(ConstantTag.CATALAN)
K3 = ConstantKey(ConstantTag.K3)
L8 = ConstantKey(ConstantTag.L8)
GOLDEN_PHI = ConstantKey(ConstantTag.GOLDEN_PHI)


def zeta(n: int) -> ConstantKey:
    return ConstantKey(ConstantTag.ZETA, (n,))


def beta(n: int) -> ConstantKey:
    return ConstantKey(ConstantTag.BETA, (n,))


def log_q(q) -> ConstantKey:
    return ConstantKey(ConstantTag.LOG_Q, (q,))


def sqrt_q(q) -> ConstantKey:
    return ConstantKey(ConstantTag.SQRT_Q, (q,))


def gamma_rat(x) -> ConstantKey:
    return ConstantKey(ConstantTag.GAMMA_RAT, (x,))
