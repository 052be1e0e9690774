"""
Midpoint-radius real balls on top of mpmath's raw binary floats.

Midpoints are rounded to nearest at the working precision; every rounding
error is pushed into the radius, which is kept at RAD_PREC bits and always
rounded upward.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

import mpmath
from mpmath.libmp import (
    fone,
    from_int,
    from_rational,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_div,
    mpf_exp,
    mpf_gt,
    mpf_le,
    mpf_log,
    mpf_lt,
    mpf_mul,
    mpf_neg,
    mpf_pos,
    mpf_shift,
    mpf_sqrt,
    mpf_sub,
    round_ceiling,
    round_floor,
    round_nearest,
    to_str,
)

from seriesverify.exceptions import BallDomainError

RAD_PREC = 64

Scalar = Union[int, Fraction]


class Verdict(str, Enum):
    CERTIFIED_EQUAL = "CertifiedEqual"
    CERTIFIED_DISTINCT = "CertifiedDistinct"
    INCONCLUSIVE = "Inconclusive"


def working_prec(digits: int) -> int:
    """Bits needed for `digits` decimal digits plus 64 guard bits."""
    return math.ceil(3.33 * digits) + 64


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x
    if not man:
        return Fraction(0)
    value = Fraction(man) * (Fraction(2) ** exp)
    return -value if sign else value


def _up_add(a, b):
    return mpf_add(a, b, RAD_PREC, round_ceiling)


def _up_mul(a, b):
    return mpf_mul(a, b, RAD_PREC, round_ceiling)


def _up(a):
    return mpf_pos(a, RAD_PREC, round_ceiling)


def _rounding_error(mid, prec: int):
    """Bound on |exact - mid| after one round-to-nearest at `prec` bits."""
    return _up(mpf_shift(mpf_abs(mid), 1 - prec))


def _transcendental_error(mid, prec: int):
    """Bound for mpmath elementary functions: a few ulps plus a tiny absolute term."""
    return _up_add(mpf_shift(mpf_abs(mid), 4 - prec), mpf_shift(fone, -prec))


@dataclass(frozen=True)
class RealBall:
    """Interval [mid - rad, mid + rad] containing the true value."""
    mid: tuple
    rad: tuple
    prec: int

    @classmethod
    def exact(cls, value: Scalar, prec: int) -> "RealBall":
        value = Fraction(value)
        if value.denominator == 1:
            mid = from_int(value.numerator, prec, round_nearest)
            err = fzero if value.numerator.bit_length() <= prec else _rounding_error(mid, prec)
            return cls(mid, err, prec)
        mid = from_rational(value.numerator, value.denominator, prec, round_nearest)
        return cls(mid, _rounding_error(mid, prec), prec)

    from_rational = exact

    @classmethod
    def approx(cls, mid, prec: int) -> "RealBall":
        """Wrap an mpmath elementary-function result computed at `prec`."""
        return cls(mid, _transcendental_error(mid, prec), prec)

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction, prec: int) -> "RealBall":
        """Smallest convenient ball containing [lo, hi]."""
        centre = cls.exact((Fraction(lo) + Fraction(hi)) / 2, prec)
        half = (Fraction(hi) - Fraction(lo)) / 2
        spread = from_rational(half.numerator, half.denominator, RAD_PREC, round_ceiling)
        return cls(centre.mid, _up_add(centre.rad, spread), prec)

    def _coerce(self, other) -> "RealBall":
        if isinstance(other, RealBall):
            return other
        if isinstance(other, (int, Fraction)):
            return RealBall.exact(other, self.prec)
        return NotImplemented

    # arithmetic

    def __add__(self, other) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.prec, other.prec)
        mid = mpf_add(self.mid, other.mid, prec, round_nearest)
        rad = _up_add(_up_add(self.rad, other.rad), _rounding_error(mid, prec))
        return RealBall(mid, rad, prec)

    __radd__ = __add__

    def __neg__(self) -> "RealBall":
        return RealBall(mpf_neg(self.mid), self.rad, self.prec)

    def __sub__(self, other) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "RealBall":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.prec, other.prec)
        mid = mpf_mul(self.mid, other.mid, prec, round_nearest)
        rad = _up_add(
            _up_add(_up_mul(mpf_abs(self.mid), other.rad), _up_mul(mpf_abs(other.mid), self.rad)),
            _up_add(_up_mul(self.rad, other.rad), _rounding_error(mid, prec)),
        )
        return RealBall(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.contains_zero():
            raise BallDomainError(f"division by a ball containing zero: {other}")
        prec = max(self.prec, other.prec)
        mid = mpf_div(self.mid, other.mid, prec, round_nearest)
        # |a/b - am/bm| <= (|am| rb + |bm| ra) / (|bm| (|bm| - rb))
        bm = mpf_abs(other.mid)
        num = _up_add(_up_mul(mpf_abs(self.mid), other.rad), _up_mul(bm, self.rad))
        gap = mpf_sub(bm, other.rad, RAD_PREC, round_floor)
        den = mpf_mul(bm, gap, RAD_PREC, round_floor)
        rad = _up_add(mpf_div(num, den, RAD_PREC, round_ceiling), _rounding_error(mid, prec))
        return RealBall(mid, rad, prec)

    def __rtruediv__(self, other) -> "RealBall":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "RealBall":
        if not isinstance(n, int):
            raise TypeError("RealBall powers must be integers; use exp/log for others")
        if n < 0:
            return RealBall.exact(1, self.prec) / (self ** (-n))
        result = RealBall.exact(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def sqrt(self) -> "RealBall":
        upper = self.upper()
        if mpf_lt(upper, fzero):
            raise BallDomainError(f"sqrt of a strictly negative ball: {self}")
        lower = self.lower()
        if mpf_le(lower, fzero):
            top = mpf_sqrt(upper, self.prec, round_ceiling)
            half = mpf_shift(top, -1)
            return RealBall(half, _up(half), self.prec)
        mid = mpf_sqrt(self.mid, self.prec, round_nearest)
        spread = mpf_div(self.rad, mpf_sqrt(lower, RAD_PREC, round_floor), RAD_PREC, round_ceiling)
        return RealBall(mid, _up_add(spread, _rounding_error(mid, self.prec)), self.prec)

    def exp(self) -> "RealBall":
        mid = mpf_exp(self.mid, self.prec, round_nearest)
        rad = _transcendental_error(mid, self.prec)
        if self.rad != fzero:
            # e^am (e^ar - 1) <= e^(am + ar) * ar
            top = mpf_exp(mpf_add(self.mid, self.rad, RAD_PREC, round_ceiling), RAD_PREC, round_ceiling)
            rad = _up_add(rad, _up_mul(mpf_shift(top, 1), self.rad))
        return RealBall(mid, rad, self.prec)

    def log(self) -> "RealBall":
        lower = self.lower()
        if mpf_le(lower, fzero):
            raise BallDomainError(f"log of a ball that is not strictly positive: {self}")
        mid = mpf_log(self.mid, self.prec, round_nearest)
        rad = _transcendental_error(mid, self.prec)
        if self.rad != fzero:
            rad = _up_add(rad, mpf_div(self.rad, lower, RAD_PREC, round_ceiling))
        return RealBall(mid, rad, self.prec)

    def root(self, n: int) -> "RealBall":
        """Real n-th root of a positive ball."""
        if n == 2:
            return self.sqrt()
        return (self.log() / n).exp()

    # inspection

    def lower(self):
        return mpf_sub(self.mid, self.rad, self.prec + RAD_PREC, round_floor)

    def upper(self):
        return mpf_add(self.mid, self.rad, self.prec + RAD_PREC, round_ceiling)

    def contains_zero(self) -> bool:
        return mpf_le(mpf_abs(self.mid), self.rad)

    def contains(self, value: Scalar) -> bool:
        centre = mpf_to_fraction(self.mid)
        spread = mpf_to_fraction(self.rad)
        return centre - spread <= Fraction(value) <= centre + spread

    def contains_ball(self, other: "RealBall") -> bool:
        centre, spread = mpf_to_fraction(self.mid), mpf_to_fraction(self.rad)
        o_centre, o_spread = mpf_to_fraction(other.mid), mpf_to_fraction(other.rad)
        return centre - spread <= o_centre - o_spread and o_centre + o_spread <= centre + spread

    def overlaps(self, other: "RealBall") -> bool:
        gap = mpf_abs(mpf_sub(self.mid, other.mid))
        return mpf_le(gap, _up_add(self.rad, other.rad))

    def abs_upper(self):
        """Upper bound on |x| for x in the ball."""
        return _up_add(mpf_abs(self.mid), self.rad)

    @property
    def midpoint(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self.mid)

    @property
    def radius(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self.rad)

    def with_prec(self, prec: int) -> "RealBall":
        return RealBall(self.mid, self.rad, prec)

    def widen(self, extra) -> "RealBall":
        """Add a nonnegative binary float to the radius."""
        return RealBall(self.mid, _up_add(self.rad, mpf_abs(extra)), self.prec)

    def to_str(self, digits: int = 20) -> str:
        return f"{to_str(self.mid, digits)} +/- {to_str(self.rad, 3)}"

    def __str__(self) -> str:
        return self.to_str()


def difference_bound(a: RealBall, b: RealBall):
    """Upper bound on |x - y| over x in a, y in b."""
    gap = mpf_abs(mpf_sub(a.mid, b.mid))
    return _up_add(gap, _up_add(a.rad, b.rad))


def ball_compare(a: RealBall, b: RealBall, digits: int) -> Verdict:
    """Judge two enclosures at a tolerance of 10^-digits."""
    gap = mpf_abs(mpf_sub(a.mid, b.mid))
    spread = _up_add(a.rad, b.rad)
    threshold = from_rational(1, 10 ** digits, RAD_PREC, round_floor)
    if mpf_lt(_up_add(gap, spread), threshold):
        return Verdict.CERTIFIED_EQUAL
    if mpf_gt(gap, spread):
        return Verdict.CERTIFIED_DISTINCT
    return Verdict.INCONCLUSIVE


def rational_upper(value: Scalar):
    """|value| rounded up to a radius-precision binary float."""
    value = abs(Fraction(value))
    return from_rational(value.numerator, value.denominator, RAD_PREC, round_ceiling)
