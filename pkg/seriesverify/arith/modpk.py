"""Valuated residues modulo prime powers and the per-prime Bernoulli/Euler caches."""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Union

from seriesverify.arith.exact import bernoulli_number, euler_number, split_valuation
from seriesverify.exceptions import AtomUndefinedError, PrecisionExhaustedError, SeriesVerifyError

logger = logging.getLogger(__name__)

DEFAULT_GUARD = 8

Number = Union[int, Fraction, "ModPK"]


@dataclass(frozen=True, eq=False)
class ModPK:
    """
    A p-adic number p^v * u known to absolute precision v + r.

    `u` is a unit modulo p^r. The zero element has u = 0, r = 0 and stores its
    absolute precision in `v` (the value is known to be 0 mod p^v). Comparisons
    and `residue()` work modulo p^e.
    """
    p: int
    e: int
    v: int
    u: int
    r: int

    @classmethod
    def zero(cls, p: int, e: int, absprec: int) -> "ModPK":
        return cls(p, e, absprec, 0, 0)

    @classmethod
    def from_parts(cls, p: int, e: int, v: int, u: int, r: int = None) -> "ModPK":
        """Build p^v * u; `u` must be coprime to p."""
        if r is None:
            r = e + DEFAULT_GUARD
        if u % p == 0:
            raise ValueError(f"unit part {u} is divisible by {p}")
        return cls(p, e, v, u % p ** r, r)

    @classmethod
    def from_residue(cls, x: int, p: int, e: int, precision: int) -> "ModPK":
        """Wrap an integer known modulo p^precision."""
        x %= p ** precision
        if x == 0:
            return cls.zero(p, e, precision)
        w, unit = split_valuation(x, p)
        return cls(p, e, w, unit % p ** (precision - w), precision - w)

    @property
    def is_zero(self) -> bool:
        return self.u == 0

    @property
    def absprec(self) -> int:
        return self.v + self.r

    @property
    def unit(self) -> int:
        """Unit part reduced mod p^e (0 for zero)."""
        if self.is_zero:
            return 0
        return self.u % self.p ** min(self.e, self.r)

    def residue(self) -> int:
        """Value mod p^e as an integer in [0, p^e); requires a p-integral value."""
        if self.is_zero or self.v >= self.e:
            return 0
        if self.v < 0:
            raise ValueError(f"value has negative valuation {self.v} at p={self.p}")
        return (self.p ** self.v * self.u) % self.p ** self.e

    def _checked(self, result: "ModPK") -> "ModPK":
        if result.absprec < self.e:
            raise PrecisionExhaustedError(
                f"ModPK at p={self.p} known only mod p^{result.absprec}, need p^{self.e}"
            )
        return result

    def _coerce(self, other: Number) -> "ModPK":
        if isinstance(other, ModPK):
            if (other.p, other.e) != (self.p, self.e):
                raise ValueError(
                    f"mixing ModPK at (p={self.p}, e={self.e}) and (p={other.p}, e={other.e})"
                )
            return other
        return reduce_mod(Fraction(other), self.p, self.e)

    def __add__(self, other: Number) -> "ModPK":
        other = self._coerce(other)
        p = self.p
        absprec = min(self.absprec, other.absprec)
        lo = min(self.v, other.v)
        width = absprec - lo
        if width <= 0:
            return self._checked(ModPK.zero(p, self.e, absprec))
        total = (self.u * p ** (self.v - lo) + other.u * p ** (other.v - lo)) % p ** width
        if total == 0:
            return self._checked(ModPK.zero(p, self.e, absprec))
        w, unit = split_valuation(total, p)
        return self._checked(ModPK(p, self.e, lo + w, unit, width - w))

    __radd__ = __add__

    def __neg__(self) -> "ModPK":
        if self.is_zero:
            return self
        return ModPK(self.p, self.e, self.v, (-self.u) % self.p ** self.r, self.r)

    def __sub__(self, other: Number) -> "ModPK":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Number) -> "ModPK":
        return self._coerce(other) - self

    def __mul__(self, other: Number) -> "ModPK":
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            left = self.absprec if self.is_zero else self.v
            right = other.absprec if other.is_zero else other.v
            return self._checked(ModPK.zero(self.p, self.e, left + right))
        r = min(self.r, other.r)
        u = (self.u * other.u) % self.p ** r
        return self._checked(ModPK(self.p, self.e, self.v + other.v, u, r))

    __rmul__ = __mul__

    def inverse(self) -> "ModPK":
        if self.is_zero:
            raise ZeroDivisionError(f"inverse of a ModPK zero at p={self.p}")
        return self._checked(
            ModPK(self.p, self.e, -self.v, pow(self.u, -1, self.p ** self.r), self.r)
        )

    def __truediv__(self, other: Number) -> "ModPK":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> "ModPK":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "ModPK":
        if n == 0:
            return ModPK(self.p, self.e, 0, 1, self.e + DEFAULT_GUARD)
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_zero:
            return self._checked(ModPK.zero(self.p, self.e, self.absprec * n))
        u = pow(self.u, n, self.p ** self.r)
        return self._checked(ModPK(self.p, self.e, self.v * n, u, self.r))

    def congruent(self, other: Number) -> bool:
        """True iff the two values agree modulo p^e."""
        diff = self - self._coerce(other)
        return diff.is_zero or diff.v >= self.e

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (ModPK, int, Fraction)):
            return NotImplemented
        return self.congruent(other)

    __hash__ = None

    def __repr__(self) -> str:
        if self.is_zero:
            return f"ModPK(p={self.p}, e={self.e}, zero mod p^{self.v})"
        return f"ModPK(p={self.p}, e={self.e}, v={self.v}, u={self.unit})"

    def describe(self) -> str:
        """Short text for reports: residue when p-integral, else p^v*u."""
        if self.is_zero:
            return f"0 (mod {self.p}^{self.e})"
        if self.v >= 0:
            return f"{self.residue()} (mod {self.p}^{self.e})"
        return f"{self.p}^{self.v}*{self.unit} (mod {self.p}^{self.e})"


def reduce_mod(r, p: int, e: int, guard: int = DEFAULT_GUARD) -> ModPK:
    """Reduce an exact rational to a valuated residue with e + guard digits of unit."""
    r = Fraction(r)
    precision = e + guard
    if r == 0:
        return ModPK.zero(p, e, precision)
    vn, num = split_valuation(r.numerator, p)
    vd, den = split_valuation(r.denominator, p)
    modulus = p ** precision
    return ModPK(p, e, vn - vd, num * pow(den, -1, modulus) % modulus, precision)


class PrimeCtx:
    """Per-prime caches: small inverses, Bernoulli and Euler residues mod p^(e+guard)."""

    def __init__(self, p: int, e: int, guard: int = DEFAULT_GUARD):
        if p < 3:
            raise ValueError(f"PrimeCtx requires an odd prime, got {p}")
        self.p = p
        self.e = e
        self.guard = guard
        self.precision = e + guard
        self.modulus = p ** self.precision
        self.inverses = [0] + [pow(i, -1, self.modulus) for i in range(1, p)]
        self._bernoulli = self._bernoulli_residues()
        self._euler = self._euler_residues()

    def _bernoulli_residues(self) -> List[int]:
        M = self.modulus
        top = max(self.p - 3, 1)
        residues = [1]
        row = [1, 1]
        for n in range(1, top + 1):
            # row becomes C(n+1, .)
            row = [1] + [(row[i - 1] + row[i]) % M for i in range(1, len(row))] + [1]
            if n > 1 and n % 2 == 1:
                residues.append(0)
                continue
            s = sum(row[k] * residues[k] for k in range(n)) % M
            residues.append((-s * self.inverses[n + 1]) % M)
        return residues

    def _euler_residues(self) -> List[int]:
        M = self.modulus
        residues = [0] * self.p
        residues[0] = 1
        row = [1]
        for m in range(1, self.p):
            row = [1] + [(row[i - 1] + row[i]) % M for i in range(1, len(row))] + [1]
            if m % 2 == 0:
                s = sum(row[2 * j] * residues[2 * j] for j in range(m // 2)) % M
                residues[m] = -s % M
        return residues

    def wrap(self, x: int) -> ModPK:
        return ModPK.from_residue(x, self.p, self.e, self.precision)

    def bernoulli_residue(self, n: int) -> int:
        if n < 0 or n > self.p - 2:
            raise ValueError(
                f"B_{n} is outside the von Staudt-Clausen-safe range n <= p-2 for p={self.p}"
            )
        if n > 1 and n % 2 == 1:
            return 0
        return self._bernoulli[n]

    def euler_residue(self, n: int) -> int:
        if n < 0 or n > self.p - 1:
            raise ValueError(f"E_{n} is outside the cached range n <= p-1 for p={self.p}")
        return self._euler[n]

    def rational_residue(self, x: Fraction) -> int:
        """Residue of a p-integral rational modulo p^(e+guard)."""
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise AtomUndefinedError(f"{self.p} divides the denominator of {x}")
        return x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus

    def self_check(self, indices=(0, 2, 4)) -> bool:
        """Spot re-derivation of cached values against exact numbers."""
        for n in indices:
            if n <= self.p - 3 and self._bernoulli[n] != self.rational_residue(bernoulli_number(n)):
                logger.error(f"Bernoulli cache mismatch at n={n}, p={self.p}")
                return False
            if n <= self.p - 1 and self._euler[n] != euler_number(n) % self.modulus:
                logger.error(f"Euler cache mismatch at n={n}, p={self.p}")
                return False
        return True


@lru_cache(maxsize=256)
def prime_context(p: int, e: int, guard: int = DEFAULT_GUARD) -> PrimeCtx:
    """Shared read-only PrimeCtx per (p, e, guard)."""
    logger.debug(f"Building prime context for p={p}, e={e}")
    ctx = PrimeCtx(p, e, guard)
    if logger.isEnabledFor(logging.DEBUG) and not ctx.self_check():
        raise SeriesVerifyError(f"Bernoulli/Euler residue cache failed its self-check at p={p}")
    return ctx


def bernoulli_mod(n: int, ctx: PrimeCtx) -> ModPK:
    return ctx.wrap(ctx.bernoulli_residue(n))


def euler_mod(n: int, ctx: PrimeCtx) -> ModPK:
    return ctx.wrap(ctx.euler_residue(n))


def bernoulli_poly_mod(n: int, x, ctx: PrimeCtx) -> ModPK:
    """B_n(x) = sum_k C(n,k) B_k x^(n-k) modulo p^(e+guard)."""
    if n < 0 or n > ctx.p - 2:
        raise AtomUndefinedError(f"B_{n}(x) needs n <= p-2 at p={ctx.p}")
    xr = ctx.rational_residue(Fraction(x))
    M = ctx.modulus
    total = sum(math.comb(n, k) * ctx.bernoulli_residue(k) * pow(xr, n - k, M) for k in range(n + 1))
    return ctx.wrap(total % M)


def euler_poly_mod(n: int, x, ctx: PrimeCtx) -> ModPK:
    """E_n(x) = sum_k C(n,k) (E_k / 2^k) (x - 1/2)^(n-k) modulo p^(e+guard)."""
    if n < 0 or n > ctx.p - 1:
        raise AtomUndefinedError(f"E_{n}(x) needs n <= p-1 at p={ctx.p}")
    M = ctx.modulus
    shifted = ctx.rational_residue(Fraction(x) - Fraction(1, 2))
    half = ctx.inverses[2] if ctx.p > 2 else pow(2, -1, M)
    total = sum(
        math.comb(n, k) * ctx.euler_residue(k) * pow(half, k, M) * pow(shifted, n - k, M)
        for k in range(n + 1)
    )
    return ctx.wrap(total % M)


def fermat_quotient(a: int, p: int, e: int, guard: int = DEFAULT_GUARD) -> ModPK:
    """q_p(a) = (a^(p-1) - 1)/p, from a^(p-1) mod p^(e+guard+1)."""
    if a % p == 0:
        raise AtomUndefinedError(f"Fermat quotient q_{p}({a}) undefined: {p} divides {a}")
    precision = e + guard
    modulus = p ** (precision + 1)
    power = pow(a % modulus, p - 1, modulus)
    return ModPK.from_residue((power - 1) // p, p, e, precision)


class FactorialTable:
    """Unit parts and valuations of n! modulo p^precision, for valuated binomials."""

    def __init__(self, p: int, e: int, size: int, guard: int = DEFAULT_GUARD):
        self.p = p
        self.e = e
        self.precision = e + guard
        self.modulus = p ** self.precision
        self.units = [1] * (size + 1)
        self.valuations = [0] * (size + 1)
        for i in range(1, size + 1):
            j, c = i, 0
            while j % p == 0:
                j //= p
                c += 1
            self.units[i] = self.units[i - 1] * j % self.modulus
            self.valuations[i] = self.valuations[i - 1] + c
        self._inverse_units = {}

    def _inverse_unit(self, n: int) -> int:
        inv = self._inverse_units.get(n)
        if inv is None:
            inv = pow(self.units[n], -1, self.modulus)
            self._inverse_units[n] = inv
        return inv

    def binomial(self, n: int, k: int) -> ModPK:
        if k < 0 or k > n:
            return ModPK.zero(self.p, self.e, self.precision)
        v = self.valuations[n] - self.valuations[k] - self.valuations[n - k]
        u = self.units[n] * self._inverse_unit(k) * self._inverse_unit(n - k) % self.modulus
        return ModPK(self.p, self.e, v, u, self.precision)
