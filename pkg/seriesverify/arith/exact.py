"""Exact rational arithmetic helpers shared by both engines."""
import logging
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from sympy import bernoulli as _sympy_bernoulli
from sympy import sieve

logger = logging.getLogger(__name__)

Rational = Fraction

# Prefix sums H_0..H_n per order, grown on demand
_HARMONIC_TABLES: Dict[int, List[Fraction]] = {}
_HARMONIC_LOCK = threading.Lock()


def harmonic(n: int, m: int = 1) -> Fraction:
    """Return H_n^(m) = sum_{0<k<=n} k^(-m) exactly."""
    if n < 0:
        raise ValueError(f"harmonic index must be nonnegative, got {n}")
    if m < 1:
        raise ValueError(f"harmonic order must be >= 1, got {m}")
    with _HARMONIC_LOCK:
        table = _HARMONIC_TABLES.setdefault(m, [Fraction(0)])
        while len(table) <= n:
            j = len(table)
            table.append(table[-1] + Fraction(1, j ** m))
        return table[n]


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient, zero outside 0 <= k <= n."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def split_valuation(n: int, p: int) -> Tuple[int, int]:
    """Return (v_p(n), n / p^v_p(n)) for a nonzero integer n."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    return split_valuation(x.numerator, p)[0] - split_valuation(x.denominator, p)[0]


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n), the standard extension of the Jacobi symbol."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result

    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 == 1 and a % 8 in (3, 5):
            result = -result

    # Jacobi symbol for odd positive n
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Exact B_n with the x/(e^x - 1) convention (B_1 = -1/2)."""
    if n < 0:
        raise ValueError(f"Bernoulli index must be nonnegative, got {n}")
    if n == 1:
        return Fraction(-1, 2)
    if n % 2 == 1:
        return Fraction(0)
    value = _sympy_bernoulli(n)
    return Fraction(int(value.p), int(value.q))


@lru_cache(maxsize=None)
def euler_number(n: int) -> int:
    """Exact Euler number E_n from sum_k C(2m,2k) E_2k = 0."""
    if n < 0:
        raise ValueError(f"Euler index must be nonnegative, got {n}")
    if n % 2 == 1:
        return 0
    half = n // 2
    return -sum(math.comb(n, 2 * k) * euler_number(2 * k) for k in range(half)) if half else 1


def primes_between(lo: int, hi: int) -> List[int]:
    """Primes p with lo <= p <= hi from a deterministic sieve."""
    if hi < 2 or hi < lo:
        return []
    return [int(p) for p in sieve.primerange(max(lo, 2), hi + 1)]
