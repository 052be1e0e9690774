"""
Certified enclosures of the named constants.

Even zeta values and odd beta values come from exact Bernoulli and Euler
numbers times a power of pi. Everything else reduces to Hurwitz zeta values at
rational arguments (Euler-Maclaurin) or to Stirling's series for log Gamma,
each with the first omitted term as remainder.
"""
import logging
import math
from fractions import Fraction

from mpmath.libmp import mpf_pi, round_nearest

from seriesverify.arith.exact import bernoulli_number, euler_number, kronecker_symbol
from seriesverify.arith.realball import RealBall, rational_upper
from seriesverify.constants.keys import ConstantKey, ConstantTag

logger = logging.getLogger(__name__)

# Bits carried above the requested precision inside the kernels
GUARD_BITS = 32

SUPPORTED_CHARACTERS = (-3, -8)


def _terms_for(prec: int) -> int:
    # Asymptotic terms kept; the matching cut-off point is twice this value
    return prec // 5 + 8


def const_pi(prec: int) -> RealBall:
    return RealBall.approx(mpf_pi(prec, round_nearest), prec)


def const_log(q, prec: int) -> RealBall:
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"log requires a positive argument, got {q}")
    if q == 1:
        return RealBall.exact(0, prec)
    return RealBall.exact(q, prec + GUARD_BITS).log().with_prec(prec)


def const_sqrt(q, prec: int) -> RealBall:
    q = Fraction(q)
    if q < 0:
        raise ValueError(f"sqrt requires a nonnegative argument, got {q}")
    return RealBall.exact(q, prec + GUARD_BITS).sqrt().with_prec(prec)


def const_golden_phi(prec: int) -> RealBall:
    return ((const_sqrt(5, prec + GUARD_BITS) + 1) / 2).with_prec(prec)


def hurwitz_zeta(s: int, a, prec: int) -> RealBall:
    """zeta(s, a) = sum_{k>=0} (k + a)^(-s) for integer s >= 2 and rational a > 0."""
    a = Fraction(a)
    if s < 2:
        raise ValueError(f"Hurwitz zeta needs s >= 2, got {s}")
    if a <= 0:
        raise ValueError(f"Hurwitz zeta needs a > 0, got {a}")

    wp = prec + GUARD_BITS
    terms = _terms_for(wp)
    cutoff = 2 * terms

    total = RealBall.exact(0, wp)
    for k in range(cutoff):
        total = total + RealBall.exact(1 / (k + a) ** s, wp)

    x = cutoff + a
    total = total + RealBall.exact(x ** (1 - s) / (s - 1) + x ** (-s) / 2, wp)

    rising = Fraction(s)  # s (s+1) ... (s+2j-2)
    for j in range(1, terms + 2):
        term = bernoulli_number(2 * j) / math.factorial(2 * j) * rising * x ** (-(s + 2 * j - 1))
        if j == terms + 1:
            # Derivatives of x^(-s) alternate in sign, so the remainder is below the next term
            total = total.widen(rational_upper(2 * term))
            break
        total = total + RealBall.exact(term, wp)
        rising *= (s + 2 * j - 1) * (s + 2 * j)

    return total.with_prec(prec)


def const_zeta(n: int, prec: int) -> RealBall:
    if n < 2:
        raise ValueError(f"zeta(n) requires n >= 2, got {n}")
    if n % 2 == 0:
        # zeta(2m) = |B_2m| 2^(2m-1) pi^(2m) / (2m)!
        coeff = abs(bernoulli_number(n)) * 2 ** (n - 1) / math.factorial(n)
        return (const_pi(prec + GUARD_BITS) ** n * coeff).with_prec(prec)
    return hurwitz_zeta(n, 1, prec)


def const_beta(n: int, prec: int) -> RealBall:
    """Dirichlet beta(n) = sum_{k>=0} (-1)^k / (2k+1)^n."""
    if n < 1:
        raise ValueError(f"beta(n) requires n >= 1, got {n}")
    wp = prec + GUARD_BITS
    if n % 2 == 1:
        m = (n - 1) // 2
        # beta(2m+1) = (-1)^m E_2m pi^(2m+1) / (4^(m+1) (2m)!)
        coeff = Fraction((-1) ** m * euler_number(2 * m), 4 ** (m + 1) * math.factorial(2 * m))
        return (const_pi(wp) ** n * coeff).with_prec(prec)
    value = hurwitz_zeta(n, Fraction(1, 4), wp) - hurwitz_zeta(n, Fraction(3, 4), wp)
    return (value / 4 ** n).with_prec(prec)


def const_dirichlet_l(character: int, prec: int, s: int = 2) -> RealBall:
    """L(s, (character/.)) by splitting the sum over residue classes."""
    if character not in SUPPORTED_CHARACTERS:
        raise ValueError(f"unsupported character {character}; expected one of {SUPPORTED_CHARACTERS}")
    modulus = abs(character)
    wp = prec + GUARD_BITS
    total = RealBall.exact(0, wp)
    for r in range(1, modulus):
        chi = kronecker_symbol(character, r)
        if chi:
            total = total + hurwitz_zeta(s, Fraction(r, modulus), wp) * chi
    return (total / modulus ** s).with_prec(prec)


def log_gamma_stirling(z, prec: int) -> RealBall:
    """log Gamma(z) for rational z large enough for Stirling's series at `prec`."""
    z = Fraction(z)
    terms = _terms_for(prec)
    log_z = RealBall.exact(z, prec).log()
    two_pi = const_pi(prec) * 2
    value = log_z * (z - Fraction(1, 2)) - z + two_pi.log() / 2
    for j in range(1, terms + 2):
        term = bernoulli_number(2 * j) / (2 * j * (2 * j - 1) * z ** (2 * j - 1))
        if j == terms + 1:
            return value.widen(rational_upper(2 * term))
        value = value + RealBall.exact(term, prec)
    return value


def const_gamma_rational(x, prec: int) -> RealBall:
    """Gamma(x) for rational 0 < x < 1, shifting the argument before Stirling."""
    x = Fraction(x)
    if not 0 < x < 1:
        raise ValueError(f"Gamma kernel expects 0 < x < 1, got {x}")
    wp = prec + GUARD_BITS
    shift = 2 * _terms_for(wp)
    product = Fraction(1)
    for k in range(shift):
        product *= x + k
    # Gamma(x) = Gamma(x + shift) / (x (x+1) ... (x+shift-1))
    value = log_gamma_stirling(x + shift, wp).exp() / product
    return value.with_prec(prec)


def evaluate_key(key: ConstantKey, prec: int) -> RealBall:
    """Compute the enclosure for a constant key, bypassing any cache."""
    tag = key.tag
    arg = key.params[0] if key.params else None
    logger.debug(f"Computing {key.text} at {prec} bits")
    if tag is ConstantTag.PI:
        return const_pi(prec)
    if tag is ConstantTag.LOG_Q:
        return const_log(arg, prec)
    if tag is ConstantTag.SQRT_Q:
        return const_sqrt(arg, prec)
    if tag is ConstantTag.ZETA:
        return const_zeta(int(arg), prec)
    if tag is ConstantTag.BETA:
        return const_beta(int(arg), prec)
    if tag is ConstantTag.CATALAN:
        return const_beta(2, prec)
    if tag is ConstantTag.K3:
        return const_dirichlet_l(-3, prec)
    if tag is ConstantTag.L8:
        return const_dirichlet_l(-8, prec)
    if tag is ConstantTag.GAMMA_RAT:
        return const_gamma_rational(arg, prec)
    if tag is ConstantTag.GOLDEN_PHI:
        return const_golden_phi(prec)
    raise ValueError(f"no kernel for constant {key.text}")
