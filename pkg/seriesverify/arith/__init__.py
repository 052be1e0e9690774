from seriesverify.arith.exact import (
    binomial,
    bernoulli_number,
    euler_number,
    harmonic,
    kronecker_symbol,
    primes_between,
    valuation,
)
from seriesverify.arith.modpk import (
    FactorialTable,
    ModPK,
    PrimeCtx,
    bernoulli_mod,
    bernoulli_poly_mod,
    euler_mod,
    euler_poly_mod,
    fermat_quotient,
    prime_context,
    reduce_mod,
)
from seriesverify.arith.realball import RealBall, Verdict, ball_compare, working_prec

__all__ = [
    "binomial", "bernoulli_number", "euler_number", "harmonic", "kronecker_symbol",
    "primes_between", "valuation", "FactorialTable", "ModPK", "PrimeCtx", "bernoulli_mod",
    "bernoulli_poly_mod", "euler_mod", "euler_poly_mod", "fermat_quotient", "prime_context",
    "reduce_mod", "RealBall", "Verdict", "ball_compare", "working_prec",
]
