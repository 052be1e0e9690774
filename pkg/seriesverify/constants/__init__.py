from seriesverify.constants.cache import ConstantCache, configure_constant_cache, get_constant, get_constant_cache
from seriesverify.constants.kernels import (
    const_beta,
    const_dirichlet_l,
    const_gamma_rational,
    const_golden_phi,
    const_log,
    const_pi,
    const_sqrt,
    const_zeta,
    evaluate_key,
    hurwitz_zeta,
)
from seriesverify.constants.keys import ConstantKey, ConstantTag

__all__ = [
    "ConstantCache", "configure_constant_cache", "get_constant", "get_constant_cache",
    "const_beta", "const_dirichlet_l", "const_gamma_rational", "const_golden_phi", "const_log",
    "const_pi", "const_sqrt", "const_zeta", "evaluate_key", "hurwitz_zeta",
    "ConstantKey", "ConstantTag",
]
