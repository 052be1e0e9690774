from seriesverify.services.congruence_engine import eval_congruence_rhs, finite_sum_mod, verify_congruence
from seriesverify.services.discovery_service import discover_closed_form, pslq
from seriesverify.services.series_engine import partial_sum, sum_to_tolerance, verify_identity
from seriesverify.services.verification_service import VerificationService, exit_code

__all__ = [
    "eval_congruence_rhs", "finite_sum_mod", "verify_congruence", "discover_closed_form", "pslq",
    "partial_sum", "sum_to_tolerance", "verify_identity", "VerificationService", "exit_code",
]
