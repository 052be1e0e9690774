from seriesverify.common.logging.config import (
    ContextFilter,
    JSONFormatter,
    configure_logging,
    verification_context,
)

__all__ = ["ContextFilter", "JSONFormatter", "configure_logging", "verification_context"]
