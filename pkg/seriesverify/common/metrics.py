from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

# Dedicated registry so repeated imports in tests never collide with the default one
REGISTRY = CollectorRegistry()

VERIFICATIONS_TOTAL = Counter(
    'seriesverify_verifications_total',
    'Total number of verdicts produced',
    ['kind', 'verdict'],
    registry=REGISTRY,
)

VERIFICATION_DURATION = Histogram(
    'seriesverify_verification_duration_seconds',
    'Per-record verification duration in seconds',
    ['kind'],
    buckets=(0.01, 0.05, 0.1, 0.25, 0.5, 1, 2.5, 5, 10, 30, 60, 120, 300),
    registry=REGISTRY,
)

STRATEGY_FALLBACKS_TOTAL = Counter(
    'seriesverify_strategy_fallbacks_total',
    'Fast-path evaluations that fell back to exact rationals',
    ['reason'],
    registry=REGISTRY,
)

CONSTANT_CACHE_LOOKUPS = Counter(
    'seriesverify_constant_cache_lookups_total',
    'Constant enclosure lookups by outcome',
    ['result'],
    registry=REGISTRY,
)


def record_verdict(kind: str, verdict: str) -> None:
    VERIFICATIONS_TOTAL.labels(kind=kind, verdict=verdict).inc()


def write_metrics(path: str) -> None:
    """Dump all counters in the node-exporter textfile format."""
    write_to_textfile(path, REGISTRY)
