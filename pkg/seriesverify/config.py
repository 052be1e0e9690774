import os
from pathlib import Path
from typing import List

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

_DEFAULT_REGISTRY = Path(__file__).resolve().parent.parent / "data" / "registry.toml"


class Settings(BaseSettings):
    # Registry settings
    # Path to the conjecture registry (TOML, schema-versioned)
    REGISTRY_PATH: Path = _DEFAULT_REGISTRY

    # Identity verification settings
    # Decimal digits certified for identities unless --digits is given
    DEFAULT_DIGITS: int = 30
    # Ceiling for precision doubling on Inconclusive verdicts (bits)
    PRECISION_CAP_BITS: int = 8192
    # Number of consecutive term ratios inspected before a tail is certified
    RATIO_WINDOW: int = 20
    # Multiplier applied to the largest observed ratio in the window
    RATIO_SAFETY: float = 1.05
    # Certified ratio must stay below this value, otherwise the run ends TailCapHit
    RATIO_CUTOFF: float = 0.95
    # Hard cap on the number of series terms (10^6 is far above any registry need)
    MAX_TERMS: int = 1_000_000

    # Congruence verification settings
    # Default prime range scanned by verify/verify-all
    PRIME_MIN: int = 3
    PRIME_MAX: int = 100
    # Evaluation strategy: auto (exact up to EXACT_PRIME_LIMIT), exact, fast, both
    STRATEGY: str = "auto"
    # Largest prime for which "auto" uses exact rationals
    EXACT_PRIME_LIMIT: int = 100
    # Extra p-adic digits carried by ModPK units on the fast path
    MODPK_GUARD_DIGITS: int = 8

    # Discovery settings
    # Maximal coefficient height accepted from PSLQ
    PSLQ_MAX_HEIGHT: int = 10**8
    # Working digits for discovery runs
    DISCOVERY_DIGITS: int = 60
    # Default basis menu for series without a known closed form
    DISCOVERY_BASIS: List[str] = [
        "zeta(5)", "pi^2*zeta(3)", "pi^4*log(2)", "G*pi^2", "beta(4)",
        "pi*G", "zeta(3)*log(2)", "pi^3", "K", "L",
    ]

    # Execution settings
    # Worker processes used by verify-all (1 runs inline)
    PARALLELISM: int = 1
    # Report format: json (canonical), markdown or csv
    OUTPUT_FORMAT: str = "json"

    # Constant cache settings
    # Directory holding constants.sqlite; SERIESVERIFY_CACHE_DIR overrides it
    CACHE_DIR: Path = Field(
        default=Path(os.path.expanduser("~/.cache/seriesverify")),
        validation_alias=AliasChoices("SERIESVERIFY_CACHE_DIR", "CACHE_DIR"),
    )
    # Disable to keep every enclosure in memory only
    CACHE_ENABLED: bool = True

    model_config = SettingsConfigDict(
        # Path to .env file for loading these settings
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
