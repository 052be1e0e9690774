import tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from seriesverify.config import settings


class RunConfig(BaseModel):
    """Per-run options: a TOML file (--config) overlaid by command-line flags."""
    model_config = ConfigDict(extra="forbid")

    registry_path: Path = Field(default_factory=lambda: settings.REGISTRY_PATH)
    digits: int = Field(default_factory=lambda: settings.DEFAULT_DIGITS, ge=10)
    prime_min: int = Field(default_factory=lambda: settings.PRIME_MIN, ge=2)
    prime_max: int = Field(default_factory=lambda: settings.PRIME_MAX, le=10_000)
    strategy: Literal["auto", "exact", "fast", "both"] = Field(default_factory=lambda: settings.STRATEGY)
    parallelism: int = Field(default_factory=lambda: settings.PARALLELISM, ge=1)
    cache_dir: Optional[Path] = None
    cache_enabled: bool = Field(default_factory=lambda: settings.CACHE_ENABLED)
    output_format: Literal["json", "markdown", "csv"] = Field(default_factory=lambda: settings.OUTPUT_FORMAT)
    ids: List[str] = []

    @model_validator(mode="after")
    def _check_range(self):
        if self.prime_min > self.prime_max:
            raise ValueError(f"empty prime range {self.prime_min}..{self.prime_max}")
        return self

    @classmethod
    def load(cls, path: Optional[Path] = None, **overrides: Any) -> "RunConfig":
        """Read `path` (TOML, keys as field names) and apply non-None overrides on top."""
        data: Dict[str, Any] = {}
        if path is not None:
            with open(path, "rb") as f:
                data = tomllib.load(f)
            data = data.get("run", data)
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**data)

    def public_dict(self) -> Dict[str, Any]:
        """Fields that go into report metadata; cache location is machine-specific and left out."""
        return {
            "registry": Path(self.registry_path).name,
            "digits": self.digits,
            "prime_min": self.prime_min,
            "prime_max": self.prime_max,
            "strategy": self.strategy,
            "ids": list(self.ids),
        }
