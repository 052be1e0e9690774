from pathlib import Path

import pytest

from seriesverify.config import settings
from seriesverify.constants.cache import configure_constant_cache
from seriesverify.expr.registry import load_registry

FIXTURES = Path(__file__).parent / "fixtures"

SMALL_PRIMES = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long verification batteries (deselect with -m 'not slow')")


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    """Every test gets its own constant cache directory, memory-only unless asked otherwise."""
    directory = tmp_path / "cache"
    monkeypatch.setattr(settings, "CACHE_DIR", directory)
    configure_constant_cache(directory, enabled=False)
    return directory


@pytest.fixture
def disk_cache(cache_dir):
    return configure_constant_cache(cache_dir, enabled=True)


@pytest.fixture
def fixture_registry_path() -> Path:
    return FIXTURES / "registry_fixture.toml"


@pytest.fixture
def fixture_registry(fixture_registry_path):
    return load_registry(fixture_registry_path)


@pytest.fixture(scope="session")
def shipped_registry():
    return load_registry(settings.REGISTRY_PATH)


@pytest.fixture
def small_primes():
    return list(SMALL_PRIMES)
