from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from seriesverify.models.cache_entry import Base


@lru_cache(maxsize=8)
def get_engine(cache_dir: Path):
    """SQLite engine for the constant cache under `cache_dir`, tables created on first use."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    engine = create_engine(f"sqlite:///{cache_dir / 'constants.sqlite'}", echo=False, future=True)
    Base.metadata.create_all(engine)
    return engine


@contextmanager
def get_db_session(cache_dir: Path):
    """Get a session on the constant cache database."""
    session = sessionmaker(get_engine(Path(cache_dir)), expire_on_commit=False)()
    try:
        yield session
    finally:
        session.close()
