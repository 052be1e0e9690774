import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from filelock import FileLock, Timeout
from mpmath.libmp import from_man_exp, to_str
from sqlalchemy import delete, func, select
from sqlalchemy.exc import SQLAlchemyError

from seriesverify.arith.realball import RealBall
from seriesverify.common.metrics import CONSTANT_CACHE_LOOKUPS
from seriesverify.config import settings
from seriesverify.constants.kernels import evaluate_key
from seriesverify.constants.keys import ConstantKey
from seriesverify.db import get_db_session
from seriesverify.models.cache_entry import CACHE_SCHEMA_VERSION, ConstantEnclosure

logger = logging.getLogger(__name__)


def _split(x) -> Tuple[str, int]:
    sign, man, exp, _ = x
    return str(-man if sign else man), exp


def _join(man: str, exp: int):
    return from_man_exp(int(man), exp)


class ConstantCache:
    """Memoized constant enclosures backed by a SQLite file shared across runs."""

    def __init__(self, cache_dir: Optional[Path] = None, enabled: bool = True):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.enabled = enabled and self.cache_dir is not None
        if self.enabled:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._memo: Dict[Tuple[str, int], RealBall] = {}
        self._lock = threading.RLock()

    @property
    def lock_path(self) -> Path:
        return self.cache_dir / "constants.lock"

    def get(self, key: ConstantKey, prec: int) -> RealBall:
        """Return the enclosure of `key` at `prec` bits, computing it on a miss."""
        memo_key = (key.text, prec)
        with self._lock:
            ball = self._memo.get(memo_key)
            if ball is not None:
                CONSTANT_CACHE_LOOKUPS.labels(result="memo").inc()
                return ball

            ball = self._load(key, prec) if self.enabled else None
            if ball is not None:
                CONSTANT_CACHE_LOOKUPS.labels(result="disk").inc()
            else:
                CONSTANT_CACHE_LOOKUPS.labels(result="miss").inc()
                ball = evaluate_key(key, prec)
                if self.enabled:
                    self._store(key, prec, ball)
            self._memo[memo_key] = ball
            return ball

    def _load(self, key: ConstantKey, prec: int) -> Optional[RealBall]:
        try:
            with get_db_session(self.cache_dir) as session:
                row = session.execute(
                    select(ConstantEnclosure).where(
                        ConstantEnclosure.key == key.text,
                        ConstantEnclosure.prec == prec,
                        ConstantEnclosure.schema_version == CACHE_SCHEMA_VERSION,
                    )
                ).scalar_one_or_none()
                if row is None:
                    return None
                return RealBall(_join(row.mid_man, row.mid_exp), _join(row.rad_man, row.rad_exp), prec)
        except SQLAlchemyError as e:
            logger.error(f"Error reading {key.text} from constant cache: {str(e)}")
            return None

    def _store(self, key: ConstantKey, prec: int, ball: RealBall) -> bool:
        mid_man, mid_exp = _split(ball.mid)
        rad_man, rad_exp = _split(ball.rad)
        try:
            with FileLock(str(self.lock_path), timeout=30):
                with get_db_session(self.cache_dir) as session:
                    exists = session.execute(
                        select(ConstantEnclosure.id).where(
                            ConstantEnclosure.key == key.text,
                            ConstantEnclosure.prec == prec,
                        )
                    ).first()
                    if exists:
                        return True
                    session.add(ConstantEnclosure(
                        key=key.text,
                        prec=prec,
                        mid_man=mid_man,
                        mid_exp=mid_exp,
                        rad_man=rad_man,
                        rad_exp=rad_exp,
                        preview=to_str(ball.mid, 30),
                        schema_version=CACHE_SCHEMA_VERSION,
                    ))
                    session.commit()
            logger.debug(f"Cached {key.text} at {prec} bits")
            return True
        except Timeout:
            logger.warning(f"Timed out waiting for {self.lock_path}; {key.text} not cached")
            return False
        except SQLAlchemyError as e:
            logger.error(f"Error writing {key.text} to constant cache: {str(e)}")
            return False

    def info(self) -> List[Dict[str, object]]:
        """Summary rows (key, precisions, preview) of the on-disk cache."""
        if not self.enabled:
            return []
        try:
            with get_db_session(self.cache_dir) as session:
                rows = session.execute(
                    select(ConstantEnclosure.key, ConstantEnclosure.prec, ConstantEnclosure.preview)
                    .where(ConstantEnclosure.schema_version == CACHE_SCHEMA_VERSION)
                    .order_by(ConstantEnclosure.key, ConstantEnclosure.prec)
                ).all()
                return [{"key": k, "prec": p, "preview": v} for k, p, v in rows]
        except SQLAlchemyError as e:
            logger.error(f"Error listing constant cache: {str(e)}")
            return []

    def count(self) -> int:
        if not self.enabled:
            return 0
        try:
            with get_db_session(self.cache_dir) as session:
                return session.execute(select(func.count(ConstantEnclosure.id))).scalar_one()
        except SQLAlchemyError as e:
            logger.error(f"Error counting constant cache rows: {str(e)}")
            return 0

    def clear(self) -> int:
        """Drop every memoized and stored enclosure; returns the number of rows removed."""
        with self._lock:
            self._memo.clear()
            if not self.enabled:
                return 0
            try:
                with FileLock(str(self.lock_path), timeout=30):
                    with get_db_session(self.cache_dir) as session:
                        removed = session.execute(delete(ConstantEnclosure)).rowcount
                        session.commit()
                logger.info(f"Removed {removed} cached enclosures from {self.cache_dir}")
                return removed
            except (SQLAlchemyError, Timeout) as e:
                logger.error(f"Error clearing constant cache: {str(e)}")
                return 0

    def warm(self, keys: List[ConstantKey], prec: int) -> int:
        for key in keys:
            self.get(key, prec)
        return len(keys)


# Global cache instance
_constant_cache: Optional[ConstantCache] = None


def configure_constant_cache(cache_dir: Optional[Path] = None, enabled: Optional[bool] = None) -> ConstantCache:
    """Replace the process-wide cache, e.g. for --no-cache or a worker process."""
    global _constant_cache
    if enabled is None:
        enabled = settings.CACHE_ENABLED
    _constant_cache = ConstantCache(cache_dir or settings.CACHE_DIR, enabled)
    return _constant_cache


def get_constant_cache() -> ConstantCache:
    """Get the global constant cache."""
    global _constant_cache
    if _constant_cache is None:
        _constant_cache = ConstantCache(settings.CACHE_DIR, settings.CACHE_ENABLED)
    return _constant_cache


def get_constant(key: ConstantKey, prec: int) -> RealBall:
    return get_constant_cache().get(key, prec)
