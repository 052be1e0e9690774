from datetime import datetime, timezone

from sqlalchemy import Column, DateTime, Integer, String, Text, UniqueConstraint
from sqlalchemy.orm import declarative_base

Base = declarative_base()

CACHE_SCHEMA_VERSION = 1


def _utcnow():
    return datetime.now(timezone.utc)


class ConstantEnclosure(Base):
    """One cached enclosure of a named constant at a given working precision."""
    __tablename__ = "constant_enclosures"

    id = Column(Integer, primary_key=True)
    key = Column(String(128), nullable=False)  # canonical ConstantKey text, e.g. "Zeta(3)"
    prec = Column(Integer, nullable=False)  # working precision in bits
    # Midpoint and radius as exact binary floats: signed mantissa * 2^exponent
    mid_man = Column(Text, nullable=False)
    mid_exp = Column(Integer, nullable=False)
    rad_man = Column(Text, nullable=False)
    rad_exp = Column(Integer, nullable=False)
    preview = Column(String(64), nullable=False)  # decimal preview for humans
    schema_version = Column(Integer, nullable=False, default=CACHE_SCHEMA_VERSION)
    created_at = Column(DateTime, default=_utcnow)

    __table_args__ = (UniqueConstraint("key", "prec", name="_constant_key_prec_uc"),)
