from fractions import Fraction

import pytest

from seriesverify.constants import keys
from seriesverify.constants.cache import ConstantCache, configure_constant_cache, get_constant
from seriesverify.constants.keys import ConstantKey, ConstantTag


def test_key_text_round_trip():
    for key in (keys.PI, keys.zeta(5), keys.log_q(Fraction(8, 9)), keys.gamma_rat("1/4"), keys.sqrt_q(3)):
        assert ConstantKey.parse(key.text) == key
    assert keys.gamma_rat("2/8").text == "GammaRat(1/4)"


@pytest.mark.parametrize("tag, params", [
    (ConstantTag.ZETA, (1,)),
    (ConstantTag.BETA, (0,)),
    (ConstantTag.GAMMA_RAT, (Fraction(3, 2),)),
    (ConstantTag.LOG_Q, (0,)),
    (ConstantTag.PI, (2,)),
])
def test_invalid_keys(tag, params):
    with pytest.raises(ValueError):
        ConstantKey(tag, params)


def test_enclosures_persist_across_instances(disk_cache, cache_dir):
    first = disk_cache.get(keys.zeta(3), 200)
    assert disk_cache.count() == 1
    assert (cache_dir / "constants.sqlite").exists()

    reloaded = ConstantCache(cache_dir, enabled=True).get(keys.zeta(3), 200)
    assert (reloaded.mid, reloaded.rad) == (first.mid, first.rad)

    rows = disk_cache.info()
    assert [(row["key"], row["prec"]) for row in rows] == [("Zeta(3)", 200)]
    assert rows[0]["preview"].startswith("1.20205690315959")


def test_precisions_are_cached_separately(disk_cache):
    disk_cache.warm([keys.PI, keys.CATALAN], 128)
    disk_cache.get(keys.PI, 256)
    assert disk_cache.count() == 3
    assert disk_cache.clear() == 3
    assert disk_cache.count() == 0


def test_disabled_cache_never_touches_disk(cache_dir):
    cache = configure_constant_cache(cache_dir, enabled=False)
    get_constant(keys.PI, 128)
    assert cache.count() == 0
    assert cache.info() == []
    assert not (cache_dir / "constants.sqlite").exists()
