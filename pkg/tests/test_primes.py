import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import is_prime, pi_table, primes_upto
from tgroups.errors import RangeExceeded
from tgroups.primes import PrimeRange, RealInterval


@pytest.fixture(scope="module")
def sieve():
    return PrimeRange(10 ** 6)


def test_count_primes_small_values(sieve):
    assert sieve.count_primes(1) == 0
    assert sieve.count_primes(10) == 4
    assert sieve.count_primes(100) == 25


def test_count_matches_trial_division_to_1e5(sieve):
    table = pi_table(10 ** 5)
    got = [sieve.pi_int(n) for n in range(10 ** 5 + 1)]
    assert got == table
    # spot-check the table itself against trial division
    assert table[9973] == sum(is_prime(k) for k in range(9974))


def test_count_accepts_real_arguments(sieve):
    assert sieve.count_primes(10.999) == 4
    assert sieve.count_primes(11.0) == 5


def test_range_exceeded_names_the_limit(sieve):
    with pytest.raises(RangeExceeded, match="1000000"):
        sieve.count_primes(10 ** 6 + 1)
    with pytest.raises(RangeExceeded):
        sieve.primes_in(RealInterval(10.0, 2e6))


def test_primes_in_examples(sieve):
    assert sieve.primes_in(RealInterval(math.exp(3), math.exp(3.2))).tolist() == [23]
    assert sieve.primes_in(RealInterval(5.5, 5.5)).tolist() == []
    assert sieve.primes_in(RealInterval(7, 11)).tolist() == [11]


def test_interval_orientations(sieve):
    assert sieve.primes_in(RealInterval(7, 11, "left")).tolist() == [7]
    assert sieve.primes_in(RealInterval(7, 11, "neither")).tolist() == []
    assert sieve.primes_in(RealInterval(6.5, 11.5, "neither")).tolist() == [7, 11]


def test_primes_between_matches_oracle(sieve):
    ref = primes_upto(10 ** 5)
    assert sieve.primes_between(0, 10 ** 5).tolist() == ref
    assert sieve.primes_between(2, 2).tolist() == [2]
    assert sieve.primes_between(90, 96).tolist() == []


def test_reciprocal_power_sum_examples(sieve):
    assert sieve.reciprocal_power_sum(RealInterval(math.exp(3), math.exp(3.2)), 1.0) == 1 / 23
    assert sieve.reciprocal_power_sum(RealInterval(9.0, 9.0), 1.0) == 0.0
    assert sieve.reciprocal_power_sum(RealInterval(2, 6), 1.0) == pytest.approx(1 / 3 + 1 / 5, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(2, 1e5), st.floats(0, 1e5), st.floats(0, 1e5))
def test_interval_union_is_disjoint_and_ordered(a, d1, d2):
    sieve = _module_sieve()
    b, c = a + d1, a + d1 + d2
    left = sieve.primes_in(RealInterval(a, b))
    right = sieve.primes_in(RealInterval(b, c))
    whole = sieve.primes_in(RealInterval(a, c))
    assert np.concatenate([left, right]).tolist() == whole.tolist()


@settings(max_examples=200, deadline=None)
@given(st.floats(2, 1e5), st.floats(0, 1e5), st.floats(0, 1e5), st.floats(0.1, 1.0))
def test_reciprocal_sum_additive_and_monotone(a, d1, d2, beta):
    sieve = _module_sieve()
    b, c = a + d1, a + d1 + d2
    s_ab = sieve.reciprocal_power_sum(RealInterval(a, b), beta)
    s_bc = sieve.reciprocal_power_sum(RealInterval(b, c), beta)
    s_ac = sieve.reciprocal_power_sum(RealInterval(a, c), beta)
    assert s_ab <= s_ac and s_bc <= s_ac
    assert abs(s_ab + s_bc - s_ac) <= 1e-12 * max(s_ac, 1e-300)


_cache = {}


def _module_sieve():
    if "s" not in _cache:
        _cache["s"] = PrimeRange(3 * 10 ** 5)
    return _cache["s"]


def test_worker_count_does_not_change_bits():
    one = PrimeRange(5 * 10 ** 6, segment_size=1 << 14, workers=1)
    many = PrimeRange(5 * 10 ** 6, segment_size=1 << 14, workers=8)
    assert np.array_equal(one.words, many.words)
    assert one.pi_int(5 * 10 ** 6) == 348513


def test_segment_size_does_not_change_bits():
    a = PrimeRange(10 ** 6 + 7, segment_size=1 << 10)
    b = PrimeRange(10 ** 6 + 7, segment_size=1 << 20)
    assert np.array_equal(a.words, b.words)


def test_pi_of_1e6_and_1e8(mid_sieve):
    assert PrimeRange(10 ** 6).pi_int(10 ** 6) == 78498
    assert mid_sieve.pi_int(10 ** 8) == 5761455


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "s.bin"
    a = PrimeRange(10 ** 6, cache_path=path)
    assert path.exists()
    b = PrimeRange(10 ** 6, cache_path=path)
    assert np.array_equal(a.words, b.words)
    # a cache for another limit is ignored, not misread
    c = PrimeRange(10 ** 6 + 1000, cache_path=path)
    assert c.pi_int(10 ** 6 + 1000) == PrimeRange(10 ** 6 + 1000).pi_int(10 ** 6 + 1000)


def test_corrupt_cache_is_resieved(tmp_path):
    path = tmp_path / "s.bin"
    path.write_bytes(b"garbage")
    s = PrimeRange(10 ** 5, cache_path=path)
    assert s.pi_int(10 ** 5) == 9592


def test_constructor_preconditions():
    with pytest.raises(ValueError):
        PrimeRange(1)
    with pytest.raises(ValueError):
        PrimeRange(100, segment_size=512)
    with pytest.raises(ValueError):
        RealInterval(3.0, 2.0)
