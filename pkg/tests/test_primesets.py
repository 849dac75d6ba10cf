import math

import numpy as np
import pytest

from oracles import primes_upto
from tgroups.errors import RangeExceeded
from tgroups.primes import PrimeRange
from tgroups.primesets import (BlockSpec, build_family, build_witness_pairs, density_profile,
                               normalized_block_sums, short_interval_profile, short_interval_ratio)
from tgroups.schedules import EpsilonSchedule


@pytest.fixture(scope="module")
def ref():
    return np.array(primes_upto(10 ** 6), dtype=np.int64)


def _oracle_block(ref, lo, hi, closed):
    if closed == "right":
        return ref[(ref > lo) & (ref <= hi)]
    return ref[(ref >= lo) & (ref < hi)]


def test_single_prime_block(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.0, EpsilonSchedule.explicit({3: 0.2}))
    fam = build_family(spec, [3], small_sieve)
    b = fam.blocks[0]
    assert fam.block_primes(b).tolist() == [23]
    assert b.interval.closed == "right"
    assert normalized_block_sums(fam)[0]["value"] == pytest.approx((3 / 0.2) / 23, rel=1e-15)
    assert normalized_block_sums(fam)[0]["value"] == pytest.approx(0.652, abs=1e-3)


def test_zero_eps_gives_empty_blocks(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.0, EpsilonSchedule.explicit({n: 0.0 for n in range(3, 12)}))
    fam = build_family(spec, range(3, 12), small_sieve)
    assert len(fam.blocks) == 9 and all(b.count == 0 for b in fam.blocks)
    assert all(r["value"] == 0 for r in normalized_block_sums(fam))


def test_half_shift_block_against_oracle(small_sieve, ref):
    spec = BlockSpec(1.0, 1.0, 0.5, EpsilonSchedule.reciprocal_log(), "beta_scaled")
    fam = build_family(spec, [10], small_sieve)
    b = fam.blocks[0]
    assert b.interval.closed == "left"
    assert b.interval.lo == math.exp(10.5)
    want = _oracle_block(ref, b.interval.lo, b.interval.hi, "left")
    assert fam.block_primes(b).tolist() == want.tolist()
    # pi(hi-) - pi(lo-) counts [lo, hi)
    assert b.count == small_sieve.pi_int(math.ceil(b.interval.hi) - 1) - small_sieve.pi_int(math.ceil(b.interval.lo) - 1)


@pytest.mark.parametrize("scale,a", [("unit", 0.0), ("unit", 0.5), ("beta_scaled", 0.5)])
def test_blocks_disjoint_and_sound(small_sieve, ref, scale, a):
    spec = BlockSpec(1.0, 1.0, a, EpsilonSchedule.reciprocal_log(), scale)
    fam = build_family(spec, range(2, 13), small_sieve)
    seen = set()
    for b0, b1 in zip(fam.blocks, fam.blocks[1:]):
        assert b0.interval.hi < b1.interval.lo
    for b in fam.blocks:
        ps = fam.block_primes(b)
        if b.interval.hi <= 10 ** 6:
            assert ps.tolist() == _oracle_block(ref, b.interval.lo, b.interval.hi, b.interval.closed).tolist()
        assert all(b.interval.contains(int(p)) for p in ps)
        assert not (seen & set(ps.tolist()))
        seen |= set(ps.tolist())


def test_eps_condition_drops_blocks(small_sieve):
    spec = BlockSpec(0.5, 1.0, 0.0, EpsilonSchedule.reciprocal_log(), "unit")
    fam = build_family(spec, range(2, 14), small_sieve)
    assert all(b.eps < 0.5 for b in fam.blocks)
    assert [b.n for b in fam.blocks][0] == 8  # 1/log 8 < 1/2 <= 1/log 7


def test_family_range_exceeded(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.0, EpsilonSchedule.reciprocal_log())
    with pytest.raises(RangeExceeded):
        build_family(spec, [20], small_sieve)


def test_normalized_sums_need_unit_scale(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.5, EpsilonSchedule.reciprocal_log(), "beta_scaled")
    with pytest.raises(ValueError):
        normalized_block_sums(build_family(spec, [5], small_sieve))


def test_family_summary_reproducible(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.5, EpsilonSchedule.reciprocal_log(), "beta_scaled")
    a = build_family(spec, range(2, 15), small_sieve).to_dict()
    b = build_family(spec, range(2, 15), PrimeRange(10 ** 7, workers=4)).to_dict()
    assert a == b


def test_density_profile_giant_block_and_empty(small_sieve):
    spec = BlockSpec(1.0, 1.0, -2.0, EpsilonSchedule.explicit({2: 0.999999}))
    fam = build_family(spec, [2], small_sieve)
    # (e^0, e^0.999999] holds 2 and all other primes below e: density 1
    assert density_profile(fam, small_sieve)[0]["cumulative_density"] == 1.0
    empty = build_family(spec, [], small_sieve)
    assert density_profile(empty, small_sieve) == []


def test_density_profile_decreasing_frozen(big_sieve):
    spec = BlockSpec(1.0, 1.0, 0.5, EpsilonSchedule.beta_damped(1.0, 1.0), "beta_scaled")
    rows = density_profile(build_family(spec, range(2, 20), big_sieve), big_sieve)
    d = [r["cumulative_density"] for r in rows]
    assert all(b < a for a, b in zip(d[3:], d[4:]))
    # eps_n = 1/log n makes each block a fixed share of its decade, so the
    # density falls slowly: about 0.456 at n = 19, far above 0.05
    assert rows[-1]["n"] == 19
    assert d[-1] == pytest.approx(0.456, abs=5e-3)


def test_witnesses_full_spectrum_enclosures(small_sieve):
    w = build_witness_pairs("full_spectrum", 1.0, 0.5, range(3, 15), small_sieve)
    assert len(w) > 1000
    assert bool(np.all(w.inside()))
    for n in np.unique(w.level):
        sel = w.level == n
        eps = 1 / math.log(n)
        r = w.ratio[sel]
        assert np.all((math.exp(math.log(0.5) - eps) < r) & (r < math.exp(math.log(0.5) + eps)))
    everything = np.concatenate([w.p, w.q])
    assert np.unique(everything).size == everything.size


def test_witnesses_powers_straddle_e(small_sieve):
    lam = math.exp(-0.5)
    w = build_witness_pairs("powers", 1.0, lam, range(2, 8), small_sieve)
    assert w.target == pytest.approx(math.e, rel=1e-15)
    assert bool(np.all(w.inside()))
    assert np.all(w.lower < math.e) and np.all(math.e < w.upper)
    everything = np.concatenate([w.p, w.q])
    assert np.unique(everything).size == everything.size


def test_witnesses_skip_empty_levels(small_sieve):
    w = build_witness_pairs("powers", 1.0, math.exp(-0.5), range(1, 4), small_sieve)
    # eps_2 = 1/log 2 > beta*t0 = 1/2 for level 1
    assert w.skipped == [{"n": 1, "reason": "eps not below beta*t0"}]
    assert [lv["n"] for lv in w.levels] == [2, 3]


def test_witness_errors(small_sieve):
    with pytest.raises(ValueError):
        build_witness_pairs("full_spectrum", 1.0, 1.5, [5], small_sieve)
    with pytest.raises(ValueError):
        build_witness_pairs("other", 1.0, 0.5, [5], small_sieve)


def test_short_interval_ratio_against_oracle(ref):
    sieve = PrimeRange(10 ** 6)
    for n in range(5, 13):
        eps = 1 / math.log(n)
        lo, hi = math.exp(n), math.exp(n + eps)
        count = int(np.count_nonzero((ref > lo) & (ref <= hi)))
        assert short_interval_ratio(sieve, n, eps) == count / (math.exp(n) * eps / n)
    with pytest.raises(RangeExceeded):
        short_interval_ratio(sieve, 14, 0.5)


def test_short_interval_shift_limit(small_sieve):
    rows = short_interval_profile(small_sieve, EpsilonSchedule.reciprocal_log(), [12, 13], t=1.0, a=1.0)
    assert rows[0]["limit"] == math.e
    assert all(2.0 < r["ratio"] < 4.0 for r in rows)
