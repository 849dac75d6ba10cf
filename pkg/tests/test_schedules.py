import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import primes_upto
from tgroups.errors import RangeExceeded, Unsupported
from tgroups.primes import PrimeRange
from tgroups.schedules import (CONDITIONS, EpsilonSchedule, LogSequence, check_admissible,
                               growth_ratio_profile, interval_density_profile, interval_prime_count_profile,
                               short_interval_quotient)

mpmath.mp.dps = 50


def _mp_growth_ratio(s, c, n):
    ly = lambda k: mpmath.mpf(c) * k / mpmath.log(k) ** s
    return float(mpmath.expm1(ly(n + 1) - ly(n)) * mpmath.log(n) ** s / c)


def test_schedule_values():
    assert EpsilonSchedule.reciprocal_log().value(10) == 1 / math.log(10)
    d = EpsilonSchedule.beta_damped(0.5, 1.0)
    assert d.value(6) == pytest.approx(math.exp(-2.0) / math.log(6), rel=1e-15)
    assert EpsilonSchedule.beta_damped(1.0, 1.0).value(7) == 1 / math.log(7)
    e = EpsilonSchedule.explicit({3: 0.2, 5: 0.1})
    assert e.value(5) == 0.1
    with pytest.raises(RangeExceeded):
        e.value(4)
    p = EpsilonSchedule.platoon([(10, 12, 2, 0.4), (20, 30, 3, 0.3)])
    assert p.value(11) == 0.4 and p.value(25) == 0.3
    with pytest.raises(RangeExceeded):
        p.value(15)


def test_schedule_errors():
    with pytest.raises(Unsupported):
        EpsilonSchedule("quadratic")
    with pytest.raises(RangeExceeded):
        EpsilonSchedule.reciprocal_log(domain_start=5).value(4)
    with pytest.raises(ValueError):
        EpsilonSchedule.reciprocal_log(domain_start=1)


def test_admissibility_reciprocal_log_all_hold():
    r = check_admissible(EpsilonSchedule.reciprocal_log())
    assert r.verdicts == dict.fromkeys(CONDITIONS, True)
    assert not r.heuristic and r.admissible


def test_admissibility_one_over_n_fails_first_condition():
    r = check_admissible(EpsilonSchedule.explicit({n: 1 / n for n in range(2, 2000)}))
    assert r.verdicts["cond_5_1"] is False
    assert r.heuristic


def test_admissibility_cube_root_frozen():
    # integral tests: sum n^-5/3 converges (third condition holds) and
    # sum n^-4/3 converges, so the divergence condition fails
    r = check_admissible(EpsilonSchedule.explicit({n: n ** (-1 / 3) for n in range(2, 2000)}))
    assert r.verdicts == {"cond_5_1": True, "cond_5_2": True, "cond_5_3": True, "cond_5_4": False}
    assert r.evidence["exponent"] == pytest.approx(1 / 3, abs=1e-9)


def test_admissibility_beta_damped_decays_too_fast():
    r = check_admissible(EpsilonSchedule.beta_damped(0.5, 1.0))
    assert r.verdicts["cond_5_1"] is False and r.verdicts["cond_5_4"] is False


def test_log_value_examples():
    y = LogSequence.stretched(2, 1)
    assert y.log_value(4) == pytest.approx(4 / math.log(4) ** 2, rel=1e-15)
    assert y.log_value(4) == pytest.approx(2.08137, abs=1e-5)
    assert LogSequence.power(3).log_value(10) == pytest.approx(6.90776, abs=1e-5)
    with pytest.raises(RangeExceeded):
        y.log_value(2)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 100), st.integers(3, 10 ** 7))
def test_log_value_linear_in_c(c, n):
    a = LogSequence.stretched(2, c).log_value(n)
    b = LogSequence.stretched(2, 2 * c).log_value(n)
    assert b == 2 * a


def test_log_value_increasing_on_monotone_domain():
    for s in (1.5, 2.0, 3.0):
        y = LogSequence.stretched(s, 1.0)
        v = y.log_values(np.arange(y.monotone_from, y.monotone_from + 20000))
        assert np.all(np.diff(v) > 0)
    v = LogSequence.power(0.7).log_values(np.arange(2, 10000))
    assert np.all(np.diff(v) > 0)


def test_first_index_above():
    y = LogSequence.stretched(2, 1)
    n = y.first_index_above(1e6)
    assert y.log_value(n) > math.log(1e6) >= y.log_value(n - 1)


def test_growth_ratio_matches_high_precision_oracle():
    y = LogSequence.stretched(2, 1)
    for n in (100, 1000, 10 ** 4):
        got = growth_ratio_profile(y, [n])[0]["ratio"]
        assert got == pytest.approx(_mp_growth_ratio(2, 1, n), rel=1e-10)


def test_growth_ratio_at_1e4_frozen():
    # the ratio behaves like 1 - s/log n, so it is about 0.786 at n = 1e4
    got = growth_ratio_profile(LogSequence.stretched(2, 1), [10 ** 4])[0]["ratio"]
    assert got == pytest.approx(0.786469, abs=1e-6)
    assert got == pytest.approx(_mp_growth_ratio(2, 1, 10 ** 4), rel=1e-10)


def test_growth_ratio_log_form_is_c_invariant():
    ns = list(range(50, 5000, 37))
    a = growth_ratio_profile(LogSequence.stretched(2, 1), ns)
    b = growth_ratio_profile(LogSequence.stretched(2, 2), ns)
    for ra, rb in zip(a, b):
        assert rb["log_ratio"] == pytest.approx(ra["log_ratio"], rel=1e-12)
    # the expm1 form is not: it carries an O(c/log^s n) correction
    assert b[0]["ratio"] > a[0]["ratio"]


def test_growth_ratio_requires_stretched():
    with pytest.raises(Unsupported):
        growth_ratio_profile(LogSequence.power(2), [10])


def test_short_interval_quotient_falls_below_005():
    y = LogSequence.stretched(2, 1)
    vals = [short_interval_quotient(y, n) for n in (10 ** 4, 10 ** 5, 10 ** 6, 10 ** 7)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[2] < 0.05


def test_interval_density_profile_trends_up_toward_one():
    y = LogSequence.stretched(2, 1)
    r = [d["ratio"] for d in interval_density_profile(y, [100, 10 ** 3, 10 ** 4, 10 ** 6, 10 ** 9])]
    assert all(b > a for a, b in zip(r, r[1:]))
    assert all(0 < v < 1 for v in r)


def test_prime_count_profile_against_oracle():
    sieve = PrimeRange(10 ** 6)
    ref = primes_upto(10 ** 6)
    y = LogSequence.stretched(2, 1)
    rows = interval_prime_count_profile(y, range(60, 80), sieve)
    for r in rows:
        lo, hi = math.exp(y.log_value(r["n"])), math.exp(y.log_value(r["n"] + 1))
        assert r["alpha_n"] == sum(1 for p in ref if lo < p <= hi)
    with pytest.raises(RangeExceeded):
        interval_prime_count_profile(y, [1000], sieve)


def test_prime_count_profile_degenerate_rows():
    rows = interval_prime_count_profile(LogSequence.stretched(2, 0.1), [3, 4], PrimeRange(1000))
    assert all(r["ratio"] is None for r in rows)
