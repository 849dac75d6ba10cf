import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tgroups.errors import RangeExceeded
from tgroups.primesets import BlockSpec, build_family
from tgroups.schedules import EpsilonSchedule
from tgroups.series import (CONVERGENT, DIVERGENT, INCONCLUSIVE, Kernel, SeriesTrace, classify, exact_t_term,
                            measure_zero_mc, near_integer_measure_mc, partial_sum, trace, trace_from_increments)

SMALL = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47], dtype=np.int64)


def _direct(p, beta, omega, t):
    return math.sin(omega * t * math.log(p)) ** 2 / p ** beta


def test_partial_sum_examples():
    k = Kernel(1.0)
    assert partial_sum(k, [2], 0.0, 10) == 0.0
    assert partial_sum(k, [2], 1.0, 10) == pytest.approx(math.sin(2 * math.pi * math.log(2)) ** 2 / 2, rel=1e-14)
    assert partial_sum(k, [2], 1.0, 10) == pytest.approx(0.43887, abs=1e-5)  # direct evaluation, not 0.43880
    want = math.fsum(_direct(p, 1.0, 2 * math.pi, 1.0) for p in (2, 3, 5))
    assert partial_sum(k, [2, 3, 5], 1.0, 10) == pytest.approx(want, rel=1e-14)


def test_partial_sum_respects_cutoff():
    k = Kernel(0.7, 3.0)
    want = math.fsum(_direct(p, 0.7, 3.0, 0.4) for p in SMALL if p <= 20)
    assert partial_sum(k, SMALL, 0.4, 20) == pytest.approx(want, rel=1e-14)


def test_kernel_preconditions():
    with pytest.raises(ValueError):
        Kernel(0.0)
    with pytest.raises(ValueError):
        Kernel(1.0, -1.0)


def test_partial_sum_beyond_sieve(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.0, EpsilonSchedule.reciprocal_log())
    fam = build_family(spec, range(3, 10), small_sieve)
    with pytest.raises(RangeExceeded):
        partial_sum(Kernel(), fam, 1.0, 2e7)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_subadditivity_termwise(t1, t2):
    k = Kernel(1.0)
    a = k.term(SMALL, t1 + t2)
    b = 2 * (k.term(SMALL, t1) + k.term(SMALL, t2))
    assert np.all(a <= b * (1 + 1e-12) + 1e-300)


@settings(max_examples=200, deadline=None)
@given(st.floats(-100, 100))
def test_symmetry(t):
    k = Kernel(1.0)
    assert partial_sum(k, SMALL, -t, 100) == partial_sum(k, SMALL, t, 100)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 10), st.floats(1e-3, 1e6), st.floats(1e-3, 1e6))
def test_lipschitz_bound(t, x, y):
    f = lambda v: math.sin(t * math.log(v)) ** 2 / v
    assert abs(f(x) - f(y)) <= (2 * t + 1) * abs(1 / x - 1 / y) * (1 + 1e-9) + 1e-15


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(0.05, 1.0), st.floats(0.1, 10))
def test_term_range(t, beta, omega):
    k = Kernel(beta, omega)
    v = k.term(SMALL, t)
    assert np.all(v >= 0) and np.all(v <= SMALL.astype(float) ** -beta * (1 + 1e-15))


def test_exact_t_term_examples():
    assert exact_t_term(2, 1.0, 0.0) == 0.0
    direct = 1 - 0.5 / abs(1 - 0.5 * cmath.exp(-1j * math.log(2)))
    assert exact_t_term(2, 1.0, 1.0) == pytest.approx(direct, rel=1e-14)
    assert exact_t_term(2, 1.0, 1.0) == pytest.approx(0.2789, abs=1e-4)


def test_exact_t_term_asymptotic_factor():
    p = 10 ** 6 + 3
    s2 = math.sin(math.log(p) / 2) ** 2
    assert s2 > 0.1
    assert exact_t_term(p, 1.0, 1.0) / (s2 / p) == pytest.approx(2.0, abs=1e-3)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 10 ** 9), st.floats(0.05, 1.0), st.floats(-30, 30))
def test_exact_t_term_against_complex_modulus(p, beta, t):
    x = p ** -beta
    direct = 1 - (1 - x) / abs(1 - x * cmath.exp(-1j * beta * t * math.log(p)))
    got = exact_t_term(p, beta, t)
    assert 0 <= got < 1
    assert got == pytest.approx(direct, rel=1e-9, abs=1e-15)


def test_trace_block_sums_add_up(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.5, EpsilonSchedule.reciprocal_log(), "beta_scaled")
    fam = build_family(spec, range(2, 16), small_sieve)
    tr = trace(Kernel(), fam, 0.5)
    assert len(tr) == len(fam.blocks)
    assert math.fsum(tr.block_sums) == pytest.approx(tr.partial_sums[-1], rel=1e-10)
    assert np.all(np.diff(tr.partial_sums) >= 0)
    upper = [math.fsum(b.reciprocal_sum for b in fam.blocks[:i + 1]) for i in range(len(fam.blocks))]
    assert np.all(tr.partial_sums <= np.array(upper) * (1 + 1e-12))
    single = trace(Kernel(), fam, 0.5, [fam.blocks[5].interval.hi])
    assert len(single) == 1
    assert single.partial_sums[0] == pytest.approx(partial_sum(Kernel(), fam, 0.5, fam.blocks[5].interval.hi), rel=0)
    zero = trace(Kernel(), fam, 0.0)
    assert np.all(zero.partial_sums == 0)


def test_trace_plain_list():
    tr = trace(Kernel(), SMALL, 1.0, [10, 20, 50])
    for c, s in zip(tr.cutoffs, tr.partial_sums):
        assert s == pytest.approx(partial_sum(Kernel(), SMALL, 1.0, c), rel=1e-14)
    with pytest.raises(ValueError):
        trace(Kernel(), SMALL, 1.0)


def test_trace_csv_columns(small_sieve):
    spec = BlockSpec(1.0, 1.0, 0.5, EpsilonSchedule.reciprocal_log(), "beta_scaled")
    tr = trace(Kernel(), build_family(spec, range(2, 6), small_sieve), 1.0)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "cutoff,partial_sum,block_n,block_sum"
    assert len(lines) == len(tr) + 1


def _sampled(b, N, L):
    n = np.arange(2, N + 1)
    cs = np.cumsum(b(n.astype(float)))
    idx = np.unique(np.geomspace(3, N, L).astype(int))
    return SeriesTrace(Kernel(), float("nan"), idx.astype(float), cs[idx - 2], idx, None)


@pytest.mark.parametrize("L", [8, 12, 30, 100])
def test_classifier_synthetic_envelopes(L):
    assert classify(_sampled(lambda n: 1 / (n * np.log(n)), 10 ** 6, L)).label == DIVERGENT
    assert classify(_sampled(lambda n: n ** -1.5, 10 ** 6, L)).label == CONVERGENT


def test_classifier_full_increments():
    n = np.arange(2, 10 ** 4 + 1)
    assert classify(trace_from_increments(n, 1 / (n * np.log(n)))).label == DIVERGENT
    assert classify(trace_from_increments(n, n ** -1.5)).label == CONVERGENT


def test_classifier_borderline_is_inconclusive():
    # sum 1/(n log^2 n) converges too slowly to separate at this length
    assert classify(_sampled(lambda n: 1 / (n * np.log(n) ** 2), 10 ** 6, 30)).label == INCONCLUSIVE


def test_classifier_needs_points_and_decades():
    with pytest.raises(ValueError, match="8 cutoffs"):
        classify(_sampled(lambda n: n ** -1.5, 10 ** 6, 5))
    with pytest.raises(ValueError, match="decades"):
        classify(_sampled(lambda n: n ** -1.5, 500, 20))


def test_near_integer_measure():
    est = near_integer_measure_mc(1000.0, 0.1, 10 ** 5, seed=1)
    assert 0.18 <= est.estimate <= 0.22
    assert est.bound == pytest.approx(0.2)


def test_measure_zero_mc_harmonic_instance():
    k = np.arange(1, 1001, dtype=float)
    est = measure_zero_mc(k ** 2, k, 0.05, 1000, 20000, seed=3)
    assert est.within_bound
    assert est.estimate <= 0.4 + 3 * est.stderr


def test_measure_zero_mc_is_reproducible():
    k = np.arange(1, 201, dtype=float)
    a = measure_zero_mc(k ** 2, k, 0.1, 200, 5000, seed=11)
    b = measure_zero_mc(k ** 2, k, 0.1, 200, 5000, seed=11)
    assert a == b


def test_measure_zero_mc_preconditions():
    k = np.arange(1, 20, dtype=float)
    with pytest.raises(ValueError):
        measure_zero_mc(k, k, 0.1, 10, 999, seed=0)
    with pytest.raises(ValueError):
        measure_zero_mc(k, k, 0.6, 10, 1000, seed=0)
    with pytest.raises(ValueError):
        measure_zero_mc(k[::-1], k, 0.1, 10, 1000, seed=0)
