import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tgroups.isomorphy import (GeometricState, TwoLevelState, criterion_sum, explicit_overlap_defect,
                               overlap_defect, overlap_inequality_check, overlap_inequality_violations,
                               power_block_pairing, power_envelope, stretched_block_pairing)
from tgroups.primes import PrimeRange
from tgroups.primesets import build_witness_pairs
from tgroups.schedules import LogSequence

mpmath.mp.dps = 60

ratios = st.floats(1e-6, 0.9)


def _mp_defect(s1, s2, K=4000):
    def eig(s, k):
        r = mpmath.mpf(s.ratio)
        if isinstance(s, GeometricState):
            return (1 - r) * r ** k
        return [1 / (1 + r), r / (1 + r)][k] if k < 2 else mpmath.mpf(0)
    return float(1 - mpmath.fsum(mpmath.sqrt(eig(s1, k) * eig(s2, k)) for k in range(K)))


def test_identical_states_give_zero():
    for r in (1e-9, 0.3, 0.9):
        assert overlap_defect(GeometricState(r), GeometricState(r)) == 0.0
        assert overlap_defect(TwoLevelState(r), TwoLevelState(r)) == 0.0
        assert explicit_overlap_defect(GeometricState(r), GeometricState(r)) <= 1e-14


def test_geometric_closed_form_example():
    want = 1 - math.sqrt(1 / 3) / (1 - math.sqrt(1 / 6))
    got = overlap_defect(GeometricState(0.5), GeometricState(1 / 3))
    assert got == pytest.approx(want, rel=1e-13)
    assert got == pytest.approx(0.0243, abs=1e-4)
    assert got == pytest.approx(_mp_defect(GeometricState(0.5), GeometricState(1 / 3)), rel=1e-12)


def test_geometric_vs_two_level_expansion():
    # defect = ((sqrt a - sqrt b)^2 + a^2) / 2 + higher order: half the squared
    # root gap plus half the geometric mass beyond the two levels
    for p, x in [(1009, 1013), (10007, 10103), (100003, 100019)]:
        g, t = GeometricState(1 / p), TwoLevelState(1 / x)
        d = overlap_defect(g, t)
        assert d == pytest.approx(_mp_defect(g, t), rel=1e-10)
        lead = 0.5 * ((p ** -0.5 - x ** -0.5) ** 2 + p ** -2.0)
        assert d == pytest.approx(lead, rel=20 / p)


def test_two_level_pair_exact():
    a, b = TwoLevelState(0.2), TwoLevelState(0.6)
    assert overlap_defect(a, b) == pytest.approx(_mp_defect(a, b), rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(ratios, ratios)
def test_closed_form_matches_explicit_sum(a, b):
    g1, g2 = GeometricState(a), GeometricState(b)
    closed, explicit = overlap_defect(g1, g2), explicit_overlap_defect(g1, g2)
    # the analytic tail is ~1e-18, so its rounding leaves up to ~1e-34 when a == b
    assert closed == pytest.approx(explicit, rel=1e-12, abs=1e-32)


@settings(max_examples=200, deadline=None)
@given(ratios, ratios, st.booleans(), st.booleans())
def test_symmetry_and_range(a, b, geo1, geo2):
    s1 = GeometricState(a) if geo1 else TwoLevelState(a)
    s2 = GeometricState(b) if geo2 else TwoLevelState(b)
    d12, d21 = overlap_defect(s1, s2), overlap_defect(s2, s1)
    assert abs(d12 - d21) <= 1e-14
    assert 0.0 <= d12 <= 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.9), st.floats(0.01, 0.9), st.booleans())
def test_explicit_against_high_precision(a, b, mixed):
    s1, s2 = GeometricState(a), (TwoLevelState(b) if mixed else GeometricState(b))
    assert explicit_overlap_defect(s1, s2) == pytest.approx(_mp_defect(s1, s2), rel=1e-11, abs=1e-16)


def test_state_preconditions():
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            GeometricState(bad)
        with pytest.raises(ValueError):
            TwoLevelState(bad)


def test_inequality_examples():
    r = overlap_inequality_check(0.25, 0.25)
    assert r.lhs == 0 and r.rhs == 0 and r.holds
    r = overlap_inequality_check(0.0, 0.5)
    assert r.lhs == pytest.approx(1 - math.sqrt(0.5), rel=1e-15)
    assert r.rhs == pytest.approx(0.5, rel=1e-15)
    assert r.holds


def test_inequality_domain():
    for x, y in [(-0.1, 0.2), (0.6, 0.5), (1.0, 0.0)]:
        with pytest.raises(ValueError):
            overlap_inequality_check(x, y)


def test_inequality_random_grid_no_violations():
    rng = np.random.default_rng(20240601)
    x = rng.random(10 ** 6)
    y = rng.random(10 ** 6) * (1 - x)
    y = np.minimum(y, np.nextafter(1 - x, 0))
    assert overlap_inequality_violations(x, y) == 0


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 0.999), st.floats(0, 1))
def test_inequality_property(x, frac):
    y = frac * (1 - x)
    if x + y >= 1:
        return
    assert overlap_inequality_check(x, y).holds


@pytest.fixture(scope="module")
def witnesses(small_sieve):
    return build_witness_pairs("full_spectrum", 1.0, 0.5, range(3, 14), small_sieve)


def test_criterion_traces_monotone(witnesses):
    for kind in ("sqrt_gap", "overlap", "l1"):
        tr = criterion_sum(witnesses, 1.0, 1.0, kind)
        assert np.all(np.diff(tr.sums) >= 0)
        assert np.all(np.diff(tr.n) > 0)
        assert int(tr.pair_counts.sum()) == len(witnesses)


def test_criterion_sqrt_gap_below_l1(witnesses):
    a = criterion_sum(witnesses, 1.0, 1.0, "sqrt_gap")
    b = criterion_sum(witnesses, 1.0, 1.0, "l1")
    assert np.all(a.sums <= b.sums)


def test_criterion_matches_direct_sum(witnesses):
    tr = criterion_sum(witnesses, 1.0, 1.0, "sqrt_gap", N=8)
    sel = witnesses.level <= 8
    p, q = witnesses.p[sel].astype(float), witnesses.q[sel].astype(float)
    assert tr.n[-1] <= 8
    assert tr.sums[-1] == pytest.approx(math.fsum((p ** -0.5 - q ** -0.5) ** 2), rel=1e-12)


def test_identity_pairing_gives_zero():
    class Identity:
        def __init__(self, p):
            self.p, self.q, self.level = p, p, np.arange(len(p))
    p = PrimeRange(10 ** 4).primes_between(2, 10 ** 4)
    for kind in ("sqrt_gap", "overlap", "l1"):
        assert np.all(criterion_sum(Identity(p), 0.7, 0.7, kind).sums == 0)


def test_criterion_errors(witnesses):
    with pytest.raises(ValueError):
        criterion_sum(witnesses, 1.0, 1.0, "other")

    class Broken:
        p, q, level = np.array([2, 3]), np.array([5]), np.array([1, 1])
    with pytest.raises(ValueError):
        criterion_sum(Broken(), 1.0, 1.0, "l1")


@pytest.mark.parametrize("a,beta", [(3.0, 0.8), (2.5, 0.9)])
def test_power_block_overlap_under_envelope(small_sieve, a, beta):
    B = small_sieve.primes_between(2, 10 ** 7)
    pr = power_block_pairing(B, beta, a)
    assert pr.n.min() == 2
    n = pr.n.astype(float)
    assert np.all((n ** a < pr.p) & (pr.p <= (n + 1) ** a))
    ov = criterion_sum(pr, beta, 0.0, "overlap")
    env = power_envelope(pr, beta, a)
    assert np.array_equal(ov.n, env.n)
    assert np.all(ov.sums <= env.sums)


def test_stretched_pairing_blocks():
    y = LogSequence.stretched(2, 1)
    B = PrimeRange(10 ** 6).primes_between(2, 10 ** 6)
    pr = stretched_block_pairing(B, y, y.monotone_from, 400)
    lx = y.log_values(pr.n)
    lx1 = y.log_values(pr.n + 1)
    lp = np.log(pr.p.astype(float))
    assert np.all((lx < lp) & (lp <= lx1))
    assert np.array_equal(pr.log_x, lx)


def test_trace_csv(witnesses):
    lines = criterion_sum(witnesses, 1.0, 1.0, "l1").to_csv().splitlines()
    assert lines[0] == "n,pairs,truncated_sum"
