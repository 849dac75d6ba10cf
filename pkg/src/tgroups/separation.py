"""Simultaneous-approximation platoons, admissible index sets built from them,
prime liftings of index sets, and the separating-set constructions.

Distances to the nearest integer of products q*t are evaluated with t split
into two 22-bit parts and a remainder, so both leading products are exact
for q <= 2**30 and the absolute error of ||q t|| stays below 2**-40 for
|t| <= 2**10.  Certificates are re-checked in exact rational arithmetic
on the double values of the targets by ``check_certificate``, which shares
no code with the search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, ConfigError, RangeExceeded, VerificationFailed
from .primes import PrimeRange, RealInterval
from .schedules import EpsilonSchedule
from .series import Kernel, SeriesTrace, classify, trace, INCONCLUSIVE, Classification

DIST_ERR = 2.0 ** -40
Q_MAX = 2 ** 30
DEFAULT_BUDGET = 10 ** 7


def fractional_distance(x) -> np.ndarray | float:
    """||x||, the distance from x to the nearest integer."""
    f = np.mod(np.asarray(x, dtype=np.float64), 1.0)
    out = np.minimum(f, 1.0 - f)
    return float(out) if out.ndim == 0 else out


def _split(t: float) -> tuple[float, float, float]:
    """t = hi + mid + lo with hi and mid of at most 22 significant bits."""
    if t == 0 or not math.isfinite(t):
        return t, 0.0, 0.0
    e = math.frexp(t)[1]
    hi = math.ldexp(math.floor(math.ldexp(t, 22 - e)), e - 22)
    r = t - hi
    mid = math.ldexp(math.floor(math.ldexp(r, 44 - e)), e - 44)
    return hi, mid, r - mid


def _frac_product(q: np.ndarray, t: float) -> np.ndarray:
    """{q t} in [0, 1) for integer q <= 2**30."""
    hi, mid, lo = _split(float(t))
    qf = np.asarray(q, dtype=np.float64)
    # q*hi and q*mid are exact (at most 52 significant bits)
    return np.mod(np.mod(qf * hi, 1.0) + np.mod(qf * mid, 1.0) + qf * lo, 1.0)


def product_distance(q: np.ndarray, t: float) -> np.ndarray:
    """||q t|| for integer q <= 2**30 (error below 2**-40 when |t| <= 2**10)."""
    q = np.asarray(q, dtype=np.int64)
    if q.size and q.max() > Q_MAX:
        raise RangeExceeded(f"q = {int(q.max())} exceeds 2**30")
    return fractional_distance(_frac_product(q, t))


# -- platoons --------------------------------------------------------------------

@dataclass
class PlatoonCertificate:
    ell: int
    targets: list[float]
    N0: int
    q: list[int]
    harmonic_sum: float
    max_dist: float
    mode: str

    def to_dict(self) -> dict:
        return {"ell": self.ell, "targets": [repr(t) for t in self.targets], "N0": self.N0, "mode": self.mode,
                "q": list(self.q), "harmonic_sum": self.harmonic_sum, "max_dist": self.max_dist}


def _window(ell: int, k: int, mode: str) -> tuple[Fraction, Fraction]:
    e = ell ** k if mode == "single" else ell
    return Fraction(1, 2 * e), Fraction(1, e)


def check_certificate(cert: PlatoonCertificate) -> list[str]:
    """Exact check of a certificate; returns the list of failed conditions."""
    errs = []
    q = [int(v) for v in cert.q]
    k = len(cert.targets)
    if not q:
        return ["empty platoon"]
    if q[0] < 2 * cert.N0:
        errs.append(f"q_1 = {q[0]} < 2*N0 = {2 * cert.N0}")
    if any(b <= a for a, b in zip(q, q[1:])):
        errs.append("q not strictly increasing")
    lo, hi = _window(cert.ell, k, cert.mode)
    h = sum(Fraction(1, v) for v in q)
    if not (lo < h < hi):
        errs.append(f"harmonic sum {float(h)} outside ({float(lo)}, {float(hi)})")
    # ||q t|| <= sqrt(k)/ell  <=>  (ell ||q t||)^2 <= k, in exact rationals
    for t in cert.targets:
        ft = Fraction(t)
        for v in q:
            x = v * ft
            d = x - math.floor(x)
            d = min(d, 1 - d)
            if (cert.ell * d) ** 2 > k:
                errs.append(f"||{v} * {t!r}|| = {float(d)} exceeds sqrt({k})/{cert.ell}")
    return errs


def _good_mask(q: np.ndarray, targets: Sequence[float], bound: float) -> np.ndarray:
    ok = np.ones(q.shape, dtype=bool)
    for t in targets:
        ok &= product_distance(q, t) <= bound - DIST_ERR
    return ok


def _fit_window(cands: np.ndarray, lo: Fraction, hi: Fraction) -> list[int] | None:
    """Subset of ``cands`` (ascending) with harmonic sum in (lo, hi): add the
    largest q first and skip any term that would overshoot ``hi``."""
    total, out = Fraction(0), []
    for v in cands[::-1]:
        v = int(v)
        nxt = total + Fraction(1, v)
        if nxt < hi:
            total = nxt
            out.append(v)
            if total > lo:
                return sorted(out)
    return None


def _pigeonhole(targets: Sequence[float], ell: int, N0: int, bound: float, budget: int) -> list[int] | None:
    k = len(targets)
    n0 = 4 * N0 * ell ** k + 1
    if n0 > budget:
        raise BudgetExceeded(f"pigeonhole range {n0} exceeds the budget {budget}")
    q = np.arange(1, n0 + 1, dtype=np.int64)
    cell = np.zeros(q.shape, dtype=np.int64)
    for t in targets:
        frac = _frac_product(q, t)
        cell = cell * ell + np.minimum((frac * ell).astype(np.int64), ell - 1)
    counts = np.bincount(cell, minlength=ell ** k)
    order = np.argsort(-counts, kind="stable")
    lo_w, hi_w = _window(ell, k, "single")
    for c in order:
        if counts[c] < 2:
            break
        members = q[cell == c]
        diffs = members[1:] - members[0]
        diffs = diffs[diffs >= 2 * N0]
        diffs = np.unique(diffs[_good_mask(diffs, targets, math.sqrt(k) / ell)])
        got = _fit_window(diffs, lo_w, hi_w)
        if got is not None:
            return got
    return None


def _greedy_scan(targets: Sequence[float], ell: int, start: int, bound: float,
                 lo_w: Fraction, hi_w: Fraction, budget: int) -> list[int]:
    """Scan q = start, start+1, ... and keep admissible q while the harmonic
    sum stays below ``hi_w``; stop once it exceeds ``lo_w``."""
    total, out = Fraction(0), []
    q0, step = start, 4096
    while q0 - start < budget:
        q = np.arange(q0, min(q0 + step, start + budget), dtype=np.int64)
        for v in q[_good_mask(q, targets, bound)]:
            nxt = total + Fraction(1, int(v))
            if nxt < hi_w:
                total = nxt
                out.append(int(v))
                if total > lo_w:
                    return out
        q0 += step
        step = min(step * 2, 1 << 20)
    raise BudgetExceeded(f"no platoon for ell={ell} within the budget of {budget} candidates from q={start}")


def platoon(targets: Sequence[float], ell: int, N0: int, mode: str = "single",
            budget: int = DEFAULT_BUDGET) -> PlatoonCertificate:
    """Integers q_1 < ... with q_1 >= 2 N0, ||q t_s|| <= sqrt(k)/ell and a
    harmonic sum in (1/(2 ell^k), 1/ell^k) (single) or (1/(2 ell), 1/ell)
    (chained).

    Single mode buckets {q t} over q <= 4 N0 ell^k + 1 into ell^k cubes and
    uses differences inside one cube; if that range yields no subset in the
    window, N0 is raised to ell^k + 1 and the bucketing repeated.  Chained mode
    and any remaining failure fall back to a forward scan from 2 N0.  The
    certificate is accepted only after ``check_certificate`` passes.
    """
    targets = [float(t) for t in targets]
    k = len(targets)
    if k < 1:
        raise ValueError("need at least one target")
    if ell < 2 or N0 < 1:
        raise ValueError("need ell >= 2 and N0 >= 1")
    if mode not in ("single", "chained"):
        raise ValueError("mode must be 'single' or 'chained'")
    bound = math.sqrt(k) / ell
    lo_w, hi_w = _window(ell, k, mode)
    q = None
    if mode == "single":
        for n in sorted({N0, max(N0, ell ** k + 1)}):
            try:
                q = _pigeonhole(targets, ell, n, bound, budget)
            except BudgetExceeded:
                q = None
            if q is not None and q[0] >= 2 * N0:
                break
            q = None
    if q is None:
        q = _greedy_scan(targets, ell, 2 * N0, bound, lo_w, hi_w, budget)
    h = math.fsum(1.0 / v for v in q)
    dist = max(float(np.max(product_distance(np.array(q), t))) for t in targets)
    cert = PlatoonCertificate(ell, targets, N0, q, h, dist, mode)
    errs = check_certificate(cert)
    if errs:
        raise VerificationFailed("; ".join(errs))
    return cert


# -- admissible index sets -------------------------------------------------------

def shifted_reciprocal_log(ell: int) -> float:
    """c_ell = 1/log(ell + 1)."""
    return 1.0 / math.log(ell + 1)


@dataclass
class AdmissibleSet:
    A: list[int]
    eps: EpsilonSchedule
    certificates: list[PlatoonCertificate]
    ell_max: int
    truncated: str | None = None


def build_admissible(targets: Sequence[float], c: Callable[[int], float] = shifted_reciprocal_log,
                     ell_range: tuple[int, int] = (2, 12), N0: int = 1, q_limit: int | None = None,
                     budget: int = DEFAULT_BUDGET) -> AdmissibleSet:
    """Union of chained platoons for ell in ``ell_range`` with eps = c_ell on
    platoon ell; each platoon starts above half the previous maximum so the
    union is increasing.  Stops early (recorded) on a budget failure or
    when a platoon would pass ``q_limit``.
    """
    l0, l1 = int(ell_range[0]), int(ell_range[1])
    if l0 < 2 or l1 < l0:
        raise ValueError("ell_range must satisfy 2 <= lo <= hi")
    cs = [c(l) for l in range(l0, l1 + 1)]
    if any(b > a for a, b in zip(cs, cs[1:])):
        raise ValueError("c_ell must be non-increasing")
    if any(l * v < 1 for l, v in zip(range(l0, l1 + 1), cs)):
        raise ValueError("need ell * c_ell >= 1")
    if any(not (0 < v < 1) for v in cs):
        raise ValueError("c_ell must lie in (0, 1)")
    A, certs, truncated, ell_max = [], [], None, l0 - 1
    N = N0
    for ell, cl in zip(range(l0, l1 + 1), cs):
        try:
            cert = platoon(targets, ell, N, "chained", budget)
        except BudgetExceeded as e:
            truncated = f"ell={ell}: {e}"
            break
        if q_limit is not None and cert.q[-1] > q_limit:
            truncated = f"ell={ell}: platoon reaches {cert.q[-1]} > {q_limit}"
            break
        A.extend(cert.q)
        certs.append(cert)
        ell_max = ell
        N = cert.q[-1] // 2 + 1
    table = {q: cl for cert, cl in zip(certs, cs) for q in cert.q}
    return AdmissibleSet(A, EpsilonSchedule.explicit(table), certs, ell_max, truncated)


# -- liftings ----------------------------------------------------------------------

@dataclass
class LiftBlock:
    n: int
    eps: float
    interval: RealInterval
    primes: np.ndarray
    normalized_sum: float


@dataclass
class LiftedSet:
    blocks: list[LiftBlock]
    truncated: list[int] = field(default_factory=list)
    sieve: PrimeRange | None = None

    def block_primes(self, b: LiftBlock) -> np.ndarray:
        return b.primes

    def all_primes(self) -> np.ndarray:
        return np.concatenate([b.primes for b in self.blocks]) if self.blocks else np.zeros(0, np.int64)

    def primes_upto(self, cutoff: float) -> np.ndarray:
        p = self.all_primes()
        return p[p <= cutoff]

    def h(self) -> dict[int, int]:
        return {int(p): b.n for b in self.blocks for p in b.primes}

    def to_dict(self) -> dict:
        return {"schema": "tgroups.lifted/1", "truncated": self.truncated,
                "blocks": [{"n": b.n, "eps": b.eps, "lo": b.interval.lo, "hi": b.interval.hi,
                            "primes": [int(p) for p in b.primes], "normalized_sum": b.normalized_sum}
                           for b in self.blocks]}


def lift(A: Iterable[int], eps, sieve: PrimeRange) -> LiftedSet:
    """Blocks {p : |n - log p| < eps_n} for n in A (ascending).

    ``eps`` is an EpsilonSchedule, a mapping or a callable.  Indices whose
    block passes the sieve limit are dropped and listed in ``truncated``.
    """
    get = eps.value if hasattr(eps, "value") else (eps.__getitem__ if hasattr(eps, "__getitem__") else eps)
    blocks, cut = [], []
    for n in sorted(set(int(v) for v in A)):
        e = float(get(n))
        if not (0 <= e < 0.5):
            raise ValueError(f"eps_{n} = {e} must lie in [0, 1/2) for disjoint blocks")
        iv = RealInterval(math.exp(n - e), math.exp(n + e), "neither")
        if iv.hi > sieve.limit:
            cut.append(n)
            continue
        ps = sieve.primes_in(iv) if e > 0 else np.zeros(0, np.int64)
        if ps.size:
            dev = np.abs(n - np.log(ps.astype(np.float64)))
            if np.any(dev > e * (1 + 1e-12)):
                raise VerificationFailed(f"block {n}: a prime lies outside |n - log p| < eps")
        norm = (n / e) * math.fsum(1.0 / ps.astype(np.float64)) if e > 0 else 0.0
        blocks.append(LiftBlock(n, e, iv, ps, norm))
    return LiftedSet(blocks, cut, sieve)


# -- membership evidence -----------------------------------------------------------

@dataclass
class MembershipScore:
    sup_ratio: float
    head_sup: float
    tail_sup: float


def h_membership_score(t: float, a: float, A: Sequence[int], eps) -> MembershipScore:
    """sup over n in A of ||n t - a|| / eps_n, and the same over each half of A."""
    get = eps.value if hasattr(eps, "value") else (eps.__getitem__ if hasattr(eps, "__getitem__") else eps)
    A = np.array(sorted(set(int(v) for v in A)), dtype=np.int64)
    if A.size == 0:
        return MembershipScore(0.0, 0.0, 0.0)
    d = fractional_distance(product_distance_signed(A, t) - a)
    e = np.array([get(int(n)) for n in A])
    r = np.atleast_1d(d) / e
    h = A.size // 2
    return MembershipScore(float(r.max()), float(r[:max(h, 1)].max()), float(r[h:].max()))


def product_distance_signed(q: np.ndarray, t: float) -> np.ndarray:
    """{q t} (fractional part) with the split product."""
    return _frac_product(q, t)


# -- separating sets ----------------------------------------------------------------

@dataclass
class SeparationInstance:
    """Generators t_1..t_k (t_k = 1), excluded u = sum r_j t_j + u''.

    ``coefficients`` holds (a_j, b_j) for r_j = a_j/b_j.  Independence of
    1, t_1, ..., t_{k-1}, u'' over the rationals is an input contract.
    """

    generators: list[float]
    u: float
    coefficients: list[tuple[int, int]]
    u_irrational: float = 0.0

    def __post_init__(self):
        if not self.generators:
            raise ConfigError("need at least one generator")
        if self.generators[-1] != 1.0:
            raise ConfigError("the last generator must be 1")
        if len(self.coefficients) != len(self.generators):
            raise ConfigError("need one rational coefficient per generator")
        for a, b in self.coefficients:
            if b < 1 or math.gcd(a, b) != 1 or (a == 0 and b != 1):
                raise ConfigError(f"coefficient {a}/{b} is not in lowest terms with b >= 1")
        if self.u_irrational == 0 and all(b == 1 for _, b in self.coefficients):
            raise ConfigError("u lies in the group: all coefficients are integers and u'' = 0")
        recon = sum(a / b * t for (a, b), t in zip(self.coefficients, self.generators)) + self.u_irrational
        if abs(recon - self.u) > 1e-9 * max(1.0, abs(self.u)):
            raise ConfigError(f"decomposition gives {recon!r}, not u = {self.u!r}")


@dataclass
class SeparationLevel:
    ell: int
    c: float
    m0: int
    Q: list[int]
    harmonic_sum: float
    max_bound: float       # max over q in Q of the bounded distances
    limit: float           # C * c_ell
    ok: bool


@dataclass
class SeparationResult:
    B: LiftedSet
    levels: list[SeparationLevel]
    a: float
    s_index: int | None
    C: float
    truncated: str | None
    evidence: dict


def _kronecker(targets: list[tuple[float, float]], bound: float, budget: int) -> int:
    """Smallest m >= 1 with ||m x - y|| < bound for every (x, y)."""
    step, m0 = 1 << 16, 1
    while m0 <= budget:
        m = np.arange(m0, min(m0 + step, budget + 1), dtype=np.int64)
        ok = np.ones(m.shape, dtype=bool)
        for x, y in targets:
            ok &= fractional_distance(product_distance_signed(m, x) - y) < bound
        hit = np.flatnonzero(ok)
        if hit.size:
            return int(m[hit[0]])
        m0 += step
    raise BudgetExceeded(f"no Kronecker shift within the budget {budget} for bound {bound:.4g}")


def separate(inst: SeparationInstance, sieve: PrimeRange, c: Callable[[int], float] = shifted_reciprocal_log,
             ell_start: int | None = None, ell_max: int = 64, budget: int = DEFAULT_BUDGET,
             kernel: Kernel = Kernel(1.0)) -> SeparationResult:
    """Shifted platoons Q_ell = Q0 + m0 with harmonic sums in (1/(4 ell), 1/ell),
    lifted to primes with eps = c_ell, plus series evidence at every generator
    and at u.

    With u'' != 0 the shift targets ||m0 u'' - 1/4|| < c_ell and a = 1/4.
    Otherwise s is the first index with r_s not an integer (the last
    generator included), a = r_s/2 and the shift targets
    ||m0 t_s/b_s - 1/(2 b_s)|| < c_ell.  Levels stop at the first Kronecker
    or platoon budget failure or when the lift would pass the sieve limit.
    """
    k = len(inst.generators)
    gens = inst.generators
    C = 2 + math.sqrt(k) + sum(abs(a) + b for a, b in inst.coefficients[:-1])
    if inst.u_irrational != 0:
        a_shift, s_idx = 0.25, None
        kron = [(inst.u_irrational, 0.25)] + [(gens[j] / inst.coefficients[j][1], 0.0) for j in range(k - 1)]
    else:
        s_idx = next(j for j, (a, b) in enumerate(inst.coefficients) if b != 1)
        a_s, b_s = inst.coefficients[s_idx]
        a_shift = 0.5 * a_s / b_s
        kron = [(gens[s_idx] / b_s, 1.0 / (2 * b_s))]
        kron += [(gens[j] / inst.coefficients[j][1], 0.0) for j in range(k - 1) if j != s_idx]
    q_limit = int(math.floor(math.log(sieve.limit) - 0.5))
    if ell_start is None:
        ell_start = next(l for l in range(2, 10 ** 6) if c(l) < 0.5)
    levels, truncated, prev = [], None, 0
    platoon_targets = [inst.u] + list(gens[:-1])
    for ell in range(ell_start, ell_max + 1):
        cl = c(ell)
        try:
            m0 = _kronecker(kron, cl, budget)
        except BudgetExceeded as e:
            truncated = f"ell={ell}: {e}"
            break
        N = max(prev, m0) // 2 + 1
        try:
            cert = platoon(platoon_targets, ell, N, "chained", budget)
        except BudgetExceeded as e:
            truncated = f"ell={ell}: {e}"
            break
        Q = [q + m0 for q in cert.q]
        if Q[-1] > q_limit:
            truncated = f"ell={ell}: next platoon reaches index {Q[-1]} beyond the sieve range (max {q_limit})"
            break
        qa = np.array(Q, dtype=np.int64)
        dists = [fractional_distance(product_distance_signed(qa, inst.u) - a_shift)]
        for j in range(k - 1):
            target = 0.5 if j == s_idx else 0.0
            dists.append(fractional_distance(product_distance_signed(qa, gens[j]) - target))
        mb = float(max(np.max(np.atleast_1d(d)) for d in dists))
        h = math.fsum(1.0 / v for v in Q)
        ok = (1 / (4 * ell) < h < 1 / ell) and mb <= C * cl
        levels.append(SeparationLevel(ell, cl, m0, Q, h, mb, C * cl, ok))
        prev = Q[-1]
    eps = {q: lv.c for lv in levels for q in lv.Q}
    B = lift(eps.keys(), eps, sieve)
    evidence = {}
    for name, t in [(f"t{j + 1}", g) for j, g in enumerate(gens)] + [("u", inst.u)]:
        tr = trace(kernel, B, t)
        try:
            cls = classify(tr)
        except ValueError as e:
            cls = Classification(INCONCLUSIVE, 0.0, {"reason": str(e)})
        evidence[name] = {"t": t, "trace": tr, "classification": cls}
    return SeparationResult(B, levels, a_shift, s_idx, C, truncated, evidence)


# -- truncation and assembly ---------------------------------------------------------

@dataclass
class TruncationResult:
    primes: np.ndarray
    small_values: dict
    large_values: dict


def _term_matrix(primes: np.ndarray, ts: Sequence[float], kernel: Kernel) -> np.ndarray:
    return np.array([kernel.term(primes, t) for t in ts]).reshape(len(ts), primes.shape[0])


def truncate_separating(I: Sequence[int], A_vals: Sequence[float], B_vals: Sequence[float], m: float,
                        M: float, N: float, kernel: Kernel = Kernel(1.0)) -> TruncationResult:
    """Finite I0 in I with min I0 >= N, f_{I0} < m on A_vals and f_{I0} > M on B_vals.

    The head of I is dropped until the whole remaining tail stays below m on
    A_vals, then primes are added from there until every B value passes M.
    Both conditions are re-evaluated with compensated sums before returning.
    """
    I = np.unique(np.asarray(I, dtype=np.int64))
    I = I[I >= N]
    if I.size == 0:
        raise RangeExceeded("no primes of I at or above N")
    TA = _term_matrix(I, A_vals, kernel) if len(A_vals) else np.zeros((0, I.size))
    TB = _term_matrix(I, B_vals, kernel) if len(B_vals) else np.zeros((0, I.size))
    # suffix sums of A terms: tail[j] = sum_{i >= j}
    tail = np.cumsum(TA[:, ::-1], axis=1)[:, ::-1] if TA.shape[0] else np.zeros((0, I.size))
    start = 0
    if tail.shape[0]:
        ok = np.all(tail < m, axis=0)
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            raise RangeExceeded(f"tails on A_vals never drop below m={m} inside the supplied set")
        start = int(idx[0])
    if TB.shape[0]:
        run = np.cumsum(TB[:, start:], axis=1)
        good = np.flatnonzero(np.all(run > M, axis=0))
        if good.size == 0:
            best = {repr(float(t)): float(run[i, -1]) if run.shape[1] else 0.0 for i, t in enumerate(B_vals)}
            raise RangeExceeded(f"cannot reach M={M} on B_vals with primes from {int(I[start])}: achieved {best}")
        end = start + int(good[0]) + 1
    else:
        end = start + 1
    I0 = I[start:end]
    small = {repr(float(t)): kernel.sum(I0, t) for t in A_vals}
    large = {repr(float(t)): kernel.sum(I0, t) for t in B_vals}
    if any(v >= m for v in small.values()) or any(v <= M for v in large.values()):
        raise VerificationFailed(f"direct evaluation disagrees: small={small}, large={large}")
    return TruncationResult(I0, small, large)


@dataclass
class AssemblyLevel:
    index: int
    primes: np.ndarray
    small_values: dict
    large_values: dict


def assemble_separator(levels: Sequence[tuple[Sequence[float], Sequence[float], Sequence[int]]],
                       kernel: Kernel = Kernel(1.0), M: float = 1.0) -> tuple[np.ndarray, list[AssemblyLevel]]:
    """Union of truncated sets I_n with sup I_n < inf I_{n+1}.

    ``levels[n-1]`` is (S_n, Sigma_n, candidate primes) and level n must give
    f < 1/n^2 on S_n and f > M on Sigma_n.  A failing level raises with its
    index.
    """
    out, done, floor = [], [], 2
    for i, (S, Sig, cand) in enumerate(levels, start=1):
        try:
            res = truncate_separating(cand, S, Sig, 1.0 / i ** 2, M, floor, kernel)
        except (RangeExceeded, VerificationFailed) as e:
            raise type(e)(f"level {i}: {e}") from e
        out.append(res.primes)
        done.append(AssemblyLevel(i, res.primes, res.small_values, res.large_values))
        floor = int(res.primes[-1]) + 1
    B = np.concatenate(out) if out else np.zeros(0, np.int64)
    return B, done
