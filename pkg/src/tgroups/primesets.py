"""Prime block families, witness pairs and density diagnostics.

A family is a list of blocks B_n = primes in an interval with log-endpoints
(n + a)/scale and (n + a + eps_n)/scale, where scale is t0 (``unit``) or
beta*t0 (``beta_scaled``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _accel
from .errors import RangeExceeded
from .primes import PrimeRange, RealInterval
from .schedules import EpsilonSchedule

STORE_LIMIT = 10 ** 6


@dataclass(frozen=True)
class BlockSpec:
    """Parameters of a block family.

    ``closed`` defaults to "right" ((lo, hi]) for the unit scale and "left"
    ([lo, hi)) for the beta-scaled one.  ``beta0`` is carried along for
    reporting only; it does not change the blocks.
    """

    beta: float
    t0: float
    a: float
    schedule: EpsilonSchedule
    exponent_scale: str = "unit"
    closed: str | None = None
    beta0: float | None = None

    def __post_init__(self):
        if not (0 < self.beta <= 1):
            raise ValueError("beta must lie in (0, 1]")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if self.exponent_scale not in ("unit", "beta_scaled"):
            raise ValueError("exponent_scale must be 'unit' or 'beta_scaled'")
        if self.closed is None:
            object.__setattr__(self, "closed", "right" if self.exponent_scale == "unit" else "left")

    @property
    def scale(self) -> float:
        return self.t0 if self.exponent_scale == "unit" else self.beta * self.t0

    def interval(self, n: int, eps: float) -> RealInterval:
        lo = math.exp((n + self.a) / self.scale)
        hi = math.exp((n + self.a + eps) / self.scale)
        return RealInterval(lo, hi, self.closed)

    def to_dict(self) -> dict:
        sched = self.schedule
        d = {"beta": self.beta, "t0": self.t0, "a": self.a, "exponent_scale": self.exponent_scale,
             "closed": self.closed, "schedule": {"kind": sched.kind, "beta": sched.beta, "t0": sched.t0,
                                                 "domain_start": sched.domain_start}}
        if self.beta0 is not None:
            d["beta0"] = self.beta0
        return d


@dataclass
class Block:
    n: int
    eps: float
    interval: RealInterval
    count: int
    reciprocal_sum: float
    primes: np.ndarray | None = None


@dataclass
class PrimeBlockFamily:
    spec: BlockSpec
    blocks: list[Block]
    sieve: PrimeRange | None = field(default=None, repr=False)

    def block_primes(self, b: Block) -> np.ndarray:
        if b.primes is not None:
            return b.primes
        if self.sieve is None:
            raise ValueError(f"block n={b.n} keeps only a summary and no sieve is attached")
        return self.sieve.primes_in(b.interval)

    def primes_upto(self, cutoff: float) -> np.ndarray:
        parts = []
        for b in self.blocks:
            if b.interval.integer_bounds()[0] > cutoff:
                break
            p = self.block_primes(b)
            parts.append(p[p <= cutoff])
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def all_primes(self) -> np.ndarray:
        parts = [self.block_primes(b) for b in self.blocks]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "schema": "tgroups.family/1",
            "spec": self.spec.to_dict(),
            "blocks": [{"n": b.n, "eps": b.eps, "lo": b.interval.lo, "hi": b.interval.hi,
                        "closed": b.interval.closed, "count": b.count,
                        "reciprocal_sum": b.reciprocal_sum} for b in self.blocks],
        }


def build_family(spec: BlockSpec, n_range: Iterable[int], sieve: PrimeRange,
                 store_limit: int = STORE_LIMIT) -> PrimeBlockFamily:
    """Blocks for every n in ``n_range`` with eps_n < beta*t0 (and eps_n < 1 so
    that consecutive blocks stay disjoint).  Empty blocks are kept."""
    blocks: list[Block] = []
    for n in sorted(set(int(n) for n in n_range)):
        eps = spec.schedule.value(n)
        if not (eps < spec.beta * spec.t0 and eps < 1):
            continue
        iv = spec.interval(n, max(eps, 0.0))
        if iv.hi > sieve.limit:
            raise RangeExceeded(f"block n={n} reaches {iv.hi:.6g}, beyond the sieve limit {sieve.limit}")
        primes = sieve.primes_in(iv)
        rsum = _accel.power_sum(primes, spec.beta)
        blocks.append(Block(n, eps, iv, int(primes.shape[0]), rsum,
                            primes if primes.shape[0] <= store_limit else None))
    for b0, b1 in zip(blocks, blocks[1:]):
        if b0.interval.integer_bounds()[1] >= b1.interval.integer_bounds()[0]:
            raise ValueError(f"blocks n={b0.n} and n={b1.n} overlap")
    return PrimeBlockFamily(spec, blocks, sieve)


def normalized_block_sums(fam: PrimeBlockFamily) -> list[dict]:
    """(n/eps_n) * sum over the block of 1/p (unit scale, beta = 1)."""
    if fam.spec.beta != 1 or fam.spec.exponent_scale != "unit":
        raise ValueError("normalized block sums need beta = 1 and the unit exponent scale")
    out = []
    for b in fam.blocks:
        v = 0.0 if b.count == 0 else (b.n / b.eps) * b.reciprocal_sum
        out.append({"n": b.n, "value": v})
    return out


def density_profile(fam: PrimeBlockFamily, sieve: PrimeRange) -> list[dict]:
    """Share of all primes up to hi_n that lie in blocks with index <= n."""
    out, total = [], 0
    for b in fam.blocks:
        total += b.count
        denom = sieve.count_primes(b.interval.hi)
        out.append({"n": b.n, "cumulative_density": total / denom if denom else 0.0})
    return out


def short_interval_ratio(sieve: PrimeRange, n: int, eps: float, t: float = 1.0, a: float = 0.0) -> float:
    """(pi(e^{(n+a+eps)/t}) - pi(e^{(n+a)/t})) / (e^{n/t} eps / n); tends to e^{a/t}
    when n*eps_n -> inf and eps_n -> 0."""
    if not (eps > 0 and t > 0 and n >= 1):
        raise ValueError("need eps > 0, t > 0 and n >= 1")
    hi = math.exp((n + a + eps) / t)
    if hi > sieve.limit:
        raise RangeExceeded(f"e^((n+a+eps)/t)={hi:.6g} exceeds the sieve limit {sieve.limit}")
    count = sieve.count_in(RealInterval(math.exp((n + a) / t), hi, "right"))
    return count / (math.exp(n / t) * eps / n)


def short_interval_profile(sieve: PrimeRange, sched: EpsilonSchedule, n_range: Iterable[int],
                           t: float = 1.0, a: float = 0.0) -> list[dict]:
    return [{"n": int(n), "eps": sched.value(n), "ratio": short_interval_ratio(sieve, n, sched.value(n), t, a),
             "limit": math.exp(a / t)} for n in n_range]


# -- witness pairs --------------------------------------------------------------

@dataclass
class WitnessPairs:
    """Prime pairs whose ratio (p/q)**beta approaches ``target``.

    ``lower``/``upper`` hold each pair's enclosure of (p/q)**beta, and
    ``level`` the block index that produced it.
    """

    kind: str
    beta: float
    target: float
    p: np.ndarray
    q: np.ndarray
    level: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    skipped: list[dict] = field(default_factory=list)
    levels: list[dict] = field(default_factory=list)

    @property
    def ratio(self) -> np.ndarray:
        return (self.p.astype(np.float64) / self.q.astype(np.float64)) ** self.beta

    def __len__(self) -> int:
        return int(self.p.shape[0])

    def inside(self) -> np.ndarray:
        r = self.ratio
        return (self.lower < r) & (r < self.upper)

    def to_dict(self, max_pairs: int | None = None) -> dict:
        m = len(self) if max_pairs is None else min(len(self), max_pairs)
        r = self.ratio
        return {
            "schema": "tgroups.witnesses/1", "kind": self.kind, "beta": self.beta, "target": self.target,
            "pair_count": len(self), "levels": self.levels, "skipped": self.skipped,
            "pairs": [{"p": int(self.p[i]), "q": int(self.q[i]), "n": int(self.level[i]),
                       "ratio": float(r[i]), "lower": float(self.lower[i]), "upper": float(self.upper[i])}
                      for i in range(m)],
        }


def _pair_up(p_all: np.ndarray, q_all: np.ndarray, used: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # at small n neighbouring blocks can overlap; never reuse a prime
    if used.size:
        p_all = p_all[~np.isin(p_all, used)]
        q_all = q_all[~np.isin(q_all, used)]
    q_all = q_all[~np.isin(q_all, p_all)]
    k = min(p_all.shape[0], q_all.shape[0])
    return p_all[:k], q_all[:k]


def _still_relevant(used: np.ndarray, p: np.ndarray, q: np.ndarray, floor: float) -> np.ndarray:
    out = np.concatenate([used, p, q])
    return out[out > floor]


def build_witness_pairs(kind: str, beta: float, lam: float, n_range: Iterable[int],
                        sieve: PrimeRange) -> WitnessPairs:
    """Disjoint prime pairs for the ratio-set constructions.

    powers: blocks [e^{(n+1/2)/(beta t0)}, e^{(n+1/2+eps_n)/(beta t0)}) with
    eps_n = (log n)^-1 exp(-(1-beta)n/(3 beta t0)) and 2 t0 log lam = -1;
    p runs over B_{2n+1}, q over B_{2n}; target lam^-2.

    full_spectrum: a = log lam, eps_n = 1/log n, blocks
    (e^{(n+a)/beta}, e^{(n+a+eps_n)/beta}] for p and the same with a = 0 for q;
    target lam.

    Matching takes the first k primes of each block (k the smaller size,
    after removing primes already used by earlier levels) and pairs them in
    ascending order.  Levels where a side is empty are skipped and recorded.
    """
    if not (0 < lam < 1):
        raise ValueError("lambda must lie in (0, 1)")
    if not (0 < beta <= 1):
        raise ValueError("beta must lie in (0, 1]")
    ps, qs, lv, lows, ups, skipped, levels = [], [], [], [], [], [], []
    used = np.zeros(0, dtype=np.int64)
    if kind == "powers":
        t0 = -1.0 / (2.0 * math.log(lam))
        sched = EpsilonSchedule.beta_damped(beta, t0)
        spec = BlockSpec(beta, t0, 0.5, sched, "beta_scaled")
        target = lam ** -2
        for n in sorted(set(int(n) for n in n_range)):
            n_p, n_q = 2 * n + 1, 2 * n
            if n_q < sched.domain_start:
                continue
            e_p, e_q = sched.value(n_p), sched.value(n_q)
            if not (max(e_p, e_q) < min(beta * t0, 1.0)):
                skipped.append({"n": n, "reason": "eps not below beta*t0"})
                continue
            iv_p, iv_q = spec.interval(n_p, e_p), spec.interval(n_q, e_q)
            if iv_p.hi > sieve.limit:
                raise RangeExceeded(f"level n={n} reaches {iv_p.hi:.6g}, beyond the sieve limit {sieve.limit}")
            p, q = _pair_up(sieve.primes_in(iv_p), sieve.primes_in(iv_q), used)
            # beta log p in [(n_p+1/2)/t0, (n_p+1/2+e_p)/t0), same for q
            lo = math.exp((1.0 - e_q) / t0)
            hi = math.exp((1.0 + e_p) / t0)
            if p.size == 0:
                skipped.append({"n": n, "reason": "empty block"})
                continue
            ps.append(p); qs.append(q); lv.append(np.full(p.size, n, np.int64))
            lows.append(np.full(p.size, lo)); ups.append(np.full(p.size, hi))
            levels.append({"n": n, "pairs": int(p.size), "eps": e_q, "lower": lo, "upper": hi})
            used = _still_relevant(used, p, q, iv_q.lo)
    elif kind == "full_spectrum":
        a = math.log(lam)
        target = lam
        for n in sorted(set(int(n) for n in n_range)):
            if n < 2:
                continue
            eps = 1.0 / math.log(n)
            iv_p = RealInterval(math.exp((n + a) / beta), math.exp((n + a + eps) / beta))
            iv_q = RealInterval(math.exp(n / beta), math.exp((n + eps) / beta))
            if iv_q.hi > sieve.limit:
                raise RangeExceeded(f"level n={n} reaches {iv_q.hi:.6g}, beyond the sieve limit {sieve.limit}")
            p, q = _pair_up(sieve.primes_in(iv_p), sieve.primes_in(iv_q), used)
            if p.size == 0:
                skipped.append({"n": n, "reason": "empty block"})
                continue
            lo, hi = math.exp(a - eps), math.exp(a + eps)
            ps.append(p); qs.append(q); lv.append(np.full(p.size, n, np.int64))
            lows.append(np.full(p.size, lo)); ups.append(np.full(p.size, hi))
            levels.append({"n": n, "pairs": int(p.size), "eps": eps, "lower": lo, "upper": hi})
            used = _still_relevant(used, p, q, iv_p.lo)
    else:
        raise ValueError(f"unknown witness kind {kind!r}")

    def cat(xs, dt):
        return np.concatenate(xs) if xs else np.zeros(0, dtype=dt)

    return WitnessPairs(kind, beta, target, cat(ps, np.int64), cat(qs, np.int64), cat(lv, np.int64),
                        cat(lows, np.float64), cat(ups, np.float64), skipped, levels)
