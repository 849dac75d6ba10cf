"""Divisors (non-decreasing unbounded sequences stored as a strictly increasing
base with multiplicities), their reciprocal gaps, and the constructions that
move between divisors and prime sets.

All large quantities are kept as logarithms; a value is exponentiated only
when the result is representable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import RangeExceeded, Unsupported
from .primes import PrimeRange, RealInterval
from .schedules import LogSequence

C0 = 0.535
SNAP = 1e-12  # relative distance to an integer below which a product is treated as that integer


def _rle(m: Sequence[int]) -> list[list[int]]:
    out: list[list[int]] = []
    for v in m:
        v = int(v)
        if out and out[-1][0] == v:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return out


def _unrle(runs) -> np.ndarray:
    return np.concatenate([np.full(int(c), int(v), dtype=np.int64) for v, c in runs]) if runs else np.zeros(0, np.int64)


@dataclass
class Divisor:
    """a'_n with multiplicity m_n for n = domain_start, domain_start + 1, ...

    ``base`` is a LogSequence or an explicit strictly increasing array of
    values a'_n (entry 0 is the value at ``domain_start``).
    """

    base: object
    multiplicities: np.ndarray
    domain_start: int

    def __post_init__(self):
        self.multiplicities = np.asarray(self.multiplicities, dtype=np.int64)
        if self.multiplicities.ndim != 1:
            raise ValueError("multiplicities must be one-dimensional")
        if np.any(self.multiplicities < 1):
            raise ValueError("multiplicities must be >= 1")
        if not isinstance(self.base, LogSequence):
            vals = np.asarray(self.base, dtype=np.float64)
            if vals.shape[0] < self.multiplicities.shape[0]:
                raise ValueError("explicit base shorter than the multiplicities")
            if np.any(np.diff(vals) <= 0) or np.any(vals <= 0):
                raise ValueError("explicit base must be positive and strictly increasing")
            self.base = vals
        elif self.domain_start < self.base.domain_start:
            raise ValueError("divisor starts below the base sequence domain")

    @property
    def last_index(self) -> int:
        return self.domain_start + len(self.multiplicities) - 1

    def indices(self, N: int | None = None) -> np.ndarray:
        hi = self.last_index if N is None else N
        if hi > self.last_index:
            raise RangeExceeded(f"divisor defined up to n={self.last_index}, asked for {hi}")
        return np.arange(self.domain_start, hi + 1)

    def log_values(self, N: int | None = None) -> np.ndarray:
        ns = self.indices(N)
        if isinstance(self.base, LogSequence):
            return self.base.log_values(ns)
        return np.log(self.base[ns - self.domain_start])

    def reciprocals(self, N: int | None = None) -> np.ndarray:
        ns = self.indices(N)
        if isinstance(self.base, LogSequence):
            return np.exp(-self.base.log_values(ns))
        return 1.0 / self.base[ns - self.domain_start]

    def expanded_reciprocals(self, N: int | None = None) -> np.ndarray:
        """1/a_n with each term repeated m_n times."""
        ns = self.indices(N)
        return np.repeat(self.reciprocals(N), self.multiplicities[ns - self.domain_start])

    def to_dict(self) -> dict:
        if isinstance(self.base, LogSequence):
            base = {"kind": self.base.kind, "c": self.base.c, "s": self.base.s, "a": self.base.a,
                    "domain_start": self.base.domain_start}
        else:
            base = {"kind": "explicit", "values": [float(v) for v in self.base]}
        return {"schema": "tgroups.divisor/1", "base": base, "domain_start": self.domain_start,
                "multiplicities_rle": _rle(self.multiplicities)}

    @classmethod
    def from_dict(cls, d: dict) -> "Divisor":
        if d.get("schema") != "tgroups.divisor/1":
            raise ValueError("not a tgroups divisor record")
        b = d["base"]
        if b["kind"] == "explicit":
            base = np.asarray(b["values"], dtype=np.float64)
        else:
            base = LogSequence(b["kind"], c=b["c"], s=b["s"], a=b["a"], domain_start=b["domain_start"])
        return cls(base, _unrle(d["multiplicities_rle"]), int(d["domain_start"]))


def prime_divisor(primes: Sequence[int]) -> Divisor:
    """The strictly increasing prime sequence itself, multiplicity 1."""
    p = np.unique(np.asarray(primes, dtype=np.int64)).astype(np.float64)
    return Divisor(p, np.ones(p.shape[0], dtype=np.int64), 1)


def equivalence_gap(a: Divisor, b: Divisor, pairing: Sequence[int] | None = None,
                    N: int | None = None) -> float:
    """sum_i |1/a_i - 1/b_phi(i)| over the expanded terms of ``a`` up to index N.

    ``pairing[i]`` is the expanded position in ``b`` matched with expanded
    position i of ``a``; None means the identity on positions.
    """
    ra = a.expanded_reciprocals(N)
    rb = b.expanded_reciprocals()
    if pairing is None:
        phi = np.arange(ra.shape[0])
    else:
        phi = np.asarray(pairing, dtype=np.int64)
        if phi.shape[0] < ra.shape[0]:
            raise ValueError(f"pairing is not total: {phi.shape[0]} entries for {ra.shape[0]} terms")
        phi = phi[:ra.shape[0]]
        if np.unique(phi).shape[0] != phi.shape[0]:
            raise ValueError("pairing is not injective")
    if phi.size and (phi.min() < 0 or phi.max() >= rb.shape[0]):
        raise ValueError("pairing is not total: target positions outside the second divisor")
    return math.fsum(np.abs(ra - rb[phi]))


def inverse_pairing(pairing: Sequence[int]) -> np.ndarray:
    phi = np.asarray(pairing, dtype=np.int64)
    inv = np.empty_like(phi)
    inv[phi] = np.arange(phi.shape[0])
    return inv


# -- extracting a divisor from primes ------------------------------------------

@dataclass
class PrincipalReport:
    divisor: Divisor
    primes: np.ndarray            # B restricted to the blocks, plus padding primes
    block_of: np.ndarray          # block index of each prime
    padded: list[int]
    defects: list[int]
    outside: int                  # primes of B outside every block
    gap: float
    growth_constant: float        # realized sup (x_{n+1} - x_n)/x_n * (log log x_n)^s
    proof_constant: float         # realized c_1 in 1/x_n - 1/p <= c_1/(p (log log p)^s)
    proof_bound: float            # c_1 * sum 1/(p (log log p)^s)
    s: float

    @property
    def flagged(self) -> bool:
        return bool(self.padded) and len(self.padded) == len(self.divisor.multiplicities)


def _block_edges(x: LogSequence, n_lo: int, n_hi: int) -> np.ndarray:
    return x.log_values(np.arange(n_lo, n_hi + 2))


def principal_from_primes(x: LogSequence, B: Sequence[int], sieve: PrimeRange,
                          n_range: tuple[int, int] | None = None, s: float | None = None,
                          c: float | None = None) -> PrincipalReport:
    """Blocks (x_n, x_{n+1}] with m_n = |B in block|, empty blocks padded.

    ``s`` defaults to the sequence's own s (2 for power sequences).  The
    growth condition (x_{n+1}-x_n)/x_n < c/(log log x_n)^s is checked on the
    realized range; with ``c=None`` the realized constant is recorded.
    """
    B = np.unique(np.asarray(B, dtype=np.int64))
    s = float(x.s if s is None else s)
    if n_range is None:
        n_lo = x.monotone_from
        top = int(B[-1]) if B.size else n_lo
        n_hi = max(n_lo, x.first_index_above(top) - 1)
    else:
        n_lo, n_hi = int(n_range[0]), int(n_range[1])
    if n_lo < x.monotone_from:
        raise ValueError(f"blocks must start at n >= {x.monotone_from} where the sequence increases")
    lx = _block_edges(x, n_lo, n_hi)
    if lx[0] <= 1.0:
        raise ValueError("growth condition needs x_n > e on the whole range")
    if math.exp(lx[-1]) > sieve.limit:
        raise RangeExceeded(f"x_{n_hi + 1} = {math.exp(lx[-1]):.6g} exceeds the sieve limit {sieve.limit}")
    ratios = np.expm1(np.diff(lx)) * np.log(lx[:-1]) ** s
    growth = float(ratios.max())
    if c is not None and not growth < c:
        raise ValueError(f"growth condition fails: realized constant {growth:.6g} >= c = {c}")

    m = np.zeros(n_hi - n_lo + 1, dtype=np.int64)
    per_block: list[np.ndarray] = []
    padded, defects = [], []
    in_blocks = 0
    for j in range(n_hi - n_lo + 1):
        iv = RealInterval(math.exp(lx[j]), math.exp(lx[j + 1]))
        a, b = iv.integer_bounds()
        lo_i, hi_i = np.searchsorted(B, a, side="left"), np.searchsorted(B, b, side="right")
        blk = B[lo_i:hi_i]
        in_blocks += blk.size
        if blk.size == 0:
            pad = sieve.primes_in(iv)[:1]
            if pad.size:
                padded.append(n_lo + j)
            else:
                defects.append(n_lo + j)
            blk = pad
        per_block.append(blk)
        m[j] = max(blk.size, 1)
    outside = int(B.size - in_blocks)
    primes = np.concatenate(per_block) if per_block else np.zeros(0, np.int64)
    block_of = np.concatenate([np.full(b.size, n_lo + j, np.int64) for j, b in enumerate(per_block)]) \
        if per_block else np.zeros(0, np.int64)
    div = Divisor(x, m, n_lo)

    lxn = lx[block_of - n_lo]
    pf = primes.astype(np.float64)
    diffs = np.exp(-lxn) - 1.0 / pf
    gap = math.fsum(np.abs(diffs))
    llp = np.log(np.log(pf))
    c1 = float(np.max(np.abs(diffs) * pf * llp ** s)) if pf.size else 0.0
    bound = c1 * math.fsum(1.0 / (pf * llp ** s)) if pf.size else 0.0
    return PrincipalReport(div, primes, block_of, padded, defects, outside, gap, growth, c1, bound, s)


# -- lifting multiplicities to primes -------------------------------------------

@dataclass
class LiftReport:
    n: np.ndarray
    requested: np.ndarray
    chosen: list[np.ndarray]
    available: np.ndarray
    shortfalls: list[dict]
    feasible_from: int | None

    @property
    def primes(self) -> np.ndarray:
        return np.concatenate(self.chosen) if self.chosen else np.zeros(0, np.int64)

    @property
    def shortfall_rate(self) -> float:
        return len(self.shortfalls) / len(self.n) if len(self.n) else 0.0


def lifting_bound(y: LogSequence, n: int) -> float:
    """log of c y_n / (2 log y_n (log log y_n)^s)."""
    L = y.log_value(n)
    return math.log(y.c / 2.0) + L - math.log(L) - y.s * math.log(math.log(L))


def lift_to_primes(y: LogSequence, m: Sequence[int], n_range: tuple[int, int], sieve: PrimeRange) -> LiftReport:
    """B_n = the first m_n primes of (y_n, y_{n+1}]; shortfalls are reported per block."""
    if y.kind != "stretched":
        raise Unsupported("lift_to_primes expects a stretched sequence")
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    m = np.asarray(m, dtype=np.int64)
    if m.shape[0] != n_hi - n_lo + 1:
        raise ValueError("need one multiplicity per index in n_range")
    if np.any(m < 1):
        raise ValueError("multiplicities must be >= 1")
    lx = _block_edges(y, n_lo, n_hi)
    if math.exp(lx[-1]) > sieve.limit:
        raise RangeExceeded(f"y_{n_hi + 1} = {math.exp(lx[-1]):.6g} exceeds the sieve limit {sieve.limit}")
    chosen, avail, short = [], np.zeros_like(m), []
    for j in range(len(m)):
        iv = RealInterval(math.exp(lx[j]), math.exp(lx[j + 1]))
        avail[j] = sieve.count_in(iv)
        a, _ = iv.integer_bounds()
        take = int(min(m[j], avail[j]))
        chosen.append(_first_primes_from(sieve, a, take, iv))
        if avail[j] < m[j]:
            short.append({"n": n_lo + j, "requested": int(m[j]), "available": int(avail[j])})
    ns = np.arange(n_lo, n_hi + 1)
    bad = [d["n"] for d in short]
    feasible = (max(bad) + 1 if bad else n_lo)
    return LiftReport(ns, m, chosen, avail, short, feasible if feasible <= n_hi else None)


def _first_primes_from(sieve: PrimeRange, a: int, k: int, iv: RealInterval) -> np.ndarray:
    if k == 0:
        return np.zeros(0, np.int64)
    _, b = iv.integer_bounds()
    width = max(64, 32 * k)
    out = np.zeros(0, np.int64)
    lo = a
    while out.size < k and lo <= b:
        hi = min(b, lo + width)
        out = np.concatenate([out, sieve.primes_between(lo, hi)])
        lo, width = hi + 1, width * 2
    return out[:k]


# -- perturbing multiplicities ----------------------------------------------------

@dataclass
class PerturbReport:
    M: float
    gap: float
    envelope: float
    holds: bool


def perturb_multiplicities(y: LogSequence, r: Sequence[int], s_mult: Sequence[int],
                           n_range: tuple[int, int]) -> PerturbReport:
    """Compare the gap sum |r_n - s_n|/y_n with M sum 1/(log y_n (log log y_n)^(s+2))."""
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    ns = np.arange(n_lo, n_hi + 1)
    r, sm = np.asarray(r, dtype=np.int64), np.asarray(s_mult, dtype=np.int64)
    if r.shape != ns.shape or sm.shape != ns.shape:
        raise ValueError("need one multiplicity per index in n_range")
    L = y.log_values(ns)
    if np.any(L <= 1.0):
        raise ValueError("needs y_n > e on the whole range")
    diff = np.abs(r - sm).astype(np.float64)
    w = 1.0 / (L * np.log(L) ** (y.s + 2))
    with np.errstate(divide="ignore"):
        ldiff = np.log(diff)
    ratio = np.where(diff > 0, np.exp(ldiff - L) / w, 0.0)
    M = float(ratio.max()) if ratio.size else 0.0
    gap = math.fsum(np.where(diff > 0, np.exp(ldiff - L), 0.0))
    env = M * math.fsum(w)
    return PerturbReport(M, gap, env, gap <= env * (1 + 1e-12))


# -- homothety ---------------------------------------------------------------------

@dataclass
class HomothetyReport:
    z: LogSequence
    n: np.ndarray
    log_scaled: np.ndarray          # log(m_n z_n / y_n)
    multiplicities: list            # int, or None where unrepresentable
    zeros: list[int]
    unrepresentable: list[int]


def scale_multiplicities(m: Sequence[int], log_factor: Sequence[float] | float) -> tuple[list, np.ndarray]:
    """floor(m_n * exp(log_factor_n)), snapping products within SNAP of an integer."""
    m = np.asarray(m, dtype=np.int64)
    lf = np.broadcast_to(np.asarray(log_factor, dtype=np.float64), m.shape)
    with np.errstate(divide="ignore"):
        logs = np.log(m.astype(np.float64)) + lf
    out = []
    for mi, f, lg in zip(m, lf, logs):
        if lg > 700:
            out.append(None)
            continue
        v = float(mi) * math.exp(f)
        k = round(v)
        if abs(v - k) <= SNAP * max(1.0, abs(v)):
            out.append(int(k))
        else:
            out.append(int(math.floor(v)))
    return out, logs


def homothety_rescale(y: LogSequence, m: Sequence[int], lam: float, n_range: tuple[int, int]) -> HomothetyReport:
    """z with z_n^lam = y_n and m'_n = floor(m_n z_n / y_n)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    ns = np.arange(n_lo, n_hi + 1)
    if y.kind == "stretched":
        z = LogSequence.stretched(y.s, y.c / lam, domain_start=y.domain_start)
    else:
        z = LogSequence.power(y.a / lam, domain_start=y.domain_start)
    ly = y.log_values(ns)
    lz = ly / lam if lam != 1 else ly
    out, logs = scale_multiplicities(m, lz - ly)
    zeros = [int(n) for n, v in zip(ns, out) if v == 0]
    unrep = [int(n) for n, v in zip(ns, out) if v is None]
    return HomothetyReport(z, ns, logs, out, zeros, unrep)


def scale_down(m: Sequence[int], lam: float, c2: float) -> list[int]:
    """m''_n = floor(m'_n / (3 lam c2)) for a user-chosen constant c2 > 0.

    The constant is not determined by the construction; this step only
    rescales multiplicities so that the lifting bound can be met.
    """
    if not (lam > 0 and c2 > 0):
        raise ValueError("lambda and c2 must be positive")
    d = 3.0 * lam * c2
    return [int(math.floor(int(v) / d)) for v in m]


# -- polynomial-scale blocks -----------------------------------------------------

def _power_block_index(p: np.ndarray, a: float) -> np.ndarray:
    n = np.floor(np.exp(np.log(p.astype(np.float64)) / a)).astype(np.int64)
    n = np.where(n.astype(np.float64) ** a >= p, n - 1, n)
    return np.where((n + 1).astype(np.float64) ** a < p, n + 1, n)


@dataclass
class PowerDivisorReport:
    divisor: Divisor
    primes: np.ndarray
    block_of: np.ndarray
    padded: list[int]
    gap: float
    envelope: float          # sum p^-(beta + 1/a) over the same primes
    constant: float          # realized c_2 with |p^-beta - n^-(beta a)| <= c_2 p^-(beta + 1/a)


def power_divisor_from_primes(B: Sequence[int], beta: float, a: float, sieve: PrimeRange,
                              n_range: tuple[int, int]) -> PowerDivisorReport:
    """Blocks (n^a, (n+1)^a]: {p^beta : p in B} against n^(beta a) with m_n = |B_n|.

    Requires beta in (1/2, 1), a > 2 and beta a > a - 1 (strict).
    """
    if not (0.5 < beta < 1):
        raise ValueError("beta must lie in (1/2, 1)")
    if not (a > 2 and beta * a > a - 1):
        raise ValueError("need a > 2 and beta*a > a - 1")
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    if n_lo < 1:
        raise ValueError("blocks start at n >= 1")
    if (n_hi + 1) ** a > sieve.limit:
        raise RangeExceeded(f"(n+1)^a = {(n_hi + 1) ** a:.6g} exceeds the sieve limit {sieve.limit}")
    B = np.unique(np.asarray(B, dtype=np.int64))
    nb = _power_block_index(B, a)
    per, padded = [], []
    for n in range(n_lo, n_hi + 1):
        blk = B[nb == n]
        if blk.size == 0:
            blk = sieve.primes_in(RealInterval(float(n) ** a, float(n + 1) ** a))[:1]
            if blk.size:
                padded.append(n)
        per.append(blk)
    m = np.array([max(1, b.size) for b in per], dtype=np.int64)
    primes = np.concatenate(per)
    block_of = np.concatenate([np.full(b.size, n_lo + j, np.int64) for j, b in enumerate(per)])
    lp = np.log(primes.astype(np.float64))
    terms = np.abs(np.exp(-beta * lp) - np.exp(-beta * a * np.log(block_of.astype(np.float64))))
    env_terms = np.exp(-(beta + 1.0 / a) * lp)
    if n_lo >= 2:
        base = LogSequence.power(beta * a, domain_start=n_lo)
    else:
        base = np.arange(1, n_hi + 1, dtype=np.float64) ** (beta * a)
    return PowerDivisorReport(Divisor(base, m, n_lo), primes, block_of, padded, math.fsum(terms), math.fsum(env_terms),
                              float(np.max(terms / env_terms)) if terms.size else 0.0)


@dataclass
class BetaPrincipalReport:
    primes: np.ndarray
    block_of: np.ndarray
    shortfalls: list[dict]
    decay: np.ndarray        # n^(1-a) m_n log n per index
    gap: float


def beta_principal_lift(beta: float, a: float, m: Sequence[int], n_range: tuple[int, int],
                        sieve: PrimeRange) -> BetaPrincipalReport:
    """First m_n primes of (n^a, (n+1)^a]; gap sum |p^-beta - n^-(beta a)|.

    Requires c0 < 1 - 1/a < beta (strict).
    """
    if not (C0 < 1 - 1 / a < beta):
        raise ValueError(f"need {C0} < 1 - 1/a < beta")
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    m = np.asarray(m, dtype=np.int64)
    if m.shape[0] != n_hi - n_lo + 1 or np.any(m < 1):
        raise ValueError("need one positive multiplicity per index in n_range")
    if n_lo < 2:
        raise ValueError("blocks start at n >= 2")
    if (n_hi + 1) ** a > sieve.limit:
        raise RangeExceeded(f"(n+1)^a = {(n_hi + 1) ** a:.6g} exceeds the sieve limit {sieve.limit}")
    per, short = [], []
    for j, n in enumerate(range(n_lo, n_hi + 1)):
        iv = RealInterval(float(n) ** a, float(n + 1) ** a)
        got = sieve.primes_in(iv)[:m[j]]
        if got.size < m[j]:
            short.append({"n": n, "requested": int(m[j]), "available": int(got.size)})
        per.append(got)
    primes = np.concatenate(per)
    block_of = np.concatenate([np.full(b.size, n_lo + j, np.int64) for j, b in enumerate(per)])
    ns = np.arange(n_lo, n_hi + 1, dtype=np.float64)
    decay = ns ** (1 - a) * m * np.log(ns)
    lp = np.log(primes.astype(np.float64))
    gap = math.fsum(np.abs(np.exp(-beta * lp) - np.exp(-beta * a * np.log(block_of.astype(np.float64)))))
    return BetaPrincipalReport(primes, block_of, short, decay, gap)


# -- beta rescaling --------------------------------------------------------------

@dataclass
class BlockBijection:
    source_blocks: list[dict]
    target_blocks: list[dict]

    def __post_init__(self):
        for s, t in zip(self.source_blocks, self.target_blocks):
            if s["n"] != t["n"] or len(s["primes"]) != len(t["primes"]):
                raise ValueError(f"block {s['n']}: source and target sizes differ")

    def pairs(self):
        if not self.source_blocks:
            z = np.zeros(0, np.int64)
            return z, z, z
        n = np.concatenate([np.full(len(b["primes"]), b["n"], np.int64) for b in self.source_blocks])
        p = np.concatenate([np.asarray(b["primes"], np.int64) for b in self.source_blocks])
        q = np.concatenate([np.asarray(b["primes"], np.int64) for b in self.target_blocks])
        return n, p, q

    def to_dict(self) -> dict:
        return {"schema": "tgroups.bijection/1",
                "blocks": [{"n": int(s["n"]), "source": [int(v) for v in s["primes"]],
                            "target": [int(v) for v in t["primes"]]}
                           for s, t in zip(self.source_blocks, self.target_blocks)]}


@dataclass
class RescaleReport:
    bijection: BlockBijection
    mode: str
    n: np.ndarray
    gap: np.ndarray              # truncated gap at each block index
    bound: np.ndarray            # truncated per-pair edge bound (always >= gap)
    envelope: np.ndarray         # truncated comparison series of the construction
    excluded: list[dict] = field(default_factory=list)
    params: dict = field(default_factory=dict)


RESCALE_MODES = ("l1", "l2_bhattacharyya")


def _running(block_terms: list[float]) -> np.ndarray:
    return np.array([math.fsum(block_terms[:i + 1]) for i in range(len(block_terms))])


def beta_rescale(B: Sequence[int], beta0: float, beta: float, mode: str, sieve: PrimeRange,
                 s: float = 2.0, a: float | None = None,
                 n_range: tuple[int, int] | None = None) -> RescaleReport:
    """Match B_n with the first |B_n| primes of the target block n.

    beta0 = 1: source (y_n, y_{n+1}] with y = stretched(s, 1), target
    (x_n, x_{n+1}] with x_n^beta = y_n.  beta0 < 1: source
    (n^(a/beta0), (n+1)^(a/beta0)], target (n^(a/beta), (n+1)^(a/beta)].
    Source and target sizes agree on every block kept; blocks whose target
    is too small or beyond the sieve are excluded and reported.

    ``bound`` sums the per-pair bound implied by both powers lying in the same
    block, which is rigorous; ``envelope`` is the comparison series of the
    construction (1/(n log^s n) for the stretched case,
    n^(a(1/beta0 - 1) - 2)/log n for l1 and n^(a(1/beta0 - 1) - 3)/log n for
    l2 with power blocks), without constants.
    """
    if mode not in RESCALE_MODES:
        raise ValueError(f"mode must be one of {RESCALE_MODES}")
    if not (0 < beta <= beta0 <= 1):
        raise ValueError("need 0 < beta <= beta0 <= 1")
    B = np.unique(np.asarray(B, dtype=np.int64))
    params = {"beta0": beta0, "beta": beta, "mode": mode}
    if beta0 == 1.0 and a is None:
        y = LogSequence.stretched(s, 1.0)
        src_log = lambda n: y.log_value(n)
        tgt_log = lambda n: y.log_value(n) / beta
        n_min = y.monotone_from
        params.update({"blocks": "stretched", "s": s})
    else:
        if a is None:
            raise ValueError("power blocks need the exponent a")
        hi = beta0 / (1 - beta0) if mode == "l1" else 2 * beta0 / (1 - beta0)
        lo_a = beta0 if mode == "l1" else 2 * beta0
        if beta0 < 1 and not (beta / (1 - C0) < a < hi and a > lo_a):
            raise ValueError(f"a must lie in ({beta / (1 - C0):.6g}, {hi:.6g}) and exceed {lo_a:.6g}")
        src_log = lambda n: (a / beta0) * math.log(n)
        tgt_log = lambda n: (a / beta) * math.log(n)
        n_min = 2
        params.update({"blocks": "power", "a": a})
    if n_range is None:
        if not B.size:
            n_lo = n_hi = n_min
        else:
            n_lo = n_min
            n_hi = n_min
            top = math.log(float(B[-1]))
            while src_log(n_hi + 1) < top:
                n_hi += 1
    else:
        n_lo, n_hi = max(n_min, int(n_range[0])), int(n_range[1])

    src, tgt, excluded = [], [], []
    gap_terms, bound_terms, env_terms, ns = [], [], [], []
    for n in range(n_lo, n_hi + 1):
        s_lo, s_hi = math.exp(src_log(n)), math.exp(src_log(n + 1))
        a_i, b_i = RealInterval(s_lo, s_hi).integer_bounds()
        Bn = B[np.searchsorted(B, a_i, "left"):np.searchsorted(B, b_i, "right")]
        if Bn.size == 0:
            continue
        t_iv = RealInterval(math.exp(tgt_log(n)), math.exp(tgt_log(n + 1)))
        if t_iv.hi > sieve.limit:
            excluded.append({"n": n, "reason": "target block beyond the sieve limit"})
            continue
        Cn = _first_primes_from(sieve, t_iv.integer_bounds()[0], int(Bn.size), t_iv)
        if Cn.size < Bn.size:
            excluded.append({"n": n, "reason": "target block too small",
                             "needed": int(Bn.size), "available": int(Cn.size)})
            continue
        src.append({"n": n, "primes": Bn})
        tgt.append({"n": n, "primes": Cn})
        lp, lq = np.log(Bn.astype(np.float64)), np.log(Cn.astype(np.float64))
        # both p^beta0 and q^beta lie in (w_n, w_{n+1}] with log w_n = beta0 * src_log(n)
        lw0, lw1 = beta0 * src_log(n), beta0 * src_log(n + 1)
        if mode == "l1":
            t = np.abs(np.exp(-beta0 * lp) - np.exp(-beta * lq))
            edge = math.exp(-lw0) - math.exp(-lw1)
        else:
            u, v = np.exp(-0.5 * beta0 * lp), np.exp(-0.5 * beta * lq)
            t = (u - v) ** 2
            edge = (math.exp(-0.5 * lw0) - math.exp(-0.5 * lw1)) ** 2
        gap_terms.append(math.fsum(t))
        bound_terms.append(Bn.size * edge)
        if params["blocks"] == "stretched":
            env_terms.append(1.0 / (n * math.log(n) ** s))
        else:
            e = a * (1 / beta0 - 1) - (2 if mode == "l1" else 3)
            env_terms.append(n ** e / math.log(n))
        ns.append(n)
    return RescaleReport(BlockBijection(src, tgt), mode, np.array(ns, dtype=np.int64), _running(gap_terms),
                         _running(bound_terms), _running(env_terms), excluded, params)
