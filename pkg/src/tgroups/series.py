"""Kernel series sin^2(omega*t*log p)/p^beta: partial sums, traces, a
convergence classifier and a Monte Carlo small-value estimator.

The sine argument omega*t*log p is formed in double precision and passed to
the libm sine, which reduces it exactly; for |omega*t*log p| < 2**50 the
error in sin^2 is below about 1e-6 absolute.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _accel
from .errors import RangeExceeded

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Kernel:
    """term(p, t) = sin(omega*t*log p)**2 / p**beta."""

    beta: float = 1.0
    omega: float = TWO_PI

    def __post_init__(self):
        if not (0 < self.beta <= 1):
            raise ValueError("beta must lie in (0, 1]")
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    def term(self, p, t: float):
        lp = np.log(np.asarray(p, dtype=np.float64))
        return np.sin(self.omega * t * lp) ** 2 * np.exp(-self.beta * lp)

    def sum(self, primes: np.ndarray, t: float) -> float:
        return _accel.kernel_sum(primes, self.beta, self.omega * t)


def _primes_upto(A, cutoff: float) -> np.ndarray:
    if hasattr(A, "primes_upto"):
        return A.primes_upto(cutoff)
    arr = np.asarray(A, dtype=np.int64)
    return arr[arr <= cutoff]


def partial_sum(kernel: Kernel, A, t: float, cutoff: float) -> float:
    """Sum of kernel terms over p in A with p <= cutoff, ascending, compensated."""
    if hasattr(A, "sieve") and A.sieve is not None and cutoff > A.sieve.limit:
        raise RangeExceeded(f"cutoff {cutoff} exceeds the sieve limit {A.sieve.limit}")
    if t == 0:
        return 0.0
    return kernel.sum(_primes_upto(A, cutoff), t)


def exact_t_term(p, beta: float, t: float):
    """1 - (1 - x)/|1 - x e^{-i beta t log p}| with x = p^-beta.

    Uses |1 - x e^{-i theta}|^2 = (1-x)^2 + 4x sin^2(theta/2) and a log1p /
    expm1 form so the result keeps full relative accuracy for large p.
    """
    p = np.asarray(p, dtype=np.float64)
    lp = np.log(p)
    x = np.exp(-beta * lp)
    u = 4.0 * x * np.sin(0.5 * beta * t * lp) ** 2 / (1.0 - x) ** 2
    out = -np.expm1(-0.5 * np.log1p(u))
    return float(out) if out.ndim == 0 else out


@dataclass
class SeriesTrace:
    kernel: Kernel
    t: float
    cutoffs: np.ndarray
    partial_sums: np.ndarray
    block_n: np.ndarray | None = None
    block_sums: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.cutoffs)

    @property
    def index(self) -> np.ndarray:
        """Growth variable used by the classifier: block index if known, else cutoff."""
        if self.block_n is not None and len(self.block_n) == len(self.cutoffs):
            return np.asarray(self.block_n, dtype=np.float64)
        return np.asarray(self.cutoffs, dtype=np.float64)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cutoff", "partial_sum", "block_n", "block_sum"])
        aligned = self.block_n is not None and len(self.block_n) == len(self.cutoffs)
        for i, (c, s) in enumerate(zip(self.cutoffs, self.partial_sums)):
            bn = int(self.block_n[i]) if aligned else ""
            bs = repr(float(self.block_sums[i])) if aligned else ""
            w.writerow([repr(float(c)), repr(float(s)), bn, bs])
        return buf.getvalue()


def trace(kernel: Kernel, A, t: float, cutoffs: Sequence[float] | None = None) -> SeriesTrace:
    """Partial sums at each cutoff.

    For a block family and ``cutoffs=None`` the cutoffs are the block upper
    ends, block sums are filled in and partial sums are their running
    (exactly rounded) totals.
    """
    if hasattr(A, "blocks"):
        blocks = A.blocks
        bsums = np.array([0.0 if t == 0 else kernel.sum(A.block_primes(b), t) for b in blocks])
        bn = np.array([b.n for b in blocks], dtype=np.int64)
        if cutoffs is None:
            cut = np.array([b.interval.hi for b in blocks], dtype=np.float64)
            ps = np.array([math.fsum(bsums[:i + 1]) for i in range(len(bsums))])
            return SeriesTrace(kernel, t, cut, ps, bn, bsums)
        cut = np.asarray(cutoffs, dtype=np.float64)
        ps = np.array([partial_sum(kernel, A, t, c) for c in cut])
        keep = np.array([b.interval.hi <= cut[-1] for b in blocks], dtype=bool) if len(cut) else np.zeros(0, bool)
        return SeriesTrace(kernel, t, cut, ps, bn[keep], bsums[keep])
    if cutoffs is None:
        raise ValueError("cutoffs are required for a plain prime list")
    cut = np.asarray(cutoffs, dtype=np.float64)
    primes = np.asarray(A, dtype=np.int64)
    edges = np.searchsorted(primes, cut, side="right")
    parts, prev = [], 0
    for e in edges:
        parts.append(0.0 if t == 0 else kernel.sum(primes[prev:e], t))
        prev = e
    ps = np.array([math.fsum(parts[:i + 1]) for i in range(len(parts))])
    return SeriesTrace(kernel, t, cut, ps)


def trace_from_increments(index: Sequence[float], increments: Sequence[float]) -> SeriesTrace:
    """Trace built from given block values b_n (block index = cutoff)."""
    idx = np.asarray(index, dtype=np.float64)
    inc = np.asarray(increments, dtype=np.float64)
    ps = np.cumsum(inc)
    return SeriesTrace(Kernel(), float("nan"), idx, ps, idx.astype(np.int64), inc)


# -- classification -------------------------------------------------------------

CONVERGENT = "convergent-like"
DIVERGENT = "divergent-like"
INCONCLUSIVE = "inconclusive"
THRESHOLD = 1.0


def _loglog(u: np.ndarray) -> np.ndarray:
    return np.log(np.log(u))


@dataclass
class Classification:
    label: str
    score: float
    diagnostics: dict = field(default_factory=dict)


def _fixed_slope_rss(x, y, w, slope):
    r = y - slope * x
    alpha = np.average(r, weights=w)
    d = r - alpha
    return float(np.sum(w * d * d))


def classify(tr: SeriesTrace, threshold: float = THRESHOLD, tail: float = 0.5) -> Classification:
    """Heuristic convergence label for a trace.

    Increments b_j of the partial sums are divided by the matching increments
    of the divergent envelope E_d(u) = log log u (integrated sum of eps/n with
    eps = 1/log n).  On the last ``tail`` share of the log-cutoff range,
    log(b/dE_d) is fitted against x = log log u with slope fixed by each
    model: slope >= 0 for the divergent envelope and slope <= -2 for the
    convergent one (dE_c/dE_d = 1/log^2 u).  The score is half the log ratio
    of the two weighted residual sums (positive favours convergence) and
    |score| <= threshold is inconclusive.  No finite computation decides
    convergence, hence the "-like" labels.
    """
    u = tr.index
    s = np.asarray(tr.partial_sums, dtype=np.float64)
    cut = np.asarray(tr.cutoffs, dtype=np.float64)
    ok = u > math.e
    u, s, cut = u[ok], s[ok], cut[ok]
    if len(u) < 8:
        raise ValueError(f"classification needs at least 8 cutoffs above e, got {len(u)}")
    decades = math.log10(cut[-1] / cut[0])
    if decades < 3:
        raise ValueError(f"cutoffs span {decades:.2f} decades; at least 3 are required")
    lc = np.log(cut)
    inc = np.diff(s)
    x = _loglog(u)
    d_env = np.diff(x)
    wts = np.diff(lc)
    mid_x = x[1:]
    keep = lc[1:] >= lc[0] + (1.0 - tail) * (lc[-1] - lc[0])
    positive = (inc > 0) & (d_env > 0)
    sel = keep & positive
    if np.count_nonzero(sel) < 3:
        return Classification(INCONCLUSIVE, 0.0, {"reason": "too few positive increments in the tail",
                                                   "decades": decades, "points": int(len(u))})
    y = np.log(inc[sel] / d_env[sel])
    xx, w = mid_x[sel], wts[sel] / wts[sel].sum()
    xm = np.average(xx, weights=w)
    vx = float(np.sum(w * (xx - xm) ** 2))
    slope = float(np.sum(w * (xx - xm) * (y - np.average(y, weights=w))) / vx) if vx > 0 else 0.0
    rss_d = _fixed_slope_rss(xx, y, w, max(slope, 0.0))
    rss_c = _fixed_slope_rss(xx, y, w, min(slope, -2.0))
    floor = 1e-12
    score = 0.5 * math.log((rss_d + floor) / (rss_c + floor))
    if score > threshold:
        label = CONVERGENT
    elif score < -threshold:
        label = DIVERGENT
    else:
        label = INCONCLUSIVE
    return Classification(label, score, {
        "fitted_slope": slope, "rss_divergent": rss_d, "rss_convergent": rss_c,
        "tail_points": int(np.count_nonzero(sel)), "dropped_nonpositive": int(np.count_nonzero(keep & ~positive)),
        "points": int(len(u)), "decades": decades,
    })


# -- Monte Carlo ------------------------------------------------------------------

@dataclass
class MCEstimate:
    estimate: float
    stderr: float
    samples: int
    bound: float
    within_bound: bool


def measure_zero_mc(a: Sequence[float], p: Sequence[float], c: float, n: int,
                    samples: int, seed: int) -> MCEstimate:
    """Estimate the measure of {t in [0,1]: f_{n,c}(t) < V_n/2}.

    f_{n,c}(t) = sum_{k<=n} 1{ {t a_k} in [c, 1-c] } / p_k and
    V_n = sum_{k<=n} 1/p_k.  The bound checked is estimate <= 8c + 3*stderr.
    """
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    if not (0 < c < 0.5):
        raise ValueError("c must lie in (0, 1/2)")
    a = np.asarray(a, dtype=np.float64)[:n]
    w = 1.0 / np.asarray(p, dtype=np.float64)[:n]
    if len(a) < n or len(w) < n:
        raise ValueError("sequences shorter than n")
    if np.any(np.diff(a) <= 0) or np.any(w <= 0):
        raise ValueError("a must be increasing and p positive")
    rng = np.random.default_rng(seed)
    half = 0.5 * w.sum()
    hits = 0
    chunk = max(1, min(samples, (1 << 22) // max(n, 1)))
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        t = rng.random(m)
        frac = np.mod(np.outer(t, a), 1.0)
        inside = (frac >= c) & (frac <= 1 - c)
        f = inside @ w
        hits += int(np.count_nonzero(f < half))
        done += m
    est = hits / samples
    se = math.sqrt(max(est * (1 - est), 1.0 / samples) / samples)
    return MCEstimate(est, se, samples, 8 * c, est <= 8 * c + 3 * se)


def near_integer_measure_mc(x: float, c: float, samples: int, seed: int) -> MCEstimate:
    """Measure of {t in [0,1]: {t x} in [0,c] or [1-c,1)}; exact value 2c for integer x."""
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    rng = np.random.default_rng(seed)
    frac = np.mod(rng.random(samples) * x, 1.0)
    est = float(np.count_nonzero((frac <= c) | (frac >= 1 - c))) / samples
    se = math.sqrt(max(est * (1 - est), 1.0 / samples) / samples)
    return MCEstimate(est, se, samples, 2 * c, abs(est - 2 * c) <= 3 * se)
