"""Overlap defects between product-state factors and the criterion sums built
from them.

A geometric state with ratio r has eigenvalues (1-r) r**k, k >= 0; a
two-level state with ratio r has eigenvalues 1/(1+r) and r/(1+r).  The
overlap defect of two states is 1 - sum_k sqrt(lam_k mu_k), which equals
half the squared Hellinger distance sum_k (sqrt(lam_k) - sqrt(mu_k))**2 / 2
because both eigenvalue lists sum to one.  All evaluations below use that
squared-difference form, so equal states give exactly 0 and nearby states
keep their relative accuracy.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

TAIL_TOL = 1e-18


@dataclass(frozen=True)
class GeometricState:
    ratio: float

    def __post_init__(self):
        if not (0 < self.ratio < 1):
            raise ValueError("ratio must lie in (0, 1)")

    def eigenvalue(self, k: int) -> float:
        return (1.0 - self.ratio) * self.ratio ** k


@dataclass(frozen=True)
class TwoLevelState:
    ratio: float

    def __post_init__(self):
        if not (0 < self.ratio < 1):
            raise ValueError("ratio must lie in (0, 1)")

    def eigenvalue(self, k: int) -> float:
        if k == 0:
            return 1.0 / (1.0 + self.ratio)
        if k == 1:
            return self.ratio / (1.0 + self.ratio)
        return 0.0


State = Union[GeometricState, TwoLevelState]


def _sq_diff_sqrt(u: float, v: float) -> float:
    """(sqrt(u) - sqrt(v))**2 without cancellation in the difference."""
    s = math.sqrt(u) + math.sqrt(v)
    if s == 0.0:
        return 0.0
    d = (u - v) / s
    return d * d


def _geometric_closed(a: float, b: float) -> float:
    # 1 - sqrt((1-a)(1-b))/(1 - sqrt(ab)) with the numerator rewritten as
    # ((sqrt a - sqrt b)^2 + (sqrt(1-a) - sqrt(1-b))^2) / 2
    if a == b:
        return 0.0
    num = 0.5 * (_sq_diff_sqrt(a, b) + _sq_diff_sqrt(1.0 - a, 1.0 - b))
    return num / (1.0 - math.sqrt(a * b))


def overlap_defect(s1: State, s2: State) -> float:
    """1 - sum_k sqrt(lam_k mu_k) for two states, in [0, 1]."""
    if isinstance(s1, GeometricState) and isinstance(s2, GeometricState):
        out = _geometric_closed(s1.ratio, s2.ratio)
    else:
        out = explicit_overlap_defect(s1, s2)
    return min(max(out, 0.0), 1.0)


def explicit_overlap_defect(s1: State, s2: State) -> float:
    """Overlap defect by summing eigenvalue by eigenvalue.

    Indices run until both remaining geometric tails are below ``TAIL_TOL``;
    the rest is added in closed form.
    """
    geo1, geo2 = isinstance(s1, GeometricState), isinstance(s2, GeometricState)
    if not (geo1 or geo2):
        terms = [_sq_diff_sqrt(s1.eigenvalue(k), s2.eigenvalue(k)) for k in (0, 1)]
        return 0.5 * math.fsum(terms)
    if geo1 and geo2:
        a, b = s1.ratio, s2.ratio
        rmax = max(a, b)
        K = max(2, math.ceil(math.log(TAIL_TOL) / math.log(rmax)))
        terms = [_sq_diff_sqrt((1 - a) * a ** k, (1 - b) * b ** k) for k in range(K)]
        # sum_{k>=K} (sqrt(lam_k) - sqrt(mu_k))^2
        g = math.sqrt(a * b)
        tail = a ** K + b ** K - 2.0 * math.sqrt((1 - a) * (1 - b)) * g ** K / (1.0 - g)
        terms.append(max(tail, 0.0))
        return 0.5 * math.fsum(terms)
    geo, two = (s1, s2) if geo1 else (s2, s1)
    a = geo.ratio
    terms = [_sq_diff_sqrt(geo.eigenvalue(k), two.eigenvalue(k)) for k in (0, 1)]
    terms.append(a * a)  # geometric mass on k >= 2, where the two-level state is 0
    return 0.5 * math.fsum(terms)


# -- elementary inequality ------------------------------------------------------

@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool


REL_SLACK = 1e-12  # rounding allowance; the two sides meet near (0, 1)


def _check_domain(x, y) -> None:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(x < 0) or np.any(y < 0) or np.any(x >= 1) or np.any(y >= 1) or np.any(x + y >= 1):
        raise ValueError("need x, y in [0, 1) with x + y < 1")


def _sides(x, y):
    sx, sy = np.sqrt(x), np.sqrt(y)
    d = x - y
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(sx + sy > 0, d / (sx + sy), 0.0) ** 2           # (sqrt x - sqrt y)^2
        c = (d / (np.sqrt(1 - x) + np.sqrt(1 - y))) ** 2              # (sqrt(1-x) - sqrt(1-y))^2
    lhs = 0.5 * (a + c)                                               # 1 - sqrt(xy) - sqrt((1-x)(1-y))
    rhs = a + np.sqrt(x * y) * a
    return lhs, rhs


def overlap_inequality_check(x: float, y: float) -> InequalityCheck:
    """Evaluate 1 - sqrt(xy) - sqrt((1-x)(1-y)) <= (1 + sqrt(xy)) (sqrt x - sqrt y)^2."""
    _check_domain(x, y)
    lhs, rhs = _sides(np.float64(x), np.float64(y))
    lhs, rhs = float(lhs), float(rhs)
    return InequalityCheck(lhs, rhs, lhs <= rhs * (1.0 + REL_SLACK))


def overlap_inequality_violations(x: np.ndarray, y: np.ndarray) -> int:
    """Number of pairs for which the inequality fails."""
    _check_domain(x, y)
    lhs, rhs = _sides(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    return int(np.count_nonzero(lhs > rhs * (1.0 + REL_SLACK)))


# -- criterion sums -------------------------------------------------------------

CRITERION_KINDS = ("sqrt_gap", "overlap", "l1")


@dataclass
class TwoLevelPairing:
    """Primes p in block n matched with the two-level state of ratio exp(-log_x[n])."""

    n: np.ndarray
    p: np.ndarray
    log_x: np.ndarray  # per prime: log of the two-level parameter x_n

    def pairs(self):
        return self.n, self.p, None


def power_block_pairing(B: np.ndarray, beta: float, a: float) -> TwoLevelPairing:
    """p in (n^a, (n+1)^a] paired with x_n = n^(beta a), for n >= 2.

    Block 1 would need x_1 = 1, which is not a two-level state; its finitely
    many primes are left out.
    """
    p = np.asarray(B, dtype=np.int64)
    lp = np.log(p.astype(np.float64))
    n = np.floor(np.exp(lp / a)).astype(np.int64)
    # repair floating error at block edges: n^a < p <= (n+1)^a
    n = np.where(n.astype(np.float64) ** a >= p, n - 1, n)
    n = np.where((n + 1).astype(np.float64) ** a < p, n + 1, n)
    keep = n >= 2
    n, p = n[keep], p[keep]
    return TwoLevelPairing(n, p, beta * a * np.log(n.astype(np.float64)))


def stretched_block_pairing(B: np.ndarray, seq, n_lo: int, n_hi: int) -> TwoLevelPairing:
    """p in (x_n, x_{n+1}] paired with x_n for a LogSequence ``seq``."""
    ns = np.arange(n_lo, n_hi + 2)
    lx = seq.log_values(ns)
    p = np.asarray(B, dtype=np.int64)
    lp = np.log(p.astype(np.float64))
    idx = np.searchsorted(lx, lp, side="left") - 1
    keep = (idx >= 0) & (idx < len(ns) - 1)
    idx, p = idx[keep], p[keep]
    return TwoLevelPairing(ns[idx], p, lx[idx])


def _pair_arrays(pairing):
    if hasattr(pairing, "pairs"):
        return pairing.pairs()
    if hasattr(pairing, "q") and hasattr(pairing, "level"):
        return np.asarray(pairing.level), np.asarray(pairing.p), np.asarray(pairing.q)
    raise TypeError("pairing must provide pairs() or p/q/level arrays")


@dataclass
class CriterionTrace:
    kind: str
    beta: float
    beta_target: float
    n: np.ndarray
    sums: np.ndarray
    pair_counts: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "pairs", "truncated_sum"])
        for n, c, s in zip(self.n, self.pair_counts, self.sums):
            w.writerow([int(n), int(c), repr(float(s))])
        return buf.getvalue()


def _terms(kind: str, p: np.ndarray, q, log_x, beta: float, beta_t: float) -> np.ndarray:
    lp = np.log(p.astype(np.float64))
    if q is not None:
        lq = np.log(np.asarray(q, dtype=np.float64))
        u, v = np.exp(-beta * lp), np.exp(-beta_t * lq)
    else:
        u, v = np.exp(-beta * lp), np.exp(-log_x)
    if kind == "l1":
        return np.abs(u - v)
    if kind == "sqrt_gap":
        su, sv = np.exp(-0.5 * beta * lp), (np.exp(-0.5 * beta_t * lq) if q is not None else np.exp(-0.5 * log_x))
        d = (u - v) / (su + sv)
        return d * d
    if kind == "overlap":
        if q is not None:
            return np.array([overlap_defect(GeometricState(a), GeometricState(b)) for a, b in zip(u, v)])
        return np.array([overlap_defect(GeometricState(a), TwoLevelState(b)) for a, b in zip(u, v)])
    raise ValueError(f"kind must be one of {CRITERION_KINDS}")


def criterion_sum(pairing, beta: float, beta_target: float, kind: str, N: int | None = None) -> CriterionTrace:
    """Truncated criterion sums per block index n <= N (ascending).

    sqrt_gap: sum (p^(-beta/2) - q^(-beta'/2))^2;  overlap: sum of overlap
    defects;  l1: sum |p^-beta - q^-beta'|.  For a two-level pairing the
    target is the two-level state of that block and ``beta_target`` is unused.
    Block totals are exactly rounded and accumulated exactly, so the trace is
    non-decreasing.
    """
    if kind not in CRITERION_KINDS:
        raise ValueError(f"kind must be one of {CRITERION_KINDS}")
    n, p, q = _pair_arrays(pairing)
    n = np.asarray(n, dtype=np.int64)
    p = np.asarray(p, dtype=np.int64)
    log_x = getattr(pairing, "log_x", None)
    if q is not None:
        q = np.asarray(q, dtype=np.int64)
        if q.shape != p.shape:
            raise ValueError("pairing is not total: p and q lengths differ")
    order = np.lexsort((p, n))
    n, p = n[order], p[order]
    q = q[order] if q is not None else None
    log_x = np.asarray(log_x)[order] if log_x is not None else None
    if N is not None:
        keep = n <= N
        n, p = n[keep], p[keep]
        q = q[keep] if q is not None else None
        log_x = log_x[keep] if log_x is not None else None
    terms = _terms(kind, p, q, log_x, beta, beta_target) if p.size else np.zeros(0)
    uniq, starts = np.unique(n, return_index=True)
    bounds = list(starts) + [len(n)]
    block_tot = [math.fsum(terms[bounds[i]:bounds[i + 1]]) for i in range(len(uniq))]
    sums = np.array([math.fsum(block_tot[:i + 1]) for i in range(len(uniq))])
    counts = np.diff(np.array(bounds, dtype=np.int64))
    return CriterionTrace(kind, beta, beta_target, uniq, sums, counts)


def power_envelope(pairing, beta: float, a: float) -> CriterionTrace:
    """Running sums of p^-(beta + 1/a) per block, the comparison series for
    power-block pairings."""
    n, p, _ = _pair_arrays(pairing)
    order = np.lexsort((p, n))
    n, p = np.asarray(n)[order], np.asarray(p)[order]
    terms = np.exp(-(beta + 1.0 / a) * np.log(p.astype(np.float64)))
    uniq, starts = np.unique(n, return_index=True)
    bounds = list(starts) + [len(n)]
    block_tot = [math.fsum(terms[bounds[i]:bounds[i + 1]]) for i in range(len(uniq))]
    sums = np.array([math.fsum(block_tot[:i + 1]) for i in range(len(uniq))])
    return CriterionTrace("envelope", beta, beta + 1.0 / a, uniq, sums, np.diff(np.array(bounds)))
