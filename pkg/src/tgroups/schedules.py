"""Epsilon schedules, log-space growth sequences and their profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import RangeExceeded, Unsupported

CONDITIONS = ("cond_5_1", "cond_5_2", "cond_5_3", "cond_5_4")
# cond_5_1: n*eps_n -> inf;  cond_5_2: eps_n -> 0;
# cond_5_3: sum eps_n^2/n < inf;  cond_5_4: sum eps_n/n = inf.

SCHEDULE_KINDS = ("reciprocal_log", "beta_damped", "platoon", "explicit")


@dataclass(frozen=True)
class EpsilonSchedule:
    """Rule n -> eps_n.

    ``runs`` (platoon kind) is a tuple of ``(n_lo, n_hi, level, c)``: every
    index in the closed range [n_lo, n_hi] that belongs to the index set gets
    eps = c.  ``table`` (explicit kind) maps n to eps_n.
    """

    kind: str
    beta: float = 1.0
    t0: float = 1.0
    runs: tuple = ()
    table: Mapping[int, float] | None = None
    domain_start: int = 2

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise Unsupported(f"unknown schedule kind {self.kind!r}")
        if self.domain_start < 2:
            raise ValueError("domain_start must be >= 2")
        if self.kind == "beta_damped" and not (0 < self.beta <= 1 and self.t0 > 0):
            raise ValueError("beta_damped needs beta in (0, 1] and t0 > 0")

    @classmethod
    def reciprocal_log(cls, domain_start: int = 2) -> "EpsilonSchedule":
        return cls("reciprocal_log", domain_start=domain_start)

    @classmethod
    def beta_damped(cls, beta: float, t0: float, domain_start: int = 2) -> "EpsilonSchedule":
        return cls("beta_damped", beta=beta, t0=t0, domain_start=domain_start)

    @classmethod
    def explicit(cls, values: Mapping[int, float]) -> "EpsilonSchedule":
        table = {int(k): float(v) for k, v in values.items()}
        return cls("explicit", table=table, domain_start=max(2, min(table)) if table else 2)

    @classmethod
    def platoon(cls, runs: Iterable[tuple[int, int, int, float]]) -> "EpsilonSchedule":
        runs = tuple((int(a), int(b), int(lv), float(c)) for a, b, lv, c in runs)
        start = max(2, runs[0][0]) if runs else 2
        return cls("platoon", runs=runs, domain_start=start)

    def value(self, n: int) -> float:
        if n < self.domain_start:
            raise RangeExceeded(f"schedule undefined at n={n} (domain starts at {self.domain_start})")
        if self.kind == "reciprocal_log":
            return 1.0 / math.log(n)
        if self.kind == "beta_damped":
            return math.exp(-(1 - self.beta) * n / (3 * self.beta * self.t0)) / math.log(n)
        if self.kind == "explicit":
            try:
                return self.table[n]
            except KeyError:
                raise RangeExceeded(f"schedule undefined at n={n}") from None
        for lo, hi, _, c in self.runs:
            if lo <= n <= hi:
                return c
        raise RangeExceeded(f"schedule undefined at n={n}")

    __call__ = value

    def level_values(self) -> list[tuple[int, float]]:
        """(level, c_level) pairs of a platoon schedule."""
        return [(lv, c) for _, _, lv, c in self.runs]


def _power_log_fit(x: np.ndarray, eps: np.ndarray) -> tuple[float, float]:
    """Fit log eps = -g*log x - k*log log x + const; returns (g, k)."""
    lx = np.log(x)
    design = np.column_stack([-lx, -np.log(lx), np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, np.log(eps), rcond=None)
    return float(coef[0]), float(coef[1])


def _verdicts_from_exponents(g: float, k: float, tol: float = 0.05) -> dict[str, bool]:
    # eps ~ x^-g (log x)^-k; integral tests for each condition
    g0 = abs(g) < tol
    return {
        "cond_5_1": g < 1 - tol or (abs(g - 1) < tol and k < -tol),
        "cond_5_2": g > tol or (g0 and k > tol),
        "cond_5_3": g > tol or (g0 and 2 * k > 1 + tol),
        "cond_5_4": g < -tol or (g0 and k <= 1 + tol),
    }


@dataclass
class AdmissibilityReport:
    verdicts: dict[str, bool]
    heuristic: bool
    evidence: dict = field(default_factory=dict)

    @property
    def admissible(self) -> bool:
        return all(self.verdicts.values())


def check_admissible(sched: EpsilonSchedule, indices: Sequence[int] | None = None) -> AdmissibilityReport:
    """Decide the four admissibility conditions.

    ``indices=None`` means all integers from ``domain_start``.  Analytic kinds
    over that full set are decided from known integral-test results.  Finite
    index lists, explicit tables and platoon tables get a trend verdict from a
    fitted exponent pair and are flagged heuristic.
    """
    if indices is None and sched.kind == "reciprocal_log":
        return AdmissibilityReport(dict.fromkeys(CONDITIONS, True), False,
                                   {"rule": "eps=1/log n: n eps->inf, sum 1/(n log^2 n)<inf, sum 1/(n log n)=inf"})
    if indices is None and sched.kind == "beta_damped":
        if sched.beta == 1:
            return AdmissibilityReport(dict.fromkeys(CONDITIONS, True), False,
                                       {"rule": "beta=1 reduces to eps=1/log n"})
        return AdmissibilityReport(
            {"cond_5_1": False, "cond_5_2": True, "cond_5_3": True, "cond_5_4": False}, False,
            {"rule": "exponential decay: n eps->0 and sum eps/n < inf"})
    if sched.kind == "platoon":
        # harmonic mass per level lies in (1/(2l), 1/l), so the sums over the
        # index set compare with sum c_l/l and sum c_l^2/l; n*eps -> inf follows
        # from l*c_l -> inf.
        lv = np.array([l for l, _ in sched.level_values()], dtype=float)
        c = np.array([v for _, v in sched.level_values()], dtype=float)
        if lv.size < 3:
            raise ValueError("platoon schedule needs at least 3 levels for a trend verdict")
        g, k = _power_log_fit(lv + 1.0, c)
        verdicts = _verdicts_from_exponents(g, k)
        verdicts["cond_5_1"] = bool(np.all(lv * c >= 1)) and (g < 1 - 0.05)
        return AdmissibilityReport(verdicts, True, {"exponent": g, "log_exponent": k,
                                                    "monotone": bool(np.all(np.diff(c) <= 0))})
    if indices is None:
        if sched.kind != "explicit":
            raise Unsupported(sched.kind)
        indices = sorted(sched.table)
    idx = np.array(sorted(int(i) for i in indices), dtype=float)
    if idx.size < 4:
        raise ValueError("need at least 4 indices for a trend verdict")
    eps = np.array([sched.value(int(i)) for i in idx])
    if np.any(eps <= 0):
        raise ValueError("schedule values must be positive")
    g, k = _power_log_fit(idx, eps)
    return AdmissibilityReport(_verdicts_from_exponents(g, k), True,
                               {"exponent": g, "log_exponent": k, "n_range": (int(idx[0]), int(idx[-1]))})


# -- log-space sequences ------------------------------------------------------

@dataclass(frozen=True)
class LogSequence:
    """Monotone sequence kept as log y_n.

    stretched: log y_n = c*n/log(n)**s;  power: log y_n = a*log n.
    """

    kind: str
    c: float = 1.0
    s: float = 2.0
    a: float = 1.0
    domain_start: int | None = None

    def __post_init__(self):
        if self.kind == "stretched":
            if not (self.c > 0 and self.s > 1):
                raise ValueError("stretched sequence needs c > 0 and s > 1")
            if self.domain_start is None:
                object.__setattr__(self, "domain_start", 3)
        elif self.kind == "power":
            if not self.a > 0:
                raise ValueError("power sequence needs a > 0")
            if self.domain_start is None:
                object.__setattr__(self, "domain_start", 2)
        else:
            raise Unsupported(f"unknown sequence kind {self.kind!r}")
        if self.domain_start < 2:
            raise ValueError("domain_start must be >= 2")

    @classmethod
    def stretched(cls, s: float = 2.0, c: float = 1.0, domain_start: int = 3) -> "LogSequence":
        return cls("stretched", c=c, s=s, domain_start=domain_start)

    @classmethod
    def power(cls, a: float, domain_start: int = 2) -> "LogSequence":
        return cls("power", a=a, domain_start=domain_start)

    @property
    def monotone_from(self) -> int:
        if self.kind == "stretched":
            return max(self.domain_start, math.ceil(math.exp(self.s)))
        return self.domain_start

    def log_value(self, n: int) -> float:
        if n < self.domain_start:
            raise RangeExceeded(f"n={n} is below domain_start={self.domain_start}")
        if self.kind == "stretched":
            return self.c * n / math.log(n) ** self.s
        return self.a * math.log(n)

    def log_values(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.float64)
        if ns.size and ns.min() < self.domain_start:
            raise RangeExceeded(f"index below domain_start={self.domain_start}")
        if self.kind == "stretched":
            return self.c * ns / np.log(ns) ** self.s
        return self.a * np.log(ns)

    def value(self, n: int) -> float:
        """exp(log_value(n)); may overflow to inf for large n."""
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_value(n)))

    def first_index_above(self, y: float) -> int:
        """Smallest n in the monotone range with y_n > y."""
        ly = math.log(y)
        lo = self.monotone_from
        if self.log_value(lo) > ly:
            return lo
        hi = lo + 1
        while self.log_value(hi) <= ly:
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.log_value(mid) > ly:
                hi = mid
            else:
                lo = mid
        return hi

    def last_index_below(self, y: float) -> int:
        """Largest n with y_n <= y (monotone range)."""
        return self.first_index_above(y) - 1


def _require_stretched(seq: LogSequence) -> None:
    if seq.kind != "stretched":
        raise Unsupported("profile is defined for stretched sequences")


def growth_ratio_profile(seq: LogSequence, n_range: Iterable[int]) -> list[dict]:
    """Normalised relative growth (y_{n+1}-y_n)/y_n * log(n)^s / c.

    ``ratio`` uses expm1 of the log difference; ``log_ratio`` uses the log
    difference itself and is exactly invariant under rescaling c.
    """
    _require_stretched(seq)
    out = []
    for n in n_range:
        d = seq.log_value(n + 1) - seq.log_value(n)
        scale = math.log(n) ** seq.s / seq.c
        out.append({"n": n, "ratio": math.expm1(d) * scale, "log_ratio": d * scale})
    return out


def short_interval_quotient(seq: LogSequence, n: int) -> float:
    """(y_n/log^2 y_n) / (y_{n+1}/log y_{n+1} - y_n/log y_n), evaluated in log space."""
    _require_stretched(seq)
    l0, l1 = seq.log_value(n), seq.log_value(n + 1)
    delta = (l1 - math.log(l1)) - (l0 - math.log(l0))
    return 1.0 / (l0 * math.expm1(delta))


def interval_density_profile(seq: LogSequence, n_range: Iterable[int]) -> list[dict]:
    """(y_{n+1}/log y_{n+1} - y_n/log y_n) * log y_n (log log y_n)^s / (c y_n)."""
    _require_stretched(seq)
    out = []
    for n in n_range:
        l0, l1 = seq.log_value(n), seq.log_value(n + 1)
        if l0 <= 1:
            out.append({"n": n, "ratio": None})
            continue
        delta = (l1 - math.log(l1)) - (l0 - math.log(l0))
        out.append({"n": n, "ratio": math.expm1(delta) * math.log(l0) ** seq.s / seq.c})
    return out


def interval_prime_count_profile(seq: LogSequence, n_range: Iterable[int], sieve) -> list[dict]:
    """Primes between consecutive terms against c*y_n/((log y_n)(log log y_n)^s)."""
    _require_stretched(seq)
    out = []
    for n in n_range:
        l0, l1 = seq.log_value(n), seq.log_value(n + 1)
        y0, y1 = math.exp(l0), math.exp(l1)
        if y1 > sieve.limit:
            raise RangeExceeded(f"y_{n + 1}={y1:.6g} exceeds the sieve limit {sieve.limit}")
        alpha = sieve.count_primes(y1) - sieve.count_primes(y0)
        if y1 < 3 or l0 <= 1:
            out.append({"n": n, "alpha_n": alpha, "predicted": None, "ratio": None})
            continue
        pred = seq.c * y0 / (l0 * math.log(l0) ** seq.s)
        out.append({"n": n, "alpha_n": alpha, "predicted": pred, "ratio": alpha / pred})
    return out
