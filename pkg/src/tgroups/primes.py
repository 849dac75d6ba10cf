"""Segmented odd-only prime sieve with counting and interval queries.

The sieve stores one bit per odd number (bit ``i`` of the bitset stands for
``2*i + 1``) packed in little-endian 64-bit words, plus a running popcount
per word so that ``pi(x)`` is a table lookup and one popcount.

Real interval endpoints are mapped to integers exactly: for an integer p and
a real lo, ``p > lo`` iff ``p >= floor(lo) + 1`` and ``p <= hi`` iff
``p <= floor(hi)``.  The half-open ``[lo, hi)`` orientation uses ``ceil``.
"""
from __future__ import annotations

import math
import os
import struct
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _accel
from .errors import RangeExceeded

DEFAULT_LIMIT = 2 ** 31
DEFAULT_SEGMENT = 1 << 21
CACHE_ENV = "TGROUPS_CACHE_DIR"

_MAGIC = b"TGSIEVE\x00"
_VERSION = 1
_HEADER = struct.Struct("<8sIQQ")  # magic, version, limit, number of words


@dataclass(frozen=True)
class RealInterval:
    """Interval with real endpoints.

    ``closed="right"`` means (lo, hi]; ``closed="left"`` means [lo, hi);
    ``closed="neither"`` means (lo, hi).  ``lo == hi`` is the empty interval.
    """

    lo: float
    hi: float
    closed: str = "right"

    def __post_init__(self):
        if self.closed not in ("right", "left", "neither"):
            raise ValueError(f"closed must be 'right', 'left' or 'neither', got {self.closed!r}")
        if not (self.lo <= self.hi):
            raise ValueError(f"interval has lo > hi: ({self.lo}, {self.hi})")

    def integer_bounds(self) -> tuple[int, int]:
        """Smallest and largest integers inside the interval (may be empty: a > b)."""
        if self.closed == "right":
            return math.floor(self.lo) + 1, math.floor(self.hi)
        if self.closed == "left":
            return math.ceil(self.lo), math.ceil(self.hi) - 1
        return math.floor(self.lo) + 1, math.ceil(self.hi) - 1

    def contains(self, p: int) -> bool:
        a, b = self.integer_bounds()
        return a <= p <= b


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "tgroups"


def default_cache_path(limit: int) -> Path:
    return cache_dir() / f"sieve-{limit}.bin"


def _base_primes(n: int) -> np.ndarray:
    """Odd primes up to n by a plain sieve."""
    if n < 3:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if mask[p]:
            mask[p * p::2 * p] = False
    out = np.flatnonzero(mask).astype(np.int64)
    return out[out > 2]


class PrimeRange:
    """Sieved primes up to ``limit``.

    Construction sieves (or loads ``cache_path`` when it holds a matching
    bitset).  All queries are read-only afterwards.  ``workers`` only changes
    how segments are scheduled, never the result.
    """

    def __init__(self, limit: int = DEFAULT_LIMIT, segment_size: int = DEFAULT_SEGMENT,
                 cache_path: str | os.PathLike | None = None, workers: int = 1):
        limit = int(limit)
        if limit < 2:
            raise ValueError("limit must be >= 2")
        if segment_size < 2 ** 10:
            raise ValueError("segment_size must be >= 2**10")
        self.limit = limit
        self.segment_size = (int(segment_size) // 128) * 128
        self.cache_path = Path(cache_path) if cache_path is not None else None
        self.workers = max(1, int(workers))
        self.n_index = (limit - 1) // 2 + 1  # odd numbers 1..limit (or limit-1)
        self.n_words = -(-self.n_index // 64)
        words = self._load() if self.cache_path is not None else None
        if words is None:
            words = self._sieve()
            if self.cache_path is not None:
                self._store(words)
        self.words = words
        counts = np.bitwise_count(words)
        self._cum = np.zeros(self.n_words + 1, dtype=np.int64)
        np.cumsum(counts, out=self._cum[1:])

    # -- construction -------------------------------------------------------

    def _sieve(self) -> np.ndarray:
        seg_idx = self.segment_size // 2
        total_idx = self.n_words * 64
        top = 2 * total_idx - 1
        base = _base_primes(math.isqrt(top) + 1)
        words = np.zeros(self.n_words, dtype="<u8")
        starts = list(range(0, total_idx, seg_idx))

        def run(i0: int) -> None:
            i1 = min(i0 + seg_idx, total_idx)
            _accel.sieve_segment(i0, i1, base, words[i0 // 64:i1 // 64])

        if self.workers == 1:
            for i0 in starts:
                run(i0)
        else:
            with ThreadPoolExecutor(self.workers) as ex:
                list(ex.map(run, starts))
        # drop bits for odd numbers beyond the limit
        extra = total_idx - self.n_index
        if extra:
            keep = 64 - extra
            words[-1] &= np.uint64((1 << keep) - 1)
        return words

    def _load(self) -> np.ndarray | None:
        path = self.cache_path
        if path is None or not path.exists():
            return None
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) != _HEADER.size:
                return None
            magic, version, limit, n_words = _HEADER.unpack(head)
            if magic != _MAGIC or version != _VERSION or limit != self.limit or n_words != self.n_words:
                return None
            words = np.fromfile(fh, dtype="<u8", count=n_words)
        if words.shape[0] != self.n_words:
            return None
        return words

    def _store(self, words: np.ndarray) -> None:
        path = self.cache_path
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(_HEADER.pack(_MAGIC, _VERSION, self.limit, self.n_words))
                words.astype("<u8", copy=False).tofile(fh)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    # -- queries ------------------------------------------------------------

    def _check(self, x: float) -> None:
        if x > self.limit:
            raise RangeExceeded(f"{x} exceeds the sieve limit {self.limit}")

    def _odd_count(self, idx: int) -> int:
        """Number of set bits with index <= idx."""
        if idx < 0:
            return 0
        w, b = divmod(idx, 64)
        word = int(self.words[w]) & ((1 << (b + 1)) - 1)
        return int(self._cum[w]) + word.bit_count()

    def pi_int(self, n: int) -> int:
        if n < 2:
            return 0
        self._check(n)
        return 1 + self._odd_count((n - 1) // 2)

    def count_primes(self, x: float) -> int:
        """pi(floor(x))."""
        if x < 0:
            raise ValueError("x must be >= 0")
        self._check(x)
        return self.pi_int(math.floor(x))

    def count_in(self, iv: RealInterval) -> int:
        a, b = iv.integer_bounds()
        self._check(iv.hi)
        if b < a:
            return 0
        return self.pi_int(b) - self.pi_int(a - 1)

    def primes_between(self, a: int, b: int) -> np.ndarray:
        """Primes p with a <= p <= b, ascending, as int64."""
        self._check(b)
        a = max(a, 2)
        if b < a:
            return np.zeros(0, dtype=np.int64)
        ia = a // 2          # first odd index with 2i+1 >= a
        ib = (b - 1) // 2    # last odd index with 2i+1 <= b
        parts = []
        if a <= 2 <= b:
            parts.append(np.array([2], dtype=np.int64))
        if ib >= ia:
            wa, wb = ia // 64, ib // 64
            bits = np.unpackbits(self.words[wa:wb + 1].view(np.uint8), bitorder="little")
            sel = np.flatnonzero(bits[ia - wa * 64:ib - wa * 64 + 1]).astype(np.int64)
            parts.append(2 * (sel + ia) + 1)
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def primes_in(self, iv: RealInterval) -> np.ndarray:
        """Primes inside ``iv`` in ascending order."""
        self._check(iv.hi)
        a, b = iv.integer_bounds()
        return self.primes_between(a, b)

    def reciprocal_power_sum(self, iv: RealInterval, beta: float) -> float:
        """Compensated sum of p**-beta over primes in ``iv``, ascending."""
        if not (0 < beta <= 1):
            raise ValueError("beta must lie in (0, 1]")
        return _accel.power_sum(self.primes_in(iv), beta)


_shared: dict[tuple[int, str | None], PrimeRange] = {}


def shared_range(limit: int, cache: bool = True, workers: int = 1) -> PrimeRange:
    """Process-wide sieve for ``limit``, backed by the on-disk cache when ``cache``."""
    path = default_cache_path(limit) if cache else None
    key = (int(limit), str(path) if path else None)
    if key not in _shared:
        _shared[key] = PrimeRange(limit, cache_path=path, workers=workers)
    return _shared[key]

