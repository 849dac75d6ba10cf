"""Hot loops: segment sieving, bit packing and compensated kernel sums.

Each kernel has a numba version and a pure-numpy version with the same
signature.  Set ``TGROUPS_NO_NUMBA=1`` (or run without numba installed) to
use the numpy versions.
"""
from __future__ import annotations

import math
import os
from typing import Any, Callable

import numpy as np

_DISABLED = os.environ.get("TGROUPS_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args: Any, **_: Any) -> Callable:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

BACKEND = "numba" if HAVE_NUMBA else "numpy"

# Sums are reduced in fixed-size chunks so that the result does not depend on
# how chunks are distributed over workers.
SUM_CHUNK = 1 << 16


# -- sieve ------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _sieve_segment_nb(i0, i1, base, words_out):
    # odd-only: index i stands for 2*i + 1
    n = i1 - i0
    seg = np.ones(n, dtype=np.uint8)
    if i0 == 0:
        seg[0] = 0
    hi = 2 * (i1 - 1) + 1
    for p in base:
        pp = p * p
        if pp > hi:
            break
        lo_val = 2 * i0 + 1
        if pp >= lo_val:
            m = pp
        else:
            m = ((lo_val + p - 1) // p) * p
            if m % 2 == 0:
                m += p
        j = (m - 1) // 2 - i0
        while j < n:
            seg[j] = 0
            j += p
    nw = n // 64
    for w in range(nw):
        acc = np.uint64(0)
        base_j = w * 64
        for b in range(64):
            if seg[base_j + b]:
                acc |= np.uint64(1) << np.uint64(b)
        words_out[w] = acc


def _sieve_segment_np(i0, i1, base, words_out):
    n = i1 - i0
    seg = np.ones(n, dtype=bool)
    if i0 == 0:
        seg[0] = False
    hi = 2 * (i1 - 1) + 1
    lo_val = 2 * i0 + 1
    for p in base.tolist():
        pp = p * p
        if pp > hi:
            break
        if pp >= lo_val:
            m = pp
        else:
            m = -(-lo_val // p) * p
            if m % 2 == 0:
                m += p
        seg[(m - 1) // 2 - i0::p] = False
    words_out[:] = np.packbits(seg, bitorder="little").view("<u8")


sieve_segment = _sieve_segment_nb if HAVE_NUMBA else _sieve_segment_np


# -- compensated sums -------------------------------------------------------

@njit(cache=True, nogil=True)
def _power_sum_nb(p, beta):
    s = 0.0
    c = 0.0
    for i in range(p.shape[0]):
        x = math.exp(-beta * math.log(p[i]))
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


@njit(cache=True, nogil=True)
def _kernel_sum_nb(p, beta, arg_scale):
    s = 0.0
    c = 0.0
    for i in range(p.shape[0]):
        lp = math.log(p[i])
        sn = math.sin(arg_scale * lp)
        x = sn * sn * math.exp(-beta * lp)
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


def _power_sum_np(p, beta):
    return math.fsum(np.exp(-beta * np.log(p.astype(np.float64))).tolist())


def _kernel_sum_np(p, beta, arg_scale):
    lp = np.log(p.astype(np.float64))
    return math.fsum((np.sin(arg_scale * lp) ** 2 * np.exp(-beta * lp)).tolist())


_power_sum = _power_sum_nb if HAVE_NUMBA else _power_sum_np
_kernel_sum = _kernel_sum_nb if HAVE_NUMBA else _kernel_sum_np


def _chunked(fn, p, *args):
    if p.shape[0] <= SUM_CHUNK:
        return float(fn(p, *args)) if p.shape[0] else 0.0
    parts = [fn(p[i:i + SUM_CHUNK], *args) for i in range(0, p.shape[0], SUM_CHUNK)]
    return math.fsum(parts)


def power_sum(p: np.ndarray, beta: float) -> float:
    """Compensated sum of p**-beta in the given order."""
    return _chunked(_power_sum, np.ascontiguousarray(p, dtype=np.int64), float(beta))


def kernel_sum(p: np.ndarray, beta: float, arg_scale: float) -> float:
    """Compensated sum of sin(arg_scale*log p)**2 * p**-beta."""
    return _chunked(_kernel_sum, np.ascontiguousarray(p, dtype=np.int64), float(beta), float(arg_scale))
