"""Dense row-echelon rank over the Mersenne field GF(2^61 - 1).

Products of two 61-bit residues need 122 bits, which numpy's uint64 cannot
hold, so multiplication is emulated with 32-bit limb splits and the Mersenne
reduction x mod (2^61 - 1) = (x >> 61) + (x & mask).  A numba-compiled
kernel is used when numba is importable; the numpy fallback computes the
same elimination with whole-row vector operations.
"""

from __future__ import annotations

import numpy as np

M61 = (1 << 61) - 1

_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S61 = np.uint64(61)
_S3 = np.uint64(3)
_MASK = np.uint64(M61)


def mulmod_np(a, b):
    """(a * b) mod (2^61 - 1) elementwise for uint64 inputs below 2^61 - 1."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    ahi = a >> _S32
    alo = a & _LO32
    bhi = b >> _S32
    blo = b & _LO32
    mid = ahi * blo + alo * bhi          # < 2^62
    lo = alo * blo                       # full 64-bit product
    lo2 = lo + ((mid & _LO32) << _S32)   # may wrap mod 2^64
    carry = (lo2 < lo).astype(np.uint64)
    hi = ahi * bhi + (mid >> _S32) + carry
    # product = hi * 2^64 + lo2 = hi * 8 * 2^61 + lo2
    r = (hi << _S3) + (lo2 >> _S61) + (lo2 & _MASK)
    r = (r >> _S61) + (r & _MASK)
    return np.where(r >= _MASK, r - _MASK, r)


def submod_np(a, b):
    """(a - b) mod (2^61 - 1) elementwise."""
    r = a + (_MASK - b)
    r = (r >> _S61) + (r & _MASK)
    return np.where(r >= _MASK, r - _MASK, r)


def dense_rank_np(a: np.ndarray) -> int:
    """Rank of a uint64 matrix over GF(2^61 - 1), vectorized elimination."""
    a = np.ascontiguousarray(a, dtype=np.uint64)
    m, w = a.shape
    if m == 0 or w == 0:
        return 0
    rank = 0
    for c in range(w):
        nz = np.flatnonzero(a[rank:, c])
        if nz.size == 0:
            continue
        pr = rank + int(nz[0])
        if pr != rank:
            a[[rank, pr], c:] = a[[pr, rank], c:]
        inv = np.uint64(pow(int(a[rank, c]), -1, M61))
        a[rank, c:] = mulmod_np(a[rank, c:], inv)
        if rank + 1 < m:
            f = a[rank + 1 :, c][:, None]
            a[rank + 1 :, c + 1 :] = submod_np(
                a[rank + 1 :, c + 1 :], mulmod_np(f, a[rank, c + 1 :][None, :])
            )
            a[rank + 1 :, c] = 0
        rank += 1
        if rank == m:
            break
    return rank


try:
    from numba import njit, uint64 as _u64

    _NB_MASK = (1 << 61) - 1

    @njit(_u64(_u64, _u64), cache=True, inline="always")
    def _mulmod(a, b):
        ahi = a >> _u64(32)
        alo = a & _u64(0xFFFFFFFF)
        bhi = b >> _u64(32)
        blo = b & _u64(0xFFFFFFFF)
        mid = ahi * blo + alo * bhi
        lo = alo * blo
        lo2 = lo + ((mid & _u64(0xFFFFFFFF)) << _u64(32))
        carry = _u64(1) if lo2 < lo else _u64(0)
        hi = ahi * bhi + (mid >> _u64(32)) + carry
        r = (hi << _u64(3)) + (lo2 >> _u64(61)) + (lo2 & _u64(_NB_MASK))
        r = (r >> _u64(61)) + (r & _u64(_NB_MASK))
        if r >= _u64(_NB_MASK):
            r -= _u64(_NB_MASK)
        return r

    @njit(_u64(_u64), cache=True)
    def _invmod(a):
        e = _u64(_NB_MASK) - _u64(2)
        result = _u64(1)
        base = a
        while e > _u64(0):
            if e & _u64(1):
                result = _mulmod(result, base)
            base = _mulmod(base, base)
            e >>= _u64(1)
        return result

    @njit(cache=True)
    def _dense_rank_nb(a):
        m, w = a.shape
        rank = 0
        for c in range(w):
            pr = -1
            for i in range(rank, m):
                if a[i, c] != _u64(0):
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != rank:
                for j in range(c, w):
                    t = a[rank, j]
                    a[rank, j] = a[pr, j]
                    a[pr, j] = t
            inv = _invmod(a[rank, c])
            for j in range(c, w):
                if a[rank, j]:
                    a[rank, j] = _mulmod(a[rank, j], inv)
            for i in range(rank + 1, m):
                f = a[i, c]
                if f:
                    a[i, c] = _u64(0)
                    for j in range(c + 1, w):
                        v = a[rank, j]
                        if v:
                            x = a[i, j]
                            y = _mulmod(f, v)
                            if x >= y:
                                a[i, j] = x - y
                            else:
                                a[i, j] = x + _u64(_NB_MASK) - y
            rank += 1
            if rank == m:
                break
        return rank

    def dense_rank_nb(a: np.ndarray) -> int:
        a = np.ascontiguousarray(a, dtype=np.uint64)
        if a.shape[0] == 0 or a.shape[1] == 0:
            return 0
        return int(_dense_rank_nb(a))

    HAVE_NUMBA = True
    dense_rank = dense_rank_nb
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    dense_rank_nb = None
    dense_rank = dense_rank_np
