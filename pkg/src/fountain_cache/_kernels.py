"""Compiled inner loops for encoding and incremental elimination.

Vectors over GF(2^m) are stored bit-sliced: ``m`` planes of packed uint64
words, plane ``i`` holding bit ``i`` of every element (element ``a`` sits at
bit ``a % 64`` of word ``a // 64``).  Adding vectors is XOR on words and
multiplying by ``x`` is a plane shift plus reduction, so scaling a row by
any constant is at most ``m`` shifted copies XORed together.

A received symbol of a length-``k`` block is one ``(m, W)`` array: the
coefficients at positions ``0..k-1`` and the received value at position
``k``.

The echelon store ``S`` has shape ``(k, G, 16, m, W)`` with ``G = ceil(m/4)``.
For a pivot at column ``p`` with normalized row ``r`` (leading 1 at column
``p``), ``S[p, g, c] = (c * x^(4g)) * r``, so subtracting ``c * r`` for any
coefficient is one table row per nibble of ``c``; nibble 0 is an all-zero
row, which keeps the reduction branch-free.  Rows without a pivot are
never read and may hold garbage.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_ONE = np.uint64(1)
_ZERO = np.uint64(0)


def words_for(k: int) -> int:
    return (k + 1 + 63) // 64


@njit(cache=True)
def encode_values(cols, u, mul):
    n, k = cols.shape
    out = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        acc = 0
        for a in range(k):
            acc ^= mul[cols[i, a], u[a]]
        out[i] = acc
    return out


@njit(cache=True)
def pack_vector(elems, W, m):
    """Bit-slice a uint8 element vector into ``(m, W)`` words."""
    v = np.zeros((m, W), dtype=np.uint64)
    for w in range(W):
        lo = w * 64
        hi = min(lo + 64, elems.shape[0])
        for i in range(m):
            acc = _ZERO
            for a in range(lo, hi):
                acc |= np.uint64((elems[a] >> i) & 1) << np.uint64(a - lo)
            v[i, w] = acc
    return v


@njit(cache=True)
def unpack_vector(v, n):
    m = v.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    for a in range(n):
        w = a >> 6
        sh = np.uint64(a & 63)
        e = 0
        for i in range(m):
            e |= int((v[i, w] >> sh) & _ONE) << i
        out[a] = e
    return out


@njit(cache=True)
def _times_x(v, poly):
    m, W = v.shape
    for ww in range(W):
        top = v[m - 1, ww]
        for i in range(m - 1, 0, -1):
            if (poly >> i) & 1:
                v[i, ww] = v[i - 1, ww] ^ top
            else:
                v[i, ww] = v[i - 1, ww]
        v[0, ww] = top


@njit(cache=True)
def _parity(x):
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    return int(x & _ONE)


@njit(cache=True)
def _reduce_poly(e, m, poly):
    for d in range(2 * m - 2, m - 1, -1):
        if (e >> d) & 1:
            e ^= poly << (d - m)
    return e


@njit(cache=True)
def _inner(v, U, m, poly):
    """Field inner product of two packed vectors (positions beyond U's support ignored)."""
    W = U.shape[1]
    e = 0
    for i in range(m):
        for j in range(m):
            acc = _ZERO
            for w in range(W):
                acc ^= v[i, w] & U[j, w]
            e ^= _parity(acc) << (i + j)
    return _reduce_poly(e, m, poly)


def store_shape(k: int, m: int) -> tuple[int, int, int, int, int]:
    return (k, (m + 3) // 4, 16, m, words_for(k))


@njit(cache=True)
def _ctz4(c):
    n = 0
    while (c & 1) == 0:
        c >>= 1
        n += 1
    return n


@njit(cache=True)
def _insert_pivot(S, p, v, c, base, inv, poly):
    """Store ``inv(c) * v`` as pivot row ``p`` together with its multiple tables."""
    G, _, m, W = S.shape[1], S.shape[2], S.shape[3], S.shape[4]
    s = inv[c]
    # base[b] walks through x^b * v; accumulate s * v into base row 0 afterwards
    row = np.zeros((m, W), dtype=np.uint64)
    base[0] = v
    for b in range(m):
        if b > 0:
            base[b] = base[b - 1]
            _times_x(base[b], poly)
        if (s >> b) & 1:
            for i in range(m):
                for ww in range(W):
                    row[i, ww] ^= base[b, i, ww]
    base[0] = row
    for b in range(1, m):
        base[b] = base[b - 1]
        _times_x(base[b], poly)
    for g in range(G):
        S[p, g, 0] = 0
        top = min(4, m - 4 * g)
        for cg in range(1, 1 << top):
            low = cg & (cg - 1)
            b = 4 * g + _ctz4(cg)
            for i in range(m):
                for ww in range(W):
                    S[p, g, cg, i, ww] = S[p, g, low, i, ww] ^ base[b, i, ww]


@njit(cache=True)
def _absorb_packed(S, pivot, v, base, inv, poly):
    k = pivot.shape[0]
    G, m, W = S.shape[1], S.shape[3], S.shape[4]
    for p in range(k):
        w = p >> 6
        sh = np.uint64(p & 63)
        c = 0
        for i in range(m):
            c |= int((v[i, w] >> sh) & _ONE) << i
        if not pivot[p]:
            if c == 0:
                continue
            _insert_pivot(S, p, v, c, base, inv, poly)
            pivot[p] = True
            return 1
        for g in range(G):
            t = S[p, g, (c >> (4 * g)) & 15]
            for i in range(m):
                for ww in range(w, W):
                    v[i, ww] ^= t[i, ww]
    return 0


@njit(cache=True)
def absorb(S, pivot, col, value, inv, poly):
    """Reduce one received column against the store; 1 if it raised the rank."""
    k = pivot.shape[0]
    m, W = S.shape[3], S.shape[4]
    full = np.empty(k + 1, dtype=np.uint8)
    full[:k] = col
    full[k] = value
    base = np.empty((m, m, W), dtype=np.uint64)
    return _absorb_packed(S, pivot, pack_vector(full, W, m), base, inv, poly)


@njit(cache=True)
def absorb_until_full(S, pivot, rank, cols, values, inv, poly):
    """Absorb element-form columns in order until full rank.

    Returns ``(rank, consumed)``; ``consumed`` counts the columns examined.
    """
    k = pivot.shape[0]
    m, W = S.shape[3], S.shape[4]
    full = np.empty(k + 1, dtype=np.uint8)
    base = np.empty((m, m, W), dtype=np.uint64)
    consumed = 0
    for n in range(cols.shape[0]):
        if rank == k:
            break
        full[:k] = cols[n]
        full[k] = values[n]
        rank += _absorb_packed(S, pivot, pack_vector(full, W, m), base, inv, poly)
        consumed += 1
    return rank, consumed


@njit(cache=True)
def encode_packed(raw, U, k, poly):
    """Turn raw random words ``(n, m, W)`` into packed coded symbols, in place.

    Bits at positions ``>= k`` are cleared, then each symbol's value
    (coefficients dotted with the packed source block ``U``) is written at
    position ``k``.
    """
    n, m, W = raw.shape
    wk = k >> 6
    shk = np.uint64(k & 63)
    keep = (_ONE << shk) - _ONE
    for s in range(n):
        v = raw[s]
        for i in range(m):
            v[i, wk] &= keep
            for w in range(wk + 1, W):
                v[i, w] = _ZERO
        e = _inner(v, U, m, poly)
        for i in range(m):
            v[i, wk] |= np.uint64((e >> i) & 1) << shk


@njit(cache=True)
def absorb_stream_until_full(S, pivot, rank, packed, inv, poly):
    """Absorb packed symbols in order until full rank; returns ``(rank, consumed)``."""
    k = pivot.shape[0]
    m, W = S.shape[3], S.shape[4]
    base = np.empty((m, m, W), dtype=np.uint64)
    consumed = 0
    for n in range(packed.shape[0]):
        if rank == k:
            break
        rank += _absorb_packed(S, pivot, packed[n], base, inv, poly)
        consumed += 1
    return rank, consumed


@njit(cache=True)
def unpack_rows(S, pivot):
    """Element view ``(k, k + 1)`` of the normalized pivot rows (zero where no pivot)."""
    k = pivot.shape[0]
    out = np.zeros((k, k + 1), dtype=np.uint8)
    for p in range(k):
        if pivot[p]:
            out[p] = unpack_vector(S[p, 0, 1], k + 1)
    return out


@njit(cache=True)
def back_substitute(rows, mul):
    k = rows.shape[0]
    u = np.zeros(k, dtype=np.uint8)
    for p in range(k - 1, -1, -1):
        acc = rows[p, k]
        for a in range(p + 1, k):
            acc ^= mul[rows[p, a], u[a]]
        u[p] = acc
    return u
