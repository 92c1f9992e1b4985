"""Pure-Python reference versions of the hot kernels.

These mirror ``_ckernels.pyx`` operation for operation so both backends
return identical results.  Big integers never overflow here.
"""
from __future__ import annotations

import heapq
from math import comb, gcd

import numpy as np


def echelon(indptr, indices, data, ncols):
    """Rank of an integer CSR matrix by fraction-free sparse elimination.

    Returns ``(rank, pivot_rows)``; ``pivot_rows`` lists the input rows that
    were independent of all earlier rows, in input order.
    """
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    data = [int(x) for x in data]
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    prows: list[int] = []
    for r in range(len(indptr) - 1):
        w: dict[int, int] = {}
        for t in range(indptr[r], indptr[r + 1]):
            c = indices[t]
            w[c] = w.get(c, 0) + data[t]
        w = {c: v for c, v in w.items() if v}
        heap = list(w)
        heapq.heapify(heap)
        queued = set(heap)
        while heap:
            c = heapq.heappop(heap)
            queued.discard(c)
            x = w.get(c, 0)
            if not x:
                continue
            prow = pivots.get(c)
            if prow is None:
                g = 0
                for v in w.values():
                    g = gcd(g, v)
                if x < 0:
                    g = -g
                pivots[c] = {cc: v // g for cc, v in w.items()}
                rank += 1
                prows.append(r)
                break
            p = prow[c]
            if x % p == 0:
                f, s = x // p, 1
            else:
                g = gcd(x, p)
                f, s = x // g, p // g
                for cc in w:
                    w[cc] *= s
            for cc, v in prow.items():
                nv = w.get(cc, 0) - f * v
                if nv:
                    w[cc] = nv
                    if cc not in queued:
                        heapq.heappush(heap, cc)
                        queued.add(cc)
                else:
                    w.pop(cc, None)
    return rank, np.asarray(prows, dtype=np.int64)


def _binom_table(N):
    return [[comb(a, b) for b in range(N + 1)] for a in range(N + 1)]


def mask_rank(mask, N, k, table=None):
    """Lex position of a degree-``k`` bitmask among all degree-``k`` masks."""
    table = table or _binom_table(N)
    idx = 0
    prev = -1
    pos = 0
    m = mask
    while m:
        low = m & -m
        c = low.bit_length() - 1
        # monomials sharing the prefix but with a smaller entry at this slot
        for v in range(prev + 1, c):
            idx += table[N - v - 1][k - pos - 1]
        prev = c
        pos += 1
        m ^= low
    return idx


def ideal_rows(low_masks, rel_indptr, rel_masks, rel_coefs, N, k):
    """CSR rows of ``m * r`` for every low-degree monomial ``m`` and relation ``r``.

    Columns index degree-``k`` monomials in lex order.  Zero products are
    dropped, so the row count can be smaller than ``len(low_masks) * #relations``.
    """
    table = _binom_table(N)
    nrel = len(rel_indptr) - 1
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    for m in low_masks:
        m = int(m)
        for r in range(nrel):
            start = len(indices)
            for t in range(int(rel_indptr[r]), int(rel_indptr[r + 1])):
                rm = int(rel_masks[t])
                if m & rm:
                    continue
                inv = 0
                rest = rm
                while rest:
                    low = rest & -rest
                    j = low.bit_length() - 1
                    inv += (m >> (j + 1)).bit_count()
                    rest ^= low
                c = int(rel_coefs[t])
                indices.append(mask_rank(m | rm, N, k, table))
                data.append(-c if inv & 1 else c)
            if len(indices) > start:
                indptr.append(len(indices))
    return (np.asarray(indptr, dtype=np.int64), np.asarray(indices, dtype=np.int64),
            np.asarray(data, dtype=np.int64))
