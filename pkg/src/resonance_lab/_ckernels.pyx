# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``.

Arithmetic is int64 with explicit overflow checks; on overflow the kernel
raises ``OverflowError`` and the caller reruns the pure-Python version.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef extern from *:
    """
    static inline int rl_mul_ovf(int64_t a, int64_t b, int64_t *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int rl_sub_ovf(int64_t a, int64_t b, int64_t *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    static inline int rl_popcount(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    static inline int rl_ctz(unsigned long long x) {
        return __builtin_ctzll(x);
    }
    """
    int rl_mul_ovf(int64_t a, int64_t b, int64_t *r) nogil
    int rl_sub_ovf(int64_t a, int64_t b, int64_t *r) nogil
    int rl_popcount(unsigned long long x) nogil
    int rl_ctz(unsigned long long x) nogil


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef struct Heap:
    int64_t *data
    Py_ssize_t size
    Py_ssize_t cap


cdef inline int heap_push(Heap *h, int64_t v) nogil:
    cdef Py_ssize_t i, parent
    cdef int64_t *nd
    if h.size == h.cap:
        nd = <int64_t *> realloc(h.data, 2 * h.cap * sizeof(int64_t))
        if nd == NULL:
            return -1
        h.data = nd
        h.cap *= 2
    i = h.size
    h.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h.data[parent] <= v:
            break
        h.data[i] = h.data[parent]
        i = parent
    h.data[i] = v
    return 0


cdef inline int64_t heap_pop(Heap *h) nogil:
    cdef int64_t top = h.data[0]
    cdef int64_t last
    cdef Py_ssize_t i = 0, child
    h.size -= 1
    if h.size == 0:
        return top
    last = h.data[h.size]
    while True:
        child = 2 * i + 1
        if child >= h.size:
            break
        if child + 1 < h.size and h.data[child + 1] < h.data[child]:
            child += 1
        if h.data[child] >= last:
            break
        h.data[i] = h.data[child]
        i = child
    h.data[i] = last
    return top


def echelon(const int64_t[:] indptr, const int64_t[:] indices,
            const int64_t[:] data, Py_ssize_t ncols):
    """Rank of an integer CSR matrix by fraction-free sparse elimination.

    Returns ``(rank, pivot_rows)``; ``pivot_rows`` lists the input rows that
    were independent of all earlier rows, in input order.
    """
    cdef Py_ssize_t nrows = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prows_arr = np.empty(min(nrows, ncols) + 1, dtype=np.int64)
    cdef int64_t[:] prows = prows_arr
    cdef int64_t *w = <int64_t *> malloc((ncols + 1) * sizeof(int64_t))
    cdef char *queued = <char *> malloc(ncols + 1)
    cdef char *touched = <char *> malloc(ncols + 1)
    cdef int64_t *tlist = <int64_t *> malloc((ncols + 1) * sizeof(int64_t))
    cdef int64_t *piv_start = <int64_t *> malloc((ncols + 1) * sizeof(int64_t))
    cdef int64_t *piv_len = <int64_t *> malloc((ncols + 1) * sizeof(int64_t))
    cdef Py_ssize_t pool_cap = 1024, pool_size = 0
    cdef int64_t *pool_c = <int64_t *> malloc(pool_cap * sizeof(int64_t))
    cdef int64_t *pool_v = <int64_t *> malloc(pool_cap * sizeof(int64_t))
    cdef Heap heap
    heap.cap = 64
    heap.size = 0
    heap.data = <int64_t *> malloc(heap.cap * sizeof(int64_t))
    cdef Py_ssize_t r, t, i, ntouched, rank = 0
    cdef int64_t c, cc, x, p, f, s, g, v, tmp, nv
    cdef int status = 0
    cdef int64_t *nc
    cdef int64_t *nvp

    if (w == NULL or queued == NULL or touched == NULL or tlist == NULL or piv_start == NULL
            or piv_len == NULL or pool_c == NULL or pool_v == NULL or heap.data == NULL):
        status = 2
    else:
        memset(w, 0, (ncols + 1) * sizeof(int64_t))
        memset(queued, 0, ncols + 1)
        memset(touched, 0, ncols + 1)
        for i in range(ncols):
            piv_len[i] = 0
            piv_start[i] = -1

    with nogil:
        r = 0
        while r < nrows and status == 0:
            ntouched = 0
            heap.size = 0
            for t in range(indptr[r], indptr[r + 1]):
                c = indices[t]
                w[c] += data[t]
                if not touched[c]:
                    touched[c] = 1
                    tlist[ntouched] = c
                    ntouched += 1
            for i in range(ntouched):
                c = tlist[i]
                if w[c] != 0:
                    queued[c] = 1
                    if heap_push(&heap, c) != 0:
                        status = 2
            while heap.size > 0 and status == 0:
                c = heap_pop(&heap)
                queued[c] = 0
                x = w[c]
                if x == 0:
                    continue
                if piv_start[c] < 0:
                    # new pivot: store the row divided by its content, lead positive
                    g = 0
                    for i in range(ntouched):
                        if w[tlist[i]] != 0:
                            g = _gcd(g, w[tlist[i]])
                    if x < 0:
                        g = -g
                    while pool_size + ntouched > pool_cap:
                        nc = <int64_t *> realloc(pool_c, 2 * pool_cap * sizeof(int64_t))
                        if nc == NULL:
                            status = 2
                            break
                        pool_c = nc
                        nvp = <int64_t *> realloc(pool_v, 2 * pool_cap * sizeof(int64_t))
                        if nvp == NULL:
                            status = 2
                            break
                        pool_v = nvp
                        pool_cap *= 2
                    if status:
                        break
                    piv_start[c] = pool_size
                    for i in range(ntouched):
                        cc = tlist[i]
                        if w[cc] != 0:
                            pool_c[pool_size] = cc
                            pool_v[pool_size] = w[cc] // g
                            pool_size += 1
                    piv_len[c] = pool_size - piv_start[c]
                    prows[rank] = r
                    rank += 1
                    break
                p = 0
                for i in range(piv_start[c], piv_start[c] + piv_len[c]):
                    if pool_c[i] == c:
                        p = pool_v[i]
                        break
                if x % p == 0:
                    f = x // p
                else:
                    g = _gcd(x, p)
                    f = x // g
                    s = p // g
                    for i in range(ntouched):
                        if rl_mul_ovf(w[tlist[i]], s, &tmp):
                            status = 1
                            break
                        w[tlist[i]] = tmp
                    if status:
                        break
                for i in range(piv_start[c], piv_start[c] + piv_len[c]):
                    cc = pool_c[i]
                    v = pool_v[i]
                    if rl_mul_ovf(f, v, &tmp) or rl_sub_ovf(w[cc], tmp, &nv):
                        status = 1
                        break
                    w[cc] = nv
                    if not touched[cc]:
                        touched[cc] = 1
                        tlist[ntouched] = cc
                        ntouched += 1
                    if nv != 0 and not queued[cc]:
                        queued[cc] = 1
                        if heap_push(&heap, cc) != 0:
                            status = 2
                            break
            for i in range(ntouched):
                c = tlist[i]
                w[c] = 0
                touched[c] = 0
                queued[c] = 0
            r += 1

    free(w); free(queued); free(touched); free(tlist)
    free(piv_start); free(piv_len); free(pool_c); free(pool_v); free(heap.data)
    if status == 1:
        raise OverflowError("int64 overflow during elimination")
    if status == 2:
        raise MemoryError()
    return rank, prows_arr[:rank].copy()


def ideal_rows(const uint64_t[:] low_masks, const int64_t[:] rel_indptr,
               const uint64_t[:] rel_masks, const int64_t[:] rel_coefs, int N, int k):
    """CSR rows of ``m * r`` for every low-degree monomial ``m`` and relation ``r``."""
    cdef Py_ssize_t nlow = low_masks.shape[0]
    cdef Py_ssize_t nrel = rel_indptr.shape[0] - 1
    cdef Py_ssize_t cap = max(16, nlow * rel_masks.shape[0])
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_ptr = np.empty(nlow * nrel + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_idx = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_val = np.empty(cap, dtype=np.int64)
    cdef int64_t[:] optr = out_ptr
    cdef int64_t[:] oidx = out_idx
    cdef int64_t[:] oval = out_val
    cdef cnp.ndarray[cnp.int64_t, ndim=2] table_arr = np.zeros((N + 1, N + 1), dtype=np.int64)
    cdef int64_t[:, :] table = table_arr
    cdef Py_ssize_t a, b, li, r, t, nnz = 0, nr = 0, start
    cdef uint64_t m, rm, rest, low, mm
    cdef int j, inv, pos, prev, cpos, vv
    cdef int64_t idx, coef
    for a in range(N + 1):
        table[a, 0] = 1
        for b in range(1, a + 1):
            table[a, b] = table[a - 1, b - 1] + (table[a - 1, b] if b <= a - 1 else 0)
    optr[0] = 0
    with nogil:
        for li in range(nlow):
            m = low_masks[li]
            for r in range(nrel):
                start = nnz
                for t in range(rel_indptr[r], rel_indptr[r + 1]):
                    rm = rel_masks[t]
                    if m & rm:
                        continue
                    inv = 0
                    rest = rm
                    while rest:
                        j = rl_ctz(rest)
                        if j < 63:
                            inv += rl_popcount(m >> (j + 1))
                        rest &= rest - 1
                    coef = rel_coefs[t]
                    mm = m | rm
                    idx = 0
                    prev = -1
                    pos = 0
                    while mm:
                        cpos = rl_ctz(mm)
                        for vv in range(prev + 1, cpos):
                            idx += table[N - vv - 1, k - pos - 1]
                        prev = cpos
                        pos += 1
                        mm &= mm - 1
                    oidx[nnz] = idx
                    oval[nnz] = -coef if (inv & 1) else coef
                    nnz += 1
                if nnz > start:
                    nr += 1
                    optr[nr] = nnz
    return out_ptr[:nr + 1].copy(), out_idx[:nnz].copy(), out_val[:nnz].copy()
