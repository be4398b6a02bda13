# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Native kernels: core distances, Prim MST, bootstrap resampling.

Contracts mirror ``_fallback``; see that module for tie-break and
stream-consumption rules.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

ctypedef cnp.uint64_t u64
ctypedef cnp.int64_t i64
ctypedef cnp.float64_t f64

cdef extern from *:
    """
    static inline int popcount64(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    """
    int popcount64(unsigned long long x) nogil

cdef u64 _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 _MIX2 = 0x94D049BB133111EBULL

BACKEND_NAME = "native"


cdef inline u64 _mix64(u64 z) nogil:
    z ^= z >> 30
    z *= _MIX1
    z ^= z >> 27
    z *= _MIX2
    z ^= z >> 31
    return z


def core_distances(packed, weights, int min_samples, int n_bits=20):
    cdef cnp.ndarray[u64, ndim=1] p = np.ascontiguousarray(packed, dtype=np.uint64)
    cdef cnp.ndarray[f64, ndim=1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t m = p.shape[0]
    cdef cnp.ndarray[f64, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[f64, ndim=1] hist = np.zeros(n_bits + 1, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef int h, k
    cdef double cum, ms = <double> min_samples
    with nogil:
        for i in range(m):
            for h in range(n_bits + 1):
                hist[h] = 0.0
            for j in range(m):
                h = popcount64(p[i] ^ p[j])
                hist[h] += w[j]
            cum = 0.0
            k = n_bits
            for h in range(n_bits + 1):
                cum += hist[h]
                if cum >= ms:
                    k = h
                    break
            out[i] = sqrt(<double> k)
    return out


def mst_edges(packed, core):
    cdef cnp.ndarray[u64, ndim=1] p = np.ascontiguousarray(packed, dtype=np.uint64)
    cdef cnp.ndarray[f64, ndim=1] c = np.ascontiguousarray(core, dtype=np.float64)
    cdef Py_ssize_t m = p.shape[0]
    if m <= 1:
        return (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))
    cdef cnp.ndarray[i64, ndim=1] us = np.empty(m - 1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] vs = np.empty(m - 1, dtype=np.int64)
    cdef cnp.ndarray[f64, ndim=1] ws = np.empty(m - 1, dtype=np.float64)
    cdef cnp.ndarray[f64, ndim=1] dist = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] parent = np.zeros(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] in_tree = np.zeros(m, dtype=np.uint8)
    cdef Py_ssize_t step, j, u
    cdef double d, mr, best
    with nogil:
        in_tree[0] = 1
        for j in range(m):
            d = sqrt(<double> popcount64(p[j] ^ p[0]))
            mr = d
            if c[j] > mr:
                mr = c[j]
            if c[0] > mr:
                mr = c[0]
            dist[j] = mr
        dist[0] = 0.0
        for step in range(m - 1):
            u = -1
            best = 0.0
            for j in range(m):
                if in_tree[j]:
                    continue
                if u < 0 or dist[j] < best:
                    best = dist[j]
                    u = j
            in_tree[u] = 1
            us[step] = parent[u]
            vs[step] = u
            ws[step] = dist[u]
            for j in range(m):
                if in_tree[j]:
                    continue
                d = sqrt(<double> popcount64(p[j] ^ p[u]))
                mr = d
                if c[j] > mr:
                    mr = c[j]
                if c[u] > mr:
                    mr = c[u]
                if mr < dist[j]:
                    dist[j] = mr
                    parent[j] = u
                elif mr == dist[j] and u < parent[j]:
                    parent[j] = u
    return us, vs, ws


def bootstrap_mean_diffs(a, b, int resamples, stream_seed):
    cdef cnp.ndarray[f64, ndim=1] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[f64, ndim=1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = aa.shape[0], nb = bb.shape[0]
    cdef u64 seed = <u64> (int(stream_seed) & 0xFFFFFFFFFFFFFFFF)
    cdef cnp.ndarray[f64, ndim=1] out = np.empty(resamples, dtype=np.float64)
    cdef Py_ssize_t r, t
    cdef u64 ctr, z
    cdef double sa, sb
    with nogil:
        ctr = 1
        for r in range(resamples):
            sa = 0.0
            for t in range(na):
                z = _mix64(seed + ctr * _GOLDEN)
                ctr += 1
                sa += aa[(z >> 11) % <u64> na]
            sb = 0.0
            for t in range(nb):
                z = _mix64(seed + ctr * _GOLDEN)
                ctr += 1
                sb += bb[(z >> 11) % <u64> nb]
            out[r] = sa / na - sb / nb
    return out
