"""Numpy implementations of the hot kernels.

Selected at import time when the compiled extension is unavailable (or
when SAFECOMB_KERNELS=python).  Each function matches the native
extension's contract; integer-valued intermediates (hamming counts, MST
tie-breaks, resample indices) are computed identically, so the two
backends agree exactly except for float summation order inside
``bootstrap_mean_diffs`` (bounded by ~1e-12 relative).
"""

from __future__ import annotations

import numpy as np

from ..rng import GOLDEN, mix64_array

BACKEND_NAME = "python"

if hasattr(np, "bitwise_count"):
    def _popcount(x: np.ndarray) -> np.ndarray:
        return np.bitwise_count(x)
else:  # pragma: no cover - numpy >= 2.0 in normal installs
    _POP16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)

    def _popcount(x: np.ndarray) -> np.ndarray:
        lo = x & np.uint64(0xFFFF)
        hi = (x >> np.uint64(16)) & np.uint64(0xFFFF)
        return _POP16[lo.astype(np.int64)] + _POP16[hi.astype(np.int64)]


def core_distances(
    packed: np.ndarray, weights: np.ndarray, min_samples: int, n_bits: int = 20
) -> np.ndarray:
    """Euclidean distance to the min_samples-th nearest neighbor.

    Neighbors are counted with multiplicity (``weights``), the point's own
    weight included at distance zero.
    """
    m = len(packed)
    packed = packed.astype(np.uint64)
    out = np.empty(m, dtype=np.float64)
    chunk = max(1, min(m, 8_000_000 // max(m, 1) + 1))
    sq_dist = np.sqrt(np.arange(n_bits + 1, dtype=np.float64))
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        ham = _popcount(packed[start:stop, None] ^ packed[None, :]).astype(np.int64)
        hist = np.zeros((stop - start, n_bits + 1), dtype=np.float64)
        rows = np.repeat(np.arange(stop - start), m)
        np.add.at(hist, (rows, ham.ravel()), np.tile(weights, stop - start))
        cum = np.cumsum(hist, axis=1)
        k = np.argmax(cum >= min_samples, axis=1)
        out[start:stop] = sq_dist[k]
    return out


def mst_edges(packed: np.ndarray, core: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Prim MST over the mutual reachability graph.

    Ties are broken by preferring the lower-indexed attachment vertex; the
    next vertex added is the lowest-indexed one among minimum-distance
    candidates.  Returns (u, v, weight) arrays of length m - 1.
    """
    m = len(packed)
    packed = packed.astype(np.uint64)
    if m <= 1:
        return (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))
    in_tree = np.zeros(m, dtype=bool)
    dist = np.full(m, np.inf)
    parent = np.zeros(m, dtype=np.int64)
    in_tree[0] = True
    ham = _popcount(packed ^ packed[0]).astype(np.float64)
    dist = np.maximum(np.maximum(core, core[0]), np.sqrt(ham))
    dist[0] = 0.0
    us = np.empty(m - 1, dtype=np.int64)
    vs = np.empty(m - 1, dtype=np.int64)
    ws = np.empty(m - 1, dtype=np.float64)
    for step in range(m - 1):
        cand = np.where(in_tree, np.inf, dist)
        u = int(np.argmin(cand))
        in_tree[u] = True
        us[step] = parent[u]
        vs[step] = u
        ws[step] = dist[u]
        ham = _popcount(packed ^ packed[u]).astype(np.float64)
        mr = np.maximum(np.maximum(core, core[u]), np.sqrt(ham))
        better = ~in_tree & (mr < dist)
        tie = ~in_tree & (mr == dist) & (u < parent)
        dist[better] = mr[better]
        parent[better | tie] = u
    return us, vs, ws


def bootstrap_mean_diffs(
    a: np.ndarray, b: np.ndarray, resamples: int, stream_seed: int
) -> np.ndarray:
    """Resampled mean differences mean(a*) - mean(b*).

    Draw t of a resample consumes stream counter r * (na + nb) + t + 1,
    a-draws first; identical to the native kernel's consumption order.
    """
    na, nb = len(a), len(b)
    per = na + nb
    out = np.empty(resamples, dtype=np.float64)
    # chunk to bound the index-matrix size
    rows = max(1, min(resamples, 4_000_000 // per + 1))
    seed = np.uint64(stream_seed)
    for start in range(0, resamples, rows):
        stop = min(start + rows, resamples)
        t = np.arange(start * per + 1, stop * per + 1, dtype=np.uint64).reshape(
            stop - start, per
        )
        z = mix64_array(seed + t * np.uint64(GOLDEN)) >> np.uint64(11)
        idx_a = (z[:, :na] % np.uint64(na)).astype(np.int64)
        idx_b = (z[:, na:] % np.uint64(nb)).astype(np.int64)
        out[start:stop] = a[idx_a].mean(axis=1) - b[idx_b].mean(axis=1)
    return out
