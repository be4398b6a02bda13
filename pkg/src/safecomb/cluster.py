"""Density clustering of binary feature vectors.

The pipeline is HDBSCAN over Euclidean distance on 20-bit vectors:
core distances -> mutual reachability -> minimum spanning tree ->
single-linkage hierarchy -> condensed tree pruned at min_cluster_size ->
excess-of-mass selection -> labels, with approximate prediction to extend
a subsample fit to new points.

Exact-duplicate vectors are collapsed to weighted points before any
neighbor computation and re-expanded for labeling.  A distinct vector is
treated as an atom: it never shatters into copies, so zero-distance
merges (and the infinite-lambda spikes they cause in point-level
implementations) cannot occur.  Distances between distinct binary
vectors are at least 1, which keeps every lambda finite.

Determinism: subsampling and all tie-breaks are fixed functions of the
data and the seed.  Distinct points are indexed in packed-value order;
MST ties prefer the lower-indexed attachment vertex and the
lower-indexed next vertex; edges are processed in (weight, min, max)
lexicographic order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .records import CorpusFrame, FeatureVector
from .rng import Stream, derive_seed
from .taxonomy import N_CATEGORIES

NOISE = -1


class ClusterError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterParams:
    min_cluster_size: int = 100
    min_samples: int = 25
    metric: str = "euclidean"
    subsample_size: int = 300_000
    selection: str = "excess_of_mass"
    seed: int = 0

    def validate(self) -> None:
        if self.min_cluster_size < 2:
            raise ClusterError("min_cluster_size must be >= 2")
        if self.min_samples < 1:
            raise ClusterError("min_samples must be >= 1")
        if self.min_samples > self.min_cluster_size:
            raise ClusterError("min_samples must not exceed min_cluster_size")
        if self.subsample_size < self.min_cluster_size:
            raise ClusterError("subsample_size must be >= min_cluster_size")
        if self.metric != "euclidean":
            raise ClusterError(f"unsupported metric: {self.metric!r}")
        if self.selection != "excess_of_mass":
            raise ClusterError(f"unsupported selection: {self.selection!r}")


def as_packed(vectors) -> np.ndarray:
    """Coerce feature-vector input to a packed uint32 array."""
    if isinstance(vectors, CorpusFrame):
        return vectors.packed
    if isinstance(vectors, np.ndarray):
        if vectors.ndim == 2:
            if vectors.shape[1] != N_CATEGORIES:
                raise ClusterError(
                    f"expected {N_CATEGORIES} columns, got {vectors.shape[1]}"
                )
            powers = (1 << np.arange(N_CATEGORIES, dtype=np.uint32)).astype(np.uint32)
            return (vectors.astype(np.uint32) @ powers).astype(np.uint32)
        return vectors.astype(np.uint32)
    packed = np.fromiter(
        (v.packed if isinstance(v, FeatureVector) else int(v) for v in vectors),
        dtype=np.uint32,
    )
    return packed


@dataclass
class CondensedTree:
    """Rows (parent, child, lambda, dist, size) of the pruned hierarchy.

    Children below ``n_points`` are distinct-point leaves (size = weight);
    children at or above it are cluster nodes.  Lambda is 1/dist of the
    split that emitted the row.
    """

    n_points: int
    parent: np.ndarray
    child: np.ndarray
    lam: np.ndarray
    dist: np.ndarray
    size: np.ndarray

    def cluster_ids(self) -> np.ndarray:
        ids = np.unique(self.parent)
        return ids


@dataclass
class ClusterModel:
    params: ClusterParams
    fit_indices: np.ndarray          # indices of fitted records in the input corpus
    distinct_packed: np.ndarray      # uint32 (m,)
    distinct_weights: np.ndarray     # int64 (m,)
    distinct_inverse: np.ndarray     # fitted record -> distinct index
    core_distances: np.ndarray       # float64 (m,)
    tree: CondensedTree
    root_cluster: int
    selected_clusters: tuple[int, ...]
    birth_lambda: dict[int, float]
    death_lambda: dict[int, float]
    death_radius: dict[int, float]   # 1/death_lambda, kept exact from row dists
    cluster_labels: dict[int, int]   # condensed cluster id -> output label
    distinct_labels: np.ndarray      # int64 (m,), NOISE = -1
    distinct_strengths: np.ndarray   # float64 (m,)
    exemplar_indices: dict[int, tuple[int, ...]]  # label -> distinct indices
    version: str = "safecomb-cluster-model/1"
    _lookup: dict[int, int] = field(default_factory=dict, repr=False)

    @property
    def n_clusters(self) -> int:
        return len(self.selected_clusters)

    @property
    def labels(self) -> np.ndarray:
        """Label per fitted record."""
        return self.distinct_labels[self.distinct_inverse]

    @property
    def strengths(self) -> np.ndarray:
        return self.distinct_strengths[self.distinct_inverse]

    def exemplar_vectors(self, label: int) -> list[FeatureVector]:
        return [
            FeatureVector.from_packed(int(self.distinct_packed[i]))
            for i in self.exemplar_indices.get(label, ())
        ]

    def packed_lookup(self) -> dict[int, int]:
        if not self._lookup:
            self._lookup = {
                int(p): i for i, p in enumerate(self.distinct_packed)
            }
        return self._lookup

    def save(self, path) -> None:
        payload = {
            "version": self.version,
            "params": {
                "min_cluster_size": self.params.min_cluster_size,
                "min_samples": self.params.min_samples,
                "metric": self.params.metric,
                "subsample_size": self.params.subsample_size,
                "selection": self.params.selection,
                "seed": self.params.seed,
            },
            "fit_indices": self.fit_indices.tolist(),
            "distinct_packed": self.distinct_packed.tolist(),
            "distinct_weights": self.distinct_weights.tolist(),
            "distinct_inverse": self.distinct_inverse.tolist(),
            "core_distances": self.core_distances.tolist(),
            "tree": {
                "n_points": self.tree.n_points,
                "parent": self.tree.parent.tolist(),
                "child": self.tree.child.tolist(),
                "lam": self.tree.lam.tolist(),
                "dist": self.tree.dist.tolist(),
                "size": self.tree.size.tolist(),
            },
            "root_cluster": self.root_cluster,
            "selected_clusters": list(self.selected_clusters),
            "birth_lambda": {str(k): v for k, v in self.birth_lambda.items()},
            "death_lambda": {str(k): v for k, v in self.death_lambda.items()},
            "death_radius": {str(k): v for k, v in self.death_radius.items()},
            "cluster_labels": {str(k): v for k, v in self.cluster_labels.items()},
            "distinct_labels": self.distinct_labels.tolist(),
            "distinct_strengths": self.distinct_strengths.tolist(),
            "exemplar_indices": {
                str(k): list(v) for k, v in self.exemplar_indices.items()
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path) -> "ClusterModel":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("version") != "safecomb-cluster-model/1":
            raise ClusterError(f"unsupported model version: {payload.get('version')!r}")
        tree = CondensedTree(
            n_points=payload["tree"]["n_points"],
            parent=np.asarray(payload["tree"]["parent"], dtype=np.int64),
            child=np.asarray(payload["tree"]["child"], dtype=np.int64),
            lam=np.asarray(payload["tree"]["lam"], dtype=np.float64),
            dist=np.asarray(payload["tree"]["dist"], dtype=np.float64),
            size=np.asarray(payload["tree"]["size"], dtype=np.float64),
        )
        return cls(
            params=ClusterParams(**payload["params"]),
            fit_indices=np.asarray(payload["fit_indices"], dtype=np.int64),
            distinct_packed=np.asarray(payload["distinct_packed"], dtype=np.uint32),
            distinct_weights=np.asarray(payload["distinct_weights"], dtype=np.int64),
            distinct_inverse=np.asarray(payload["distinct_inverse"], dtype=np.int64),
            core_distances=np.asarray(payload["core_distances"], dtype=np.float64),
            tree=tree,
            root_cluster=payload["root_cluster"],
            selected_clusters=tuple(payload["selected_clusters"]),
            birth_lambda={int(k): v for k, v in payload["birth_lambda"].items()},
            death_lambda={int(k): v for k, v in payload["death_lambda"].items()},
            death_radius={int(k): v for k, v in payload["death_radius"].items()},
            cluster_labels={int(k): v for k, v in payload["cluster_labels"].items()},
            distinct_labels=np.asarray(payload["distinct_labels"], dtype=np.int64),
            distinct_strengths=np.asarray(
                payload["distinct_strengths"], dtype=np.float64
            ),
            exemplar_indices={
                int(k): tuple(v) for k, v in payload["exemplar_indices"].items()
            },
        )


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    strengths: np.ndarray

    def as_dict(self, ids: Sequence[str]) -> dict[str, tuple[int, float]]:
        return {
            rid: (int(lbl), float(s))
            for rid, lbl, s in zip(ids, self.labels, self.strengths)
        }


@dataclass
class MergeTree:
    """Multiway single-linkage hierarchy over weighted distinct points.

    All MST edges of equal weight are applied as one level, so a node's
    children are exactly the connected components at the next smaller
    distance.  This keeps the hierarchy faithful to the level-set
    semantics on tie-heavy binary data, where a binary dendrogram would
    produce phantom intermediate splits.
    """

    n_leaves: int
    children: list[list[int]]       # per internal node (id = n_leaves + t)
    dist: np.ndarray                # merge distance per internal node
    weight: np.ndarray              # total weight per internal node
    root: int


def _single_linkage(
    us: np.ndarray, vs: np.ndarray, ws: np.ndarray, weights: np.ndarray
) -> MergeTree:
    m = len(weights)
    order = np.lexsort((np.maximum(us, vs), np.minimum(us, vs), ws))
    parent = np.arange(m, dtype=np.int64)
    comp_node = np.arange(m, dtype=np.int64)
    comp_weight = np.zeros(2 * m, dtype=np.float64)
    comp_weight[:m] = weights

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    children: list[list[int]] = []
    dists: list[float] = []
    node_weight: list[float] = []
    next_node = m

    i = 0
    n_edges = len(order)
    while i < n_edges:
        w = ws[order[i]]
        j = i
        level_children: dict[int, list[int]] = {}
        while j < n_edges and ws[order[j]] == w:
            e = order[j]
            j += 1
            ru, rv = find(int(us[e])), find(int(vs[e]))
            if ru == rv:
                continue
            kids_u = level_children.pop(ru, None) or [int(comp_node[ru])]
            kids_v = level_children.pop(rv, None) or [int(comp_node[rv])]
            parent[rv] = ru
            level_children[ru] = kids_u + kids_v
        for root, kids in level_children.items():
            node = next_node
            next_node += 1
            children.append(sorted(kids))
            dists.append(float(w))
            total = 0.0
            for k in kids:
                total += comp_weight[k]
            node_weight.append(total)
            comp_node[root] = node
            if node >= len(comp_weight):
                comp_weight = np.concatenate([comp_weight, np.zeros(m)])
            comp_weight[node] = total
        i = j

    return MergeTree(
        n_leaves=m,
        children=children,
        dist=np.asarray(dists, dtype=np.float64),
        weight=np.asarray(node_weight, dtype=np.float64),
        root=next_node - 1,
    )


def _condense(
    merge_tree: MergeTree,
    leaf_weight: np.ndarray,
    min_cluster_size: int,
) -> tuple[CondensedTree, int, dict[int, float]]:
    """Prune the merge tree, keeping only splits with >= 2 sides >= mcs.

    Splits are evaluated on the multiway children, i.e. the true
    connected components at the next smaller distance level.
    """
    m = merge_tree.n_leaves
    children_of = merge_tree.children
    node_dist = merge_tree.dist
    node_w = merge_tree.weight

    def node_weight(node: int) -> float:
        return float(leaf_weight[node]) if node < m else float(node_w[node - m])

    def iter_leaves(node: int):
        stack = [node]
        while stack:
            cur = stack.pop()
            if cur < m:
                yield cur
            else:
                stack.extend(children_of[cur - m])

    parents: list[int] = []
    children: list[int] = []
    lams: list[float] = []
    dists: list[float] = []
    sizes: list[float] = []
    birth: dict[int, float] = {}

    def emit(parent: int, child: int, lam: float, d: float, size: float) -> None:
        parents.append(parent)
        children.append(child)
        lams.append(lam)
        dists.append(d)
        sizes.append(size)

    cluster_base = 2 * m
    root_cluster = cluster_base
    next_cluster = cluster_base + 1
    birth[root_cluster] = 0.0
    # (merge-tree node, condensed cluster, lambda/dist of the last split)
    queue: list[tuple[int, int, float, float]] = [
        (merge_tree.root, root_cluster, 0.0, math.inf)
    ]
    head = 0
    while head < len(queue):
        node, cluster, lam_last, dist_last = queue[head]
        head += 1
        while True:
            if node < m:
                emit(cluster, node, lam_last, dist_last, float(leaf_weight[node]))
                break
            kids = children_of[node - m]
            d = float(node_dist[node - m])
            lam = 1.0 / d
            big = [k for k in kids if node_weight(k) >= min_cluster_size]
            if len(big) >= 2:
                for k in kids:
                    if k in big:
                        continue
                    for leaf in iter_leaves(k):
                        emit(cluster, leaf, lam, d, float(leaf_weight[leaf]))
                for k in big:
                    new = next_cluster
                    next_cluster += 1
                    birth[new] = lam
                    emit(cluster, new, lam, d, node_weight(k))
                    queue.append((k, new, lam, d))
                break
            if not big:
                for leaf in iter_leaves(node):
                    emit(cluster, leaf, lam, d, float(leaf_weight[leaf]))
                break
            for k in kids:
                if k == big[0]:
                    continue
                for leaf in iter_leaves(k):
                    emit(cluster, leaf, lam, d, float(leaf_weight[leaf]))
            node = big[0]
            lam_last, dist_last = lam, d

    tree = CondensedTree(
        n_points=m,
        parent=np.asarray(parents, dtype=np.int64),
        child=np.asarray(children, dtype=np.int64),
        lam=np.asarray(lams, dtype=np.float64),
        dist=np.asarray(dists, dtype=np.float64),
        size=np.asarray(sizes, dtype=np.float64),
    )
    return tree, root_cluster, birth


def _excess_of_mass(
    tree: CondensedTree, root_cluster: int, birth: dict[int, float]
) -> tuple[list[int], dict[int, float]]:
    """Stability-based cluster selection.  Parents win stability ties."""
    m = tree.n_points
    stability: dict[int, float] = {c: 0.0 for c in birth}
    children_of: dict[int, list[int]] = {c: [] for c in birth}
    cluster_parent: dict[int, int] = {}
    for p, c, lam, size in zip(tree.parent, tree.child, tree.lam, tree.size):
        stability[int(p)] += (lam - birth[int(p)]) * size
        if c >= m:
            children_of[int(p)].append(int(c))
            cluster_parent[int(c)] = int(p)

    selected: dict[int, bool] = {}
    subtree_stab: dict[int, float] = {}
    for c in sorted(birth, reverse=True):
        kids = children_of[c]
        if c == root_cluster:
            # the root spans the whole fitted set and is never a cluster;
            # the one-distinct-point corpus is special-cased in fit()
            selected[c] = False
            subtree_stab[c] = sum(subtree_stab[k] for k in kids)
            continue
        if not kids:
            selected[c] = True
            subtree_stab[c] = stability[c]
            continue
        child_sum = sum(subtree_stab[k] for k in kids)
        if child_sum > stability[c]:
            selected[c] = False
            subtree_stab[c] = child_sum
        else:
            selected[c] = True
            subtree_stab[c] = stability[c]
    # a selected ancestor claims its whole subtree
    for c in sorted(birth):
        anc = cluster_parent.get(c)
        shadowed = False
        while anc is not None:
            if selected[anc]:
                shadowed = True
                break
            anc = cluster_parent.get(anc)
        if shadowed:
            selected[c] = False
    chosen = [c for c in sorted(birth) if selected[c]]
    return chosen, stability


def fit(corpus_vectors, params: ClusterParams) -> ClusterModel:
    """Fit the density model on (a seeded subsample of) the corpus."""
    params.validate()
    packed_all = as_packed(corpus_vectors)
    n = len(packed_all)
    if n < params.min_cluster_size:
        raise ClusterError(
            f"corpus size {n} is below min_cluster_size {params.min_cluster_size}"
        )
    if params.subsample_size < n:
        stream = Stream(params.seed, "cluster.subsample")
        fit_indices = stream.subset(n, params.subsample_size)
    else:
        fit_indices = np.arange(n, dtype=np.int64)
    packed = packed_all[fit_indices]

    distinct, inverse, counts = np.unique(
        packed, return_inverse=True, return_counts=True
    )
    m = len(distinct)
    weights = counts.astype(np.float64)
    core = _kernels.core_distances(
        distinct.astype(np.uint64), weights, params.min_samples, N_CATEGORIES
    )

    if m == 1:
        tree = CondensedTree(
            n_points=1,
            parent=np.array([1], dtype=np.int64),
            child=np.array([0], dtype=np.int64),
            lam=np.array([math.inf]),
            dist=np.array([0.0]),
            size=weights.copy(),
        )
        return ClusterModel(
            params=params,
            fit_indices=fit_indices,
            distinct_packed=distinct.astype(np.uint32),
            distinct_weights=counts.astype(np.int64),
            distinct_inverse=inverse.astype(np.int64),
            core_distances=core,
            tree=tree,
            root_cluster=1,
            selected_clusters=(1,),
            birth_lambda={1: 0.0},
            death_lambda={1: math.inf},
            death_radius={1: 0.0},
            cluster_labels={1: 0},
            distinct_labels=np.zeros(1, dtype=np.int64),
            distinct_strengths=np.ones(1, dtype=np.float64),
            exemplar_indices={0: (0,)},
        )

    us, vs, ws = _kernels.mst_edges(distinct.astype(np.uint64), core)
    merge_tree = _single_linkage(us, vs, ws, weights)
    tree, root_cluster, birth = _condense(merge_tree, weights, params.min_cluster_size)
    chosen, _stability = _excess_of_mass(tree, root_cluster, birth)

    # merge unselected clusters upward so each row resolves to the nearest
    # selected ancestor (or to the root, meaning noise)
    cluster_parent: dict[int, int] = {}
    for p, c in zip(tree.parent, tree.child):
        if c >= m:
            cluster_parent[int(c)] = int(p)
    merged: dict[int, int] = {}

    def resolve(c: int) -> int:
        path = []
        while c in merged:
            path.append(c)
            c = merged[c]
        for x in path:
            merged[x] = c
        return c

    chosen_set = set(chosen)
    for c in sorted(birth):
        if c not in chosen_set and c in cluster_parent:
            merged[c] = cluster_parent[c]
    # resolve chains fully
    resolution = {c: resolve(c) for c in birth}

    cluster_labels = {c: i for i, c in enumerate(chosen)}
    death_lambda: dict[int, float] = {c: birth[c] for c in chosen}
    death_radius: dict[int, float] = {c: math.inf for c in chosen}
    distinct_labels = np.full(m, NOISE, dtype=np.int64)
    row_lambda = np.zeros(m, dtype=np.float64)
    for p, c, lam, d in zip(tree.parent, tree.child, tree.lam, tree.dist):
        rep = resolution[int(p)]
        if rep not in chosen_set:
            continue
        if c >= m:
            continue
        distinct_labels[int(c)] = cluster_labels[rep]
        row_lambda[int(c)] = lam
        if lam > death_lambda[rep]:
            death_lambda[rep] = lam
        if d < death_radius[rep]:
            death_radius[rep] = d

    distinct_strengths = np.zeros(m, dtype=np.float64)
    exemplars: dict[int, list[int]] = {cluster_labels[c]: [] for c in chosen}
    for i in range(m):
        lbl = int(distinct_labels[i])
        if lbl == NOISE:
            continue
        cid = chosen[lbl]
        death = death_lambda[cid]
        distinct_strengths[i] = min(1.0, row_lambda[i] / death) if death > 0 else 1.0
        if row_lambda[i] == death:
            exemplars[lbl].append(i)

    return ClusterModel(
        params=params,
        fit_indices=fit_indices,
        distinct_packed=distinct.astype(np.uint32),
        distinct_weights=counts.astype(np.int64),
        distinct_inverse=inverse.astype(np.int64),
        core_distances=core,
        tree=tree,
        root_cluster=root_cluster,
        selected_clusters=tuple(chosen),
        birth_lambda={c: birth[c] for c in birth},
        death_lambda=death_lambda,
        death_radius=death_radius,
        cluster_labels=cluster_labels,
        distinct_labels=distinct_labels,
        distinct_strengths=distinct_strengths,
        exemplar_indices={k: tuple(v) for k, v in exemplars.items()},
    )


if hasattr(np, "bitwise_count"):
    def _popcount64(x: np.ndarray) -> np.ndarray:
        return np.bitwise_count(x)
else:  # pragma: no cover
    from ._kernels._fallback import _popcount as _popcount64


def approximate_predict(model: ClusterModel, vectors) -> ClusterAssignment:
    """Extend a fitted model to new points.

    Exact matches of fitted vectors reproduce their fit labels.  Other
    points take the label of the nearest fitted distinct vector when the
    mutual reachability to it is within that cluster's dissolution
    radius, and NOISE otherwise.
    """
    packed = as_packed(vectors)
    nq = len(packed)
    labels = np.full(nq, NOISE, dtype=np.int64)
    strengths = np.zeros(nq, dtype=np.float64)
    if nq == 0:
        return ClusterAssignment(labels, strengths)

    uniq, inv = np.unique(packed, return_inverse=True)
    lookup = model.packed_lookup()
    u_labels = np.full(len(uniq), NOISE, dtype=np.int64)
    u_strengths = np.zeros(len(uniq), dtype=np.float64)

    novel = []
    for ui, value in enumerate(uniq):
        hit = lookup.get(int(value))
        if hit is not None:
            u_labels[ui] = model.distinct_labels[hit]
            u_strengths[ui] = model.distinct_strengths[hit]
        else:
            novel.append(ui)

    if novel:
        fitted = model.distinct_packed.astype(np.uint64)
        weights = model.distinct_weights.astype(np.float64)
        min_samples = model.params.min_samples
        label_by_cluster = model.cluster_labels
        radius_by_label = {
            label_by_cluster[c]: model.death_radius[c]
            for c in model.selected_clusters
        }
        death_by_label = {
            label_by_cluster[c]: model.death_lambda[c]
            for c in model.selected_clusters
        }
        for ui in novel:
            q = np.uint64(int(uniq[ui]))
            ham = _popcount64(fitted ^ q).astype(np.int64)
            hist = np.bincount(ham, weights=weights, minlength=N_CATEGORIES + 1)
            hist[0] += 1.0  # the query itself
            core_q = math.sqrt(int(np.argmax(np.cumsum(hist) >= min_samples)))
            d = np.sqrt(ham.astype(np.float64))
            nn = int(np.argmin(d))
            lbl = int(model.distinct_labels[nn])
            if lbl == NOISE:
                continue
            mr = max(core_q, float(model.core_distances[nn]), float(d[nn]))
            radius = radius_by_label[lbl]
            if mr <= radius:
                u_labels[ui] = lbl
                death = death_by_label[lbl]
                if math.isinf(death):
                    u_strengths[ui] = 1.0
                else:
                    u_strengths[ui] = min(1.0, (1.0 / mr) / death)

    labels = u_labels[inv]
    strengths = u_strengths[inv]
    return ClusterAssignment(labels, strengths)


def adjusted_rand_index(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Exact ARI; every label value (including NOISE) is its own class."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ClusterError("label arrays must have equal length")
    n = a.size
    if n < 2:
        return 1.0
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    pair = ai.astype(np.int64) * (bi.max() + 1) + bi
    cells = np.bincount(pair)
    sum_cells = int(sum(math.comb(int(c), 2) for c in cells if c >= 2))
    sum_rows = int(sum(math.comb(int(c), 2) for c in np.bincount(ai)))
    sum_cols = int(sum(math.comb(int(c), 2) for c in np.bincount(bi)))
    total = math.comb(n, 2)
    expected = sum_rows * sum_cols / total
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


@dataclass(frozen=True)
class StabilityReport:
    repeats: int
    seeds: tuple[int, ...]
    ari_matrix: np.ndarray
    mean_ari: float


def subsample_stability(
    corpus_vectors, params: ClusterParams, repeats: int
) -> StabilityReport:
    """Agreement between independently seeded subsample fits.

    Each repeat fits its own subsample and is extended to a shared
    evaluation sample; the report is the pairwise ARI matrix over repeats
    (noise counted as its own label).
    """
    if repeats < 2:
        raise ClusterError("subsample_stability requires repeats >= 2")
    packed = as_packed(corpus_vectors)
    n = len(packed)
    eval_size = min(n, params.subsample_size)
    if eval_size < n:
        eval_idx = Stream(params.seed, "cluster.stability.eval").subset(n, eval_size)
    else:
        eval_idx = np.arange(n, dtype=np.int64)
    eval_packed = packed[eval_idx]

    seeds = tuple(
        derive_seed(params.seed, f"cluster.stability.{r}") for r in range(repeats)
    )
    label_sets = []
    for seed in seeds:
        p = ClusterParams(
            min_cluster_size=params.min_cluster_size,
            min_samples=params.min_samples,
            metric=params.metric,
            subsample_size=params.subsample_size,
            selection=params.selection,
            seed=seed,
        )
        model = fit(packed, p)
        label_sets.append(approximate_predict(model, eval_packed).labels)

    ari = np.ones((repeats, repeats), dtype=np.float64)
    for i in range(repeats):
        for j in range(i + 1, repeats):
            value = adjusted_rand_index(label_sets[i], label_sets[j])
            ari[i, j] = ari[j, i] = value
    off = ari[~np.eye(repeats, dtype=bool)]
    return StabilityReport(repeats, seeds, ari, float(off.mean()))
