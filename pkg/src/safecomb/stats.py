"""Statistics kernel: mean differences, bootstrap CIs, rank tests,
ANOVA, agreement and cosine similarity.

Tail probabilities come from scipy's regularized incomplete gamma/beta
routines (``chdtrc`` / ``fdtrc``); the test suite pins their accuracy to
1e-10 against high-precision quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.special import chdtrc, fdtrc, ndtr
from scipy.stats import rankdata

from . import _kernels
from .rng import derive_seed


class NumericError(ArithmeticError):
    """An operation received numerically invalid inputs."""


@dataclass(frozen=True)
class BootstrapCI:
    point: float
    lo: float
    hi: float
    level: float = 0.95
    resamples: int = 500
    seed: int = 0

    def excludes_zero(self) -> bool:
        return self.lo > 0.0 or self.hi < 0.0


@dataclass(frozen=True)
class RankTestResult:
    statistic: float
    df: int
    p_value: float
    group_sizes: tuple[int, ...]


@dataclass(frozen=True)
class PairwiseTestResult:
    adjust: str
    pairs: tuple[tuple[int, int, float, float, float], ...]
    """(group_a, group_b, z, p_raw, p_adjusted) per unordered pair."""


@dataclass(frozen=True)
class AgreementResult:
    kappa: float
    accuracy: float
    n: int


def mean_log_diff(group_with: Sequence[float], group_without: Sequence[float]) -> float:
    """mean(group_with) - mean(group_without) on already log-scaled values."""
    a = np.asarray(group_with, dtype=np.float64)
    b = np.asarray(group_without, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise NumericError("mean_log_diff requires two non-empty groups")
    return float(a.mean() - b.mean())


def bootstrap_ci(
    group_with: Sequence[float],
    group_without: Sequence[float],
    resamples: int = 500,
    level: float = 0.95,
    seed: int = 0,
) -> BootstrapCI:
    """Percentile bootstrap CI for the mean difference.

    Each resample independently redraws both groups with replacement at
    their original sizes.  Deterministic given the seed; the stream key is
    fixed so callers only vary the integer seed.
    """
    a = np.asarray(group_with, dtype=np.float64)
    b = np.asarray(group_without, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise NumericError("bootstrap_ci requires two non-empty groups")
    if resamples < 1:
        raise NumericError("resamples must be >= 1")
    if not 0.0 < level < 1.0:
        raise NumericError("level must be in (0, 1)")
    point = float(a.mean() - b.mean())
    stream_seed = derive_seed(seed, "stats.bootstrap_ci")
    stats = _kernels.bootstrap_mean_diffs(a, b, resamples, stream_seed)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    return BootstrapCI(point, float(lo), float(hi), level, resamples, seed)


def _tie_term(values: np.ndarray) -> float:
    """sum(t^3 - t) over tie groups."""
    _, counts = np.unique(values, return_counts=True)
    t = counts.astype(np.float64)
    return float(np.sum(t**3 - t))


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> RankTestResult:
    """Kruskal-Wallis H on mid-ranks with the standard tie correction."""
    if len(groups) < 2:
        raise NumericError("kruskal_wallis requires at least 2 groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    sizes = [a.size for a in arrays]
    if min(sizes) == 0:
        raise NumericError("kruskal_wallis requires non-empty groups")
    pooled = np.concatenate(arrays)
    n = pooled.size
    ranks = rankdata(pooled)
    h = 0.0
    offset = 0
    for size in sizes:
        r = ranks[offset : offset + size]
        h += r.sum() ** 2 / size
        offset += size
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    correction = 1.0 - _tie_term(pooled) / (float(n) ** 3 - n)
    h = 0.0 if correction <= 0.0 else h / correction
    h = max(h, 0.0)
    df = len(groups) - 1
    p = float(chdtrc(df, h))
    return RankTestResult(float(h), df, p, tuple(sizes))


AdjustMethod = Literal["none", "holm", "bonferroni"]


def adjust_pvalues(p_raw: Sequence[float], method: AdjustMethod) -> list[float]:
    p = list(map(float, p_raw))
    m = len(p)
    if method == "none" or m == 0:
        return p
    if method == "bonferroni":
        return [min(1.0, m * v) for v in p]
    if method == "holm":
        order = sorted(range(m), key=lambda i: p[i])
        adjusted = [0.0] * m
        running = 0.0
        for rank, idx in enumerate(order):
            running = max(running, min(1.0, (m - rank) * p[idx]))
            adjusted[idx] = running
        return adjusted
    raise NumericError(f"unknown adjustment method: {method!r}")


def dunn_posthoc(
    groups: Sequence[Sequence[float]], adjust: AdjustMethod = "holm"
) -> PairwiseTestResult:
    """Dunn's pairwise z tests on mean ranks with pooled tie correction."""
    if len(groups) < 2:
        raise NumericError("dunn_posthoc requires at least 2 groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    sizes = [a.size for a in arrays]
    if min(sizes) == 0:
        raise NumericError("dunn_posthoc requires non-empty groups")
    pooled = np.concatenate(arrays)
    n = pooled.size
    ranks = rankdata(pooled)
    mean_ranks = []
    offset = 0
    for size in sizes:
        mean_ranks.append(ranks[offset : offset + size].mean())
        offset += size
    tie_adjust = _tie_term(pooled) / (12.0 * (n - 1)) if n > 1 else 0.0
    base_var = n * (n + 1) / 12.0 - tie_adjust
    pairs = []
    raw = []
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            var = base_var * (1.0 / sizes[i] + 1.0 / sizes[j])
            if var <= 0.0:
                z = 0.0
            else:
                z = (mean_ranks[i] - mean_ranks[j]) / np.sqrt(var)
            p = float(2.0 * ndtr(-abs(z)))
            pairs.append((i, j, float(z)))
            raw.append(p)
    adjusted = adjust_pvalues(raw, adjust)
    rows = tuple(
        (a, b, z, p, pa) for (a, b, z), p, pa in zip(pairs, raw, adjusted)
    )
    return PairwiseTestResult(adjust, rows)


def anova_f(groups: Sequence[Sequence[float]]) -> tuple[float, int, int, float]:
    """Classical one-way ANOVA; returns (F, df_between, df_within, p).

    Zero within-group variance with nonzero between-group variance yields
    the (inf, p=0) sentinel; fully degenerate inputs yield NaN.
    """
    if len(groups) < 2:
        raise NumericError("anova_f requires at least 2 groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    sizes = [a.size for a in arrays]
    if min(sizes) == 0:
        raise NumericError("anova_f requires non-empty groups")
    n = sum(sizes)
    k = len(groups)
    if n <= k:
        raise NumericError("anova_f requires total n > number of groups")
    grand = np.concatenate(arrays).mean()
    ssb = sum(size * (a.mean() - grand) ** 2 for size, a in zip(sizes, arrays))
    ssw = sum(((a - a.mean()) ** 2).sum() for a in arrays)
    df_b = k - 1
    df_w = n - k
    msb = ssb / df_b
    msw = ssw / df_w
    if msw == 0.0:
        if msb == 0.0:
            return float("nan"), df_b, df_w, float("nan")
        return float("inf"), df_b, df_w, 0.0
    f = msb / msw
    p = float(fdtrc(df_b, df_w, f))
    return float(f), df_b, df_w, p


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> AgreementResult:
    """Cohen's kappa with marginal-product chance agreement."""
    if len(labels_a) != len(labels_b):
        raise NumericError("cohen_kappa requires equal-length label lists")
    n = len(labels_a)
    if n == 0:
        raise NumericError("cohen_kappa requires at least one item")
    observed = sum(1 for x, y in zip(labels_a, labels_b) if x == y) / n
    cats = set(labels_a) | set(labels_b)
    expected = 0.0
    for c in cats:
        pa = sum(1 for x in labels_a if x == c) / n
        pb = sum(1 for y in labels_b if y == c) / n
        expected += pa * pb
    if expected == 1.0:
        kappa = 1.0 if observed == 1.0 else 0.0
    else:
        kappa = (observed - expected) / (1.0 - expected)
    return AgreementResult(float(kappa), float(observed), n)


def cosine_similarity(u: Sequence[float], v: Sequence[float]) -> float:
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise NumericError("cosine_similarity requires equal dimensions")
    na = np.sqrt(a @ a)
    nb = np.sqrt(b @ b)
    if na == 0.0 or nb == 0.0:
        raise NumericError("cosine_similarity is undefined for a zero vector")
    return float((a @ b) / (na * nb))
