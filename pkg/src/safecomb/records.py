"""Message records, binary feature encoding and engagement transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import taxonomy as tax
from .taxonomy import Dimension


class ValidationError(ValueError):
    """A record violates the taxonomy invariants."""


class EngagementTriple(NamedTuple):
    likes_log: float
    comments_log: float
    shares_log: float


@dataclass(frozen=True)
class MessageRecord:
    """One coded post: SAFE label sets plus engagement and account data."""

    id: str
    account_id: str
    followers: int
    likes: int
    comments: int
    shares: int
    source: frozenset[str]
    appeal: frozenset[str]
    frame: str
    evidence: frozenset[str]

    def labels(self, dim: Dimension) -> frozenset[str]:
        if dim is Dimension.SOURCE:
            return self.source
        if dim is Dimension.APPEAL:
            return self.appeal
        if dim is Dimension.FRAME:
            return frozenset((self.frame,))
        return self.evidence

    def all_labels(self) -> frozenset[str]:
        return self.source | self.appeal | {self.frame} | self.evidence


def validate_record(record: MessageRecord) -> None:
    """Raise ValidationError if the record breaks a dimension invariant."""
    for count_name in ("followers", "likes", "comments", "shares"):
        value = getattr(record, count_name)
        if not isinstance(value, int) or value < 0:
            raise ValidationError(f"negative or non-integer {count_name}")

    if record.frame not in tax.DIMENSION_CODES[Dimension.FRAME]:
        raise ValidationError(f"unknown frame code: {record.frame!r}")

    for dim in (Dimension.SOURCE, Dimension.APPEAL, Dimension.EVIDENCE):
        labels = record.labels(dim)
        valid = set(tax.DIMENSION_CODES[dim])
        unknown = labels - valid
        if unknown:
            raise ValidationError(
                f"unknown {dim.value} code: {sorted(unknown)[0]!r}"
            )
        if not labels:
            raise ValidationError(f"empty dimension: {dim.value.capitalize()}")
        marker = tax.ABSENCE_MARKERS[dim]
        if marker in labels and len(labels) > 1:
            raise ValidationError(
                f"absence marker co-occurrence: {dim.value.capitalize()}"
            )


@dataclass(frozen=True)
class FeatureVector:
    """Ordered 20-slot binary encoding of a record's label sets."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bits) != tax.N_CATEGORIES:
            raise ValueError(f"expected {tax.N_CATEGORIES} slots, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("feature vector slots must be 0 or 1")

    @property
    def packed(self) -> int:
        mask = 0
        for slot, bit in enumerate(self.bits):
            if bit:
                mask |= 1 << slot
        return mask

    @classmethod
    def from_packed(cls, mask: int) -> "FeatureVector":
        return cls(tuple((mask >> s) & 1 for s in range(tax.N_CATEGORIES)))

    @classmethod
    def from_codes(cls, codes: Iterable[str]) -> "FeatureVector":
        return cls.from_packed(tax.codes_to_mask(codes))

    def codes(self) -> tuple[str, ...]:
        return tax.mask_to_codes(self.packed)

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.float64)


def encode_features(record: MessageRecord) -> FeatureVector:
    """Encode a valid record's label sets as a binary feature vector."""
    return FeatureVector.from_codes(record.all_labels())


def decode_features(vector: FeatureVector) -> dict[Dimension, frozenset[str]]:
    """Recover per-dimension label sets from a feature vector."""
    codes = vector.codes()
    return {
        dim: frozenset(c for c in codes if tax.dimension_of(c) is dim)
        for dim in tax.DIMENSIONS
    }


def log_engagement(record: MessageRecord) -> EngagementTriple:
    """Natural-log log(x + 1) transform of the engagement counts."""
    return EngagementTriple(
        math.log1p(record.likes),
        math.log1p(record.comments),
        math.log1p(record.shares),
    )


INDICATORS: tuple[str, ...] = ("likes", "comments", "shares")


@dataclass
class CorpusFrame:
    """Array view of a corpus used by the clustering and sweep engines.

    Built once from validated records; rows keep file order.
    """

    ids: list[str]
    account_ids: list[str]
    followers: np.ndarray          # int64 (n,)
    packed: np.ndarray             # uint32 (n,) 20-bit feature masks
    log_effects: np.ndarray        # float64 (n, 3) log1p(likes, comments, shares)

    def __len__(self) -> int:
        return len(self.ids)

    def indicator_column(self, indicator: str) -> np.ndarray:
        return self.log_effects[:, INDICATORS.index(indicator)]

    @classmethod
    def from_records(cls, records: Sequence[MessageRecord]) -> "CorpusFrame":
        n = len(records)
        packed = np.zeros(n, dtype=np.uint32)
        counts = np.zeros((n, 3), dtype=np.float64)
        followers = np.zeros(n, dtype=np.int64)
        ids = []
        accounts = []
        for i, r in enumerate(records):
            packed[i] = tax.codes_to_mask(r.all_labels())
            counts[i, 0] = r.likes
            counts[i, 1] = r.comments
            counts[i, 2] = r.shares
            followers[i] = r.followers
            ids.append(r.id)
            accounts.append(r.account_id)
        return cls(ids, accounts, followers, packed, np.log1p(counts))

    def account_followers(self) -> dict[str, int]:
        """Follower count per account (accounts are assumed stable per id)."""
        out: dict[str, int] = {}
        for acct, fol in zip(self.account_ids, self.followers):
            out.setdefault(acct, int(fol))
        return out
