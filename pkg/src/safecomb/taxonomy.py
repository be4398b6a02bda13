"""SAFE taxonomy: the fixed 20-category coding scheme over four dimensions.

Dimensions are Source, Appeal, Frame and Evidence.  Each dimension carries
one "absence marker" (NoSrc, NoApp, NoFrm, NoEv) that is mutually exclusive
with the other categories of its dimension.  Slot order is fixed so that
serialized feature vectors and centroids are comparable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Dimension(Enum):
    SOURCE = "source"
    APPEAL = "appeal"
    FRAME = "frame"
    EVIDENCE = "evidence"


@dataclass(frozen=True)
class Category:
    code: str
    dimension: Dimension
    slot: int
    is_absence: bool = False


_SPEC: list[tuple[str, Dimension, bool]] = [
    ("Exp", Dimension.SOURCE, False),
    ("OffM", Dimension.SOURCE, False),
    ("NoSrc", Dimension.SOURCE, True),
    ("Sex", Dimension.APPEAL, False),
    ("Fear", Dimension.APPEAL, False),
    ("Humor", Dimension.APPEAL, False),
    ("Valu", Dimension.APPEAL, False),
    ("Util", Dimension.APPEAL, False),
    ("Dual", Dimension.APPEAL, False),
    ("Comp", Dimension.APPEAL, False),
    ("Met", Dimension.APPEAL, False),
    ("NoApp", Dimension.APPEAL, True),
    ("Gain", Dimension.FRAME, False),
    ("Loss", Dimension.FRAME, False),
    ("NoFrm", Dimension.FRAME, True),
    ("NarrEv", Dimension.EVIDENCE, False),
    ("StatEv", Dimension.EVIDENCE, False),
    ("ExpEv", Dimension.EVIDENCE, False),
    ("CausEv", Dimension.EVIDENCE, False),
    ("NoEv", Dimension.EVIDENCE, True),
]

CATEGORIES: tuple[Category, ...] = tuple(
    Category(code, dim, slot, absent) for slot, (code, dim, absent) in enumerate(_SPEC)
)

N_CATEGORIES = len(CATEGORIES)

CODE_TO_CATEGORY: dict[str, Category] = {c.code: c for c in CATEGORIES}
CODE_TO_SLOT: dict[str, int] = {c.code: c.slot for c in CATEGORIES}
SLOT_TO_CODE: tuple[str, ...] = tuple(c.code for c in CATEGORIES)

DIMENSIONS: tuple[Dimension, ...] = (
    Dimension.SOURCE,
    Dimension.APPEAL,
    Dimension.FRAME,
    Dimension.EVIDENCE,
)

DIMENSION_CODES: dict[Dimension, tuple[str, ...]] = {
    dim: tuple(c.code for c in CATEGORIES if c.dimension is dim) for dim in DIMENSIONS
}

DIMENSION_SLOTS: dict[Dimension, tuple[int, ...]] = {
    dim: tuple(c.slot for c in CATEGORIES if c.dimension is dim) for dim in DIMENSIONS
}

ABSENCE_MARKERS: dict[Dimension, str] = {
    c.dimension: c.code for c in CATEGORIES if c.is_absence
}

# Long names and paper-table shorthands accepted on input in addition to
# the canonical codes above.
INPUT_ALIASES: dict[str, str] = {
    "Expert": "Exp",
    "Official Media": "OffM",
    "No Source": "NoSrc",
    "Value": "Valu",
    "Utilitarian": "Util",
    "Comparative": "Comp",
    "Metaphor": "Met",
    "Hum": "Humor",
    "No Appeal": "NoApp",
    "No Frame": "NoFrm",
    "Narr": "NarrEv",
    "Stat": "StatEv",
    "Caus": "CausEv",
    "No Evidence": "NoEv",
}

# Shorthands used when formatting report cells in the style of the
# published combination tables (e.g. "Met+Util+Narr+Valu (1.097)").
DISPLAY_ALIASES: dict[str, str] = {
    "Humor": "Hum",
    "NarrEv": "Narr",
    "StatEv": "Stat",
    "CausEv": "Caus",
}


def canonical_code(raw: str) -> str:
    """Resolve an input label to its canonical code.

    Raises KeyError for unknown labels.
    """
    code = raw.strip()
    if code in CODE_TO_CATEGORY:
        return code
    if code in INPUT_ALIASES:
        return INPUT_ALIASES[code]
    raise KeyError(raw)


def display_code(code: str) -> str:
    return DISPLAY_ALIASES.get(code, code)


def dimension_of(code: str) -> Dimension:
    return CODE_TO_CATEGORY[code].dimension


def is_absence(code: str) -> bool:
    return CODE_TO_CATEGORY[code].is_absence


def codes_to_mask(codes) -> int:
    """Pack a set of category codes into a 20-bit integer mask."""
    mask = 0
    for code in codes:
        mask |= 1 << CODE_TO_SLOT[code]
    return mask


def mask_to_codes(mask: int) -> tuple[str, ...]:
    """Unpack a 20-bit mask into canonical codes in slot order."""
    return tuple(c.code for c in CATEGORIES if mask & (1 << c.slot))


DIMENSION_MASKS: dict[Dimension, int] = {
    dim: codes_to_mask(DIMENSION_CODES[dim]) for dim in DIMENSIONS
}

ABSENCE_MASKS: dict[Dimension, int] = {
    dim: 1 << CODE_TO_SLOT[ABSENCE_MARKERS[dim]] for dim in DIMENSIONS
}
