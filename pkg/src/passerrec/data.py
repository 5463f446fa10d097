"""Review ingestion: JSON-lines parsing, text cleaning, labels and splits."""

from __future__ import annotations

import io
import json
import math
import re
import unicodedata
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Optional

import numpy as np

from ._validation import check_fraction

__all__ = [
    "ReviewRecord",
    "LabeledExample",
    "DatasetSplit",
    "parse_reviews",
    "clean_text",
    "derive_label",
    "label_records",
    "split",
    "write_records",
    "read_records",
]

POSITIVE_THRESHOLD = 4.0

_NOT_ALLOWED = re.compile(r"[^a-z0-9 ]+")
_SPACES = re.compile(r" +")


@dataclass(frozen=True)
class ReviewRecord:
    user_id: str
    item_id: str
    rating: float
    text: str
    timestamp: Optional[int] = None

    def __post_init__(self):
        if not self.user_id or not self.item_id:
            raise ValueError("user_id and item_id must be nonempty")
        if not 1.0 <= self.rating <= 5.0:
            raise ValueError(f"rating {self.rating!r} outside [1, 5]")


@dataclass(frozen=True)
class LabeledExample:
    record: ReviewRecord
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class DatasetSplit:
    train: list
    test: list
    train_fraction: float
    seed: int


def _record_from_json(obj) -> ReviewRecord:
    if not isinstance(obj, dict):
        raise ValueError("not an object")
    user, item = obj["reviewerID"], obj["asin"]
    rating, text = obj["overall"], obj["reviewText"]
    if not (isinstance(user, str) and isinstance(item, str) and isinstance(text, str)):
        raise ValueError("bad field type")
    if isinstance(rating, bool) or not isinstance(rating, (int, float)):
        raise ValueError("overall is not a number")
    ts = obj.get("unixReviewTime")
    if ts is not None and (isinstance(ts, bool) or not isinstance(ts, int)):
        raise ValueError("unixReviewTime is not an integer")
    return ReviewRecord(user, item, float(rating), text, ts)


def parse_reviews(source: BinaryIO | Iterable[bytes]) -> tuple[list[ReviewRecord], int]:
    """Parse newline-delimited Amazon review JSON.

    Every line is either turned into a :class:`ReviewRecord` or counted as
    skipped (bad JSON, bad UTF-8, missing or ill-typed fields, rating out of
    range). Blank lines count as skipped. I/O errors from ``source`` propagate.

    Returns
    -------
    records : list of ReviewRecord
    skipped : int
    """
    records, skipped = [], 0
    for raw in source:
        try:
            line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
            records.append(_record_from_json(json.loads(line)))
        except (ValueError, KeyError, TypeError):
            skipped += 1
    return records, skipped


def clean_text(raw: str) -> str:
    """Lowercase, strip punctuation/emoji and collapse whitespace.

    Accented letters are folded to their ASCII base before filtering, so
    ``"Café"`` becomes ``"cafe"``. Everything outside ``[a-z0-9 ]`` is dropped.
    """
    text = unicodedata.normalize("NFKD", raw.lower())
    text = "".join(" " if ch.isspace() else ch for ch in text)
    text = _NOT_ALLOWED.sub("", text)
    return _SPACES.sub(" ", text).strip()


def derive_label(rating: float) -> int:
    if not 1.0 <= rating <= 5.0:
        raise ValueError(f"rating {rating!r} outside [1, 5]")
    return int(rating >= POSITIVE_THRESHOLD)


def label_records(records: Iterable[ReviewRecord]) -> list[LabeledExample]:
    return [LabeledExample(r, derive_label(r.rating)) for r in records]


def split(examples: list, train_fraction: float, seed: int) -> DatasetSplit:
    """Seeded uniform shuffle, then the first ``round(fraction * n)`` are train."""
    if not examples:
        raise ValueError("cannot split an empty example list")
    check_fraction(train_fraction, "train_fraction")
    n = len(examples)
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(math.floor(train_fraction * n + 0.5))
    train = [examples[i] for i in order[:n_train]]
    test = [examples[i] for i in order[n_train:]]
    return DatasetSplit(train, test, train_fraction, seed)


def write_records(records: Iterable[ReviewRecord], fh: io.TextIOBase) -> None:
    """Write records back out in the same JSON-lines schema they are parsed from."""
    for r in records:
        obj = {"reviewerID": r.user_id, "asin": r.item_id, "overall": r.rating,
               "reviewText": r.text}
        if r.timestamp is not None:
            obj["unixReviewTime"] = r.timestamp
        fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")


def read_records(path) -> list[ReviewRecord]:
    with open(path, "rb") as fh:
        records, _ = parse_reviews(fh)
    return records
