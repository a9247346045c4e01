"""
Transaction database, class labels and FIMI file ingestion
"""

import logging
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from config.mappings import LABEL_ORIENTATIONS
from .errors import DegenerateLabelsError, DomainError, ParseError

logger = logging.getLogger(__name__)

TextInput = Union[str, bytes]


def bits_from_indices(indices: Sequence[int], size: int) -> int:
    """Pack transaction indices into an int bit-vector (bit t set for transaction t)"""
    if len(indices) == 0:
        return 0
    mask = np.zeros(size, dtype=bool)
    mask[np.asarray(indices, dtype=np.int64)] = True
    packed = np.packbits(mask, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


class TransactionDatabase:
    """
    N transactions over P items with per-item occurrence lists.

    Item ids inside the database are 0..P-1. When the database was built from a
    file with remapping, `item_labels[i]` is the file's id for internal item i.
    """

    def __init__(
        self,
        transactions: Iterable[Iterable[int]],
        num_items: Optional[int] = None,
        item_labels: Optional[Sequence[int]] = None,
    ):
        rows = [tuple(sorted(set(int(item) for item in row))) for row in transactions]
        highest = max((row[-1] for row in rows if row), default=-1)
        if any(row and row[0] < 0 for row in rows):
            raise DomainError("item ids must be non-negative")
        if num_items is None:
            num_items = highest + 1
        if highest >= num_items:
            raise DomainError(f"item id {highest} does not fit in {num_items} items")
        if item_labels is not None and len(item_labels) != num_items:
            raise DomainError("item_labels must name every item")

        self._transactions: Tuple[Tuple[int, ...], ...] = tuple(rows)
        self._num_items = num_items
        self._item_labels = tuple(int(label) for label in item_labels) if item_labels is not None else None

        occurrences: List[List[int]] = [[] for _ in range(num_items)]
        for tid, row in enumerate(rows):
            for item in row:
                occurrences[item].append(tid)
        self._occurrences = occurrences
        self._bits: Dict[int, int] = {}

    @property
    def num_transactions(self) -> int:
        return len(self._transactions)

    @property
    def num_items(self) -> int:
        return self._num_items

    @property
    def transactions(self) -> Tuple[Tuple[int, ...], ...]:
        return self._transactions

    @property
    def occurrences(self) -> List[List[int]]:
        return self._occurrences

    @property
    def item_labels(self) -> Optional[Tuple[int, ...]]:
        return self._item_labels

    @property
    def is_empty(self) -> bool:
        """True when no transaction contains any item"""
        return all(len(row) == 0 for row in self._transactions)

    def support(self, item: int) -> int:
        self._check_item(item)
        return len(self._occurrences[item])

    def max_support(self) -> int:
        return max((len(tids) for tids in self._occurrences), default=0)

    def item_bits(self, item: int) -> int:
        """Occurrence list of one item as a bit-vector, built once"""
        bits = self._bits.get(item)
        if bits is None:
            self._check_item(item)
            bits = bits_from_indices(self._occurrences[item], self.num_transactions)
            self._bits[item] = bits
        return bits

    def item_label(self, item: int) -> int:
        if self._item_labels is None:
            return item
        return self._item_labels[item]

    def labels_for(self, items: Iterable[int]) -> Tuple[int, ...]:
        """File ids of internal items, sorted"""
        return tuple(sorted(self.item_label(item) for item in items))

    def _check_item(self, item: int) -> None:
        if not 0 <= item < self._num_items:
            raise DomainError(f"unknown item id {item}; database has {self._num_items} items")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransactionDatabase):
            return NotImplemented
        return (
            self._transactions == other._transactions
            and self._num_items == other._num_items
            and self._item_labels == other._item_labels
        )

    def __repr__(self) -> str:
        return f"TransactionDatabase(N={self.num_transactions}, P={self.num_items})"


def _decode(text: TextInput) -> str:
    if not isinstance(text, bytes):
        return text
    try:
        return text.decode("ascii")
    except UnicodeDecodeError as error:
        line_number = text.count(b"\n", 0, error.start) + 1
        raise ParseError(f"byte 0x{text[error.start]:02x} is not ASCII", line_number) from None


def _split_lines(text: str) -> List[str]:
    if text == "":
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


def parse_fimi(text: TextInput, remap: bool = False) -> TransactionDatabase:
    """
    Parse a FIMI transaction file: one transaction per line, integer item ids.

    Args:
        text: file contents
        remap: renumber items densely (ascending file id) and keep the id map

    Returns:
        TransactionDatabase with one transaction per line, blank lines included
    """
    rows: List[List[int]] = []
    for line_number, line in enumerate(_split_lines(_decode(text)), start=1):
        row = []
        for token in line.split():
            if not (token.isascii() and token.isdigit()):
                raise ParseError(f"item id {token!r} is not a non-negative decimal integer", line_number)
            row.append(int(token))
        rows.append(row)

    if not remap:
        return TransactionDatabase(rows)

    labels = sorted({item for row in rows for item in row})
    dense = {label: index for index, label in enumerate(labels)}
    return TransactionDatabase(
        ([dense[item] for item in row] for row in rows),
        num_items=len(labels),
        item_labels=labels,
    )


def serialize_fimi(db: TransactionDatabase) -> str:
    """Render the database back to FIMI text using file ids"""
    lines = [" ".join(str(label) for label in db.labels_for(row)) for row in db.transactions]
    return "".join(line + "\n" for line in lines)


def load_fimi(path: Union[str, Path], remap: bool = False) -> TransactionDatabase:
    db = parse_fimi(Path(path).read_bytes(), remap=remap)
    logger.info(f"Loaded {path}: N={db.num_transactions}, P={db.num_items}")
    return db


class LabelVector(BaseModel):
    """
    Binary class labels with the positive class canonicalised to the minority.

    labels holds the file's labels; positive_label is the file label that the
    statistics treat as the positive class.
    """

    model_config = ConfigDict(frozen=True)

    labels: Tuple[int, ...]
    n: int
    positive_label: int = 1
    swapped: bool = False
    balanced: bool = False
    synthetic: bool = False
    ratio: Optional[int] = None

    @property
    def num_transactions(self) -> int:
        return len(self.labels)

    @property
    def orientation(self) -> str:
        if self.synthetic:
            return f"{LABEL_ORIENTATIONS['synthetic']}-{self.ratio}"
        if self.balanced:
            return LABEL_ORIENTATIONS["balanced"]
        if self.swapped:
            return LABEL_ORIENTATIONS["swapped"]
        return LABEL_ORIENTATIONS["as_given"]

    def positive_indices(self) -> List[int]:
        return [tid for tid, label in enumerate(self.labels) if label == self.positive_label]

    @cached_property
    def positive_bits(self) -> int:
        return bits_from_indices(self.positive_indices(), self.num_transactions)


def _canonical_labels(labels: Sequence[int]) -> LabelVector:
    ones = sum(labels)
    zeros = len(labels) - ones
    n = min(ones, zeros)
    if n == 0:
        raise DegenerateLabelsError("degenerate labels: n=0")
    balanced = ones == zeros
    swapped = ones > zeros
    if balanced:
        logger.warning(
            f"Classes are balanced (n = N - n = {n}); keeping label 1 as the positive class"
        )
    return LabelVector(
        labels=tuple(labels),
        n=n,
        positive_label=0 if swapped else 1,
        swapped=swapped,
        balanced=balanced,
    )


def parse_labels(text: TextInput, num_transactions: int) -> LabelVector:
    """
    Parse one 0/1 label per line and canonicalise the minority class.

    Raises:
        ParseError: non-binary token or wrong number of lines
        DegenerateLabelsError: every label is equal
    """
    labels: List[int] = []
    for line_number, line in enumerate(_split_lines(_decode(text)), start=1):
        token = line.strip()
        if token not in ("0", "1"):
            raise ParseError(f"label {token!r} is not 0 or 1", line_number)
        labels.append(int(token))
    if len(labels) != num_transactions:
        raise ParseError(f"expected {num_transactions} labels, found {len(labels)}")
    return _canonical_labels(labels)


def load_labels(path: Union[str, Path], num_transactions: int) -> LabelVector:
    labels = parse_labels(Path(path).read_bytes(), num_transactions)
    logger.info(f"Loaded {path}: n={labels.n} ({labels.orientation})")
    return labels


def synthetic_ratio_labels(num_transactions: int, ratio: int) -> LabelVector:
    """
    Placeholder labels with n = floor(N / ratio) for testability-only runs.

    The first n transactions are positive; the labels are never used for p-values.
    """
    if ratio < 2:
        raise DomainError(f"ratio must be at least 2 so the positive class is the minority, got {ratio}")
    n = num_transactions // ratio
    if n == 0:
        raise DegenerateLabelsError("degenerate labels: n=0")
    labels = [1] * n + [0] * (num_transactions - n)
    return LabelVector(
        labels=tuple(labels),
        n=n,
        balanced=n == num_transactions - n,
        synthetic=True,
        ratio=ratio,
    )


def pattern_support(db: TransactionDatabase, items: Iterable[int]) -> int:
    """Number of transactions containing every item of the pattern"""
    items = list(items)
    if not items:
        return db.num_transactions
    bits = db.item_bits(items[0])
    for item in items[1:]:
        bits &= db.item_bits(item)
    return bits.bit_count()
