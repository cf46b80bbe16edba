"""Expert ratings and frequency lists; base-dictionary and candidate-pool selection.

The working vocabulary everywhere downstream is the three-way intersection of
expert ratings, the frequency list, and the vector store. Multiword lexicon
entries are dropped at load: static vector files key on single tokens.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from cadict.embeddings import VectorStore
from cadict.errors import DataError, InfeasibleError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TableReport:
    """Row bookkeeping from loading one TSV."""

    accepted: int
    rejected: int
    multiword_excluded: int
    duplicates_ignored: int


class RatingLexicon:
    """Token -> expert rating on the 1 (most abstract) .. 5 (most concrete) scale."""

    def __init__(self, entries: dict[str, float], report: TableReport | None = None):
        for token, rating in entries.items():
            if not 1.0 <= rating <= 5.0:
                raise ValueError(f"rating out of [1, 5] for {token!r}: {rating}")
        self._entries = dict(entries)
        self.report = report or TableReport(len(self._entries), 0, 0, 0)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def rating(self, token: str) -> float:
        return self._entries[token]

    def items(self):
        return self._entries.items()

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(self._entries)


class FrequencyList:
    """Token -> corpus count, used to rank words by frequency."""

    def __init__(self, entries: dict[str, int], report: TableReport | None = None):
        for token, count in entries.items():
            if count < 0:
                raise ValueError(f"negative count for {token!r}: {count}")
        self._entries = dict(entries)
        self.report = report or TableReport(len(self._entries), 0, 0, 0)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def count(self, token: str) -> int:
        return self._entries[token]

    def items(self):
        return self._entries.items()


@dataclass(frozen=True, eq=False)
class BaseDictionary:
    """The X most frequent expert-rated in-store words, frequency-descending."""

    tokens: tuple[str, ...]
    ratings: np.ndarray
    frequencies: tuple[int, ...]

    @property
    def x(self) -> int:
        return len(self.tokens)

    @property
    def words(self) -> tuple[tuple[str, float], ...]:
        """(token, rating) pairs in base order."""
        return tuple(zip(self.tokens, (float(r) for r in self.ratings)))


@dataclass(frozen=True)
class CandidatePools:
    """Y most abstract and Y most concrete base words; always disjoint."""

    abstract: tuple[str, ...]
    concrete: tuple[str, ...]

    @property
    def y(self) -> int:
        return len(self.abstract)


def _split_row(line: str) -> list[str]:
    return line.rstrip("\n").rstrip("\r").split("\t")


def load_ratings(path: str | Path, fold_case: bool = True) -> RatingLexicon:
    """Load a `token TAB rating` TSV of expert ratings.

    A header is auto-detected on the first row (second field non-numeric).
    Multiword tokens are excluded and counted separately; rows with a rating
    outside [1, 5] or that do not parse are rejected and counted. More than
    10% rejected rows is a hard error: the file is probably the wrong one.
    """
    path = Path(path)
    entries: dict[str, float] = {}
    rejected = multiword = duplicates = data_rows = 0

    with open(path, encoding="utf-8") as fh:
        for rowno, line in enumerate(fh):
            if not line.strip():
                continue
            fields = _split_row(line)
            if rowno == 0 and len(fields) >= 2:
                try:
                    float(fields[1])
                except ValueError:
                    continue  # header
            data_rows += 1
            if len(fields) != 2:
                rejected += 1
                continue
            token = fields[0].strip()
            if not token:
                rejected += 1
                continue
            if len(token.split()) > 1:
                multiword += 1
                continue
            try:
                rating = float(fields[1])
            except ValueError:
                rejected += 1
                continue
            if not (1.0 <= rating <= 5.0):
                rejected += 1
                continue
            if fold_case:
                token = token.lower()
            if token in entries:
                duplicates += 1
                continue
            entries[token] = rating

    if rejected * 10 > data_rows:
        raise DataError(
            f"{path}: {rejected} of {data_rows} rows rejected (>10%); "
            "this does not look like a ratings file"
        )
    if data_rows == 0:
        logger.warning("%s: empty ratings file", path)
    report = TableReport(accepted=len(entries), rejected=rejected,
                         multiword_excluded=multiword, duplicates_ignored=duplicates)
    return RatingLexicon(entries, report)


def load_frequencies(path: str | Path, fold_case: bool = True) -> FrequencyList:
    """Load a `token TAB count` TSV; negative or non-integer counts are rejected."""
    path = Path(path)
    entries: dict[str, int] = {}
    rejected = duplicates = data_rows = 0

    with open(path, encoding="utf-8") as fh:
        for rowno, line in enumerate(fh):
            if not line.strip():
                continue
            fields = _split_row(line)
            if rowno == 0 and len(fields) >= 2:
                try:
                    float(fields[1])
                except ValueError:
                    continue  # header
            data_rows += 1
            if len(fields) != 2:
                rejected += 1
                continue
            token = fields[0].strip()
            if not token:
                rejected += 1
                continue
            try:
                count = int(fields[1])
            except ValueError:
                rejected += 1
                continue
            if count < 0:
                rejected += 1
                continue
            if fold_case:
                token = token.lower()
            if token in entries:
                duplicates += 1
                continue
            entries[token] = count

    if data_rows == 0:
        logger.warning("%s: empty frequency file", path)
    report = TableReport(accepted=len(entries), rejected=rejected,
                         multiword_excluded=0, duplicates_ignored=duplicates)
    return FrequencyList(entries, report)


def select_base(lex: RatingLexicon, freq: FrequencyList, store: VectorStore,
                x: int) -> BaseDictionary:
    """Pick the `x` most frequent words of the ratings/frequency/store intersection.

    Frequency ties break lexicographically, so the result is deterministic.
    """
    if x < 1:
        raise ValueError("x must be a positive integer")
    common = [t for t in lex.tokens if t in freq and t in store]
    if len(common) < x:
        raise InfeasibleError(
            f"base dictionary of {x} requested but only {len(common)} words are in the "
            "intersection of ratings, frequencies, and vectors"
        )
    common.sort(key=lambda t: (-freq.count(t), t))
    chosen = common[:x]
    return BaseDictionary(
        tokens=tuple(chosen),
        ratings=np.array([lex.rating(t) for t in chosen], dtype=np.float64),
        frequencies=tuple(freq.count(t) for t in chosen),
    )


def select_pools(base: BaseDictionary, y: int) -> CandidatePools:
    """Take the `y` lowest-rated (abstract) and `y` highest-rated (concrete) base words.

    Requires y <= X/3, which keeps the pools comfortably disjoint. Rating ties
    break by higher frequency first, then lexicographically; the concrete pool
    is picked from the words the abstract pool did not take, so the two never
    overlap even on pathological all-tied ratings.
    """
    if y < 1:
        raise ValueError("y must be a positive integer")
    if y > base.x // 3:
        raise InfeasibleError(f"y={y} exceeds X/3={base.x // 3} for X={base.x}")

    order = sorted(
        range(base.x),
        key=lambda i: (base.ratings[i], -base.frequencies[i], base.tokens[i]),
    )
    abstract = order[:y]
    rest = order[y:]
    rest.sort(key=lambda i: (-base.ratings[i], -base.frequencies[i], base.tokens[i]))
    concrete = rest[:y]
    return CandidatePools(
        abstract=tuple(base.tokens[i] for i in abstract),
        concrete=tuple(base.tokens[i] for i in concrete),
    )
