"""Static word vectors: text-format parsing, unit normalization, cosine similarity.

Vectors are L2-normalized once at load so that every later similarity is a
plain dot product; the seed search downstream evaluates millions of them.
A binary cache format is provided because parsing multi-gigabyte text dumps
dominates start-up time otherwise.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from cadict.errors import DataError

logger = logging.getLogger(__name__)

CACHE_MAGIC = b"CAVS0001"


@dataclass(frozen=True)
class WordVector:
    """A token paired with its dense vector (unit-normalized once stored)."""

    token: str
    values: np.ndarray


@dataclass(frozen=True)
class LoadReport:
    """Bookkeeping from one load pass over a vector file."""

    accepted: int
    zero_norm_skipped: int
    duplicates_ignored: int
    filtered_out: int


class VectorStore:
    """Immutable token -> unit vector map over a single dense matrix.

    Rows are float64 and L2-normalized; the matrix is marked read-only after
    construction, so a published store is safe for concurrent readers.
    """

    def __init__(self, tokens: Sequence[str], matrix: np.ndarray, source_id: str,
                 load_report: LoadReport | None = None):
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise ValueError("matrix shape does not match token count")
        if matrix.shape[0] == 0:
            raise DataError(f"vector store from {source_id!r} is empty")
        self._tokens = tuple(tokens)
        for t in self._tokens:
            if not t or len(t.split()) != 1:
                raise ValueError(f"bad token for store: {t!r}")
        self._index = {t: i for i, t in enumerate(self._tokens)}
        if len(self._index) != len(self._tokens):
            raise ValueError("duplicate tokens in store construction")
        matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        norms = np.linalg.norm(matrix, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-6):
            raise ValueError("store rows must be unit-normalized")
        matrix.setflags(write=False)
        self._matrix = matrix
        self._source_id = source_id
        self._load_report = load_report or LoadReport(len(self._tokens), 0, 0, 0)

    @classmethod
    def from_raw(cls, tokens: Sequence[str], matrix, source_id: str = "in-memory") -> "VectorStore":
        """Build a store from raw (not yet normalized) vectors; zero rows are an error."""
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("expected a 2-d matrix")
        norms = np.linalg.norm(matrix, axis=1)
        if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
            raise ValueError("zero-norm or non-finite vector in raw matrix")
        return cls(tokens, matrix / norms[:, None], source_id=source_id)

    @property
    def dimension(self) -> int:
        return self._matrix.shape[1]

    @property
    def source_id(self) -> str:
        return self._source_id

    @property
    def load_report(self) -> LoadReport:
        return self._load_report

    @property
    def tokens(self) -> tuple[str, ...]:
        """All stored tokens, in load order."""
        return self._tokens

    @property
    def matrix(self) -> np.ndarray:
        """The (n, d) read-only matrix of unit rows."""
        return self._matrix

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def row_index(self, token: str) -> int | None:
        return self._index.get(token)

    def vector(self, token: str) -> np.ndarray:
        """Unit vector for `token`; raises DataError naming the token if absent."""
        i = self._index.get(token)
        if i is None:
            raise DataError(f"token not in vector store: {token!r}")
        return self._matrix[i]

    def get(self, token: str) -> WordVector:
        return WordVector(token, self.vector(token))

    def rows(self, tokens: Iterable[str]) -> np.ndarray:
        """Stacked unit vectors for `tokens`, in the given order."""
        idx = []
        for t in tokens:
            i = self._index.get(t)
            if i is None:
                raise DataError(f"token not in vector store: {t!r}")
            idx.append(i)
        return self._matrix[np.asarray(idx, dtype=np.intp)]


def cosine(a: WordVector, b: WordVector) -> float:
    """Cosine similarity of two word vectors, clamped to [-1, 1].

    Store-resident vectors are already unit length, so this reduces to a dot
    product; the norms are still divided out to stay correct for raw vectors.
    """
    if a.values.shape != b.values.shape:
        raise ValueError(
            f"dimension mismatch: {a.token!r} has {a.values.shape[0]}, "
            f"{b.token!r} has {b.values.shape[0]}"
        )
    na = np.linalg.norm(a.values)
    nb = np.linalg.norm(b.values)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero-norm vector")
    return float(np.clip(np.dot(a.values, b.values) / (na * nb), -1.0, 1.0))


def _looks_like_header(parts: list[str]) -> bool:
    if len(parts) != 2:
        return False
    try:
        int(parts[0]), int(parts[1])
    except ValueError:
        return False
    return True


def load_vectors(path: str | Path, vocab_filter: set[str] | None = None,
                 fold_case: bool = True) -> VectorStore:
    """Parse a word-vectors text file into a VectorStore.

    Format: optional first line ``N d`` (two integers), then one
    ``token v1 ... vd`` record per line, whitespace separated, UTF-8.
    The dimension is inferred from the first record; any later record with a
    different component count is a hard error naming the line. Zero-norm (or
    non-finite) vectors are dropped and counted; on duplicate tokens the first
    occurrence wins. Tokens are folded to lowercase unless `fold_case` is off;
    `vocab_filter`, when given, is matched after folding.
    """
    path = Path(path)
    if fold_case and vocab_filter is not None:
        vocab_filter = {t.lower() for t in vocab_filter}

    tokens: list[str] = []
    rows: list[np.ndarray] = []
    index: dict[str, int] = {}
    dimension: int | None = None
    zero_norm = duplicates = filtered = 0

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and _looks_like_header(parts):
                continue
            width = len(parts) - 1
            if dimension is None:
                if width < 1:
                    raise DataError(f"{path}: line {lineno}: record has no vector components")
                dimension = width
            elif width != dimension:
                raise DataError(
                    f"{path}: line {lineno}: expected {dimension} components, found {width}"
                )
            token = parts[0].lower() if fold_case else parts[0]
            if vocab_filter is not None and token not in vocab_filter:
                filtered += 1
                continue
            if token in index:
                duplicates += 1
                continue
            try:
                vec = np.array(parts[1:], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: unparseable vector component") from exc
            norm = float(np.linalg.norm(vec))
            if norm == 0.0 or not np.isfinite(norm):
                zero_norm += 1
                continue
            index[token] = len(tokens)
            tokens.append(token)
            rows.append(vec / norm)

    if not tokens:
        raise DataError(f"{path}: no usable vector records")
    report = LoadReport(
        accepted=len(tokens),
        zero_norm_skipped=zero_norm,
        duplicates_ignored=duplicates,
        filtered_out=filtered,
    )
    if zero_norm or duplicates:
        logger.warning(
            "%s: skipped %d zero-norm record(s), ignored %d duplicate token(s)",
            path, zero_norm, duplicates,
        )
    return VectorStore(tokens, np.vstack(rows), source_id=str(path), load_report=report)


def save_cache(store: VectorStore, path: str | Path) -> None:
    """Write a binary cache of `store`; loads back via `load_cache` byte-exactly."""
    header = {
        "version": 1,
        "dimension": store.dimension,
        "count": len(store),
        "source_id": store.source_id,
        "dtype": "<f8",
    }
    header_blob = json.dumps(header, sort_keys=True).encode("utf-8")
    token_blob = "\n".join(store.tokens).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<I", len(header_blob)))
        fh.write(header_blob)
        fh.write(struct.pack("<Q", len(token_blob)))
        fh.write(token_blob)
        fh.write(np.ascontiguousarray(store.matrix, dtype="<f8").tobytes())


def load_cache(path: str | Path, vocab_filter: set[str] | None = None) -> VectorStore:
    """Load a binary cache written by `save_cache`."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(CACHE_MAGIC))
        if magic != CACHE_MAGIC:
            raise DataError(f"{path}: not a cadict vector cache (bad magic)")
        (header_len,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        (token_len,) = struct.unpack("<Q", fh.read(8))
        token_blob = fh.read(token_len).decode("utf-8")
        tokens = token_blob.split("\n") if token_blob else []
        count, dim = header["count"], header["dimension"]
        if len(tokens) != count:
            raise DataError(f"{path}: cache token count mismatch")
        data = fh.read(count * dim * 8)
        if len(data) != count * dim * 8:
            raise DataError(f"{path}: cache truncated")
        matrix = np.frombuffer(data, dtype="<f8").reshape(count, dim)

    filtered = 0
    if vocab_filter is not None:
        keep = [i for i, t in enumerate(tokens) if t in vocab_filter]
        filtered = len(tokens) - len(keep)
        tokens = [tokens[i] for i in keep]
        matrix = matrix[np.asarray(keep, dtype=np.intp)] if keep else matrix[:0]
        if not tokens:
            raise DataError(f"{path}: vocab filter removed every cached vector")
    report = LoadReport(accepted=len(tokens), zero_norm_skipped=0,
                        duplicates_ignored=0, filtered_out=filtered)
    return VectorStore(tokens, np.array(matrix), source_id=header["source_id"],
                       load_report=report)


def open_store(path: str | Path, vocab_filter: set[str] | None = None,
               fold_case: bool = True) -> VectorStore:
    """Open either a word-vectors text file or a binary cache, by sniffing magic bytes."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(len(CACHE_MAGIC))
    if head == CACHE_MAGIC:
        return load_cache(path, vocab_filter=vocab_filter)
    return load_vectors(path, vocab_filter=vocab_filter, fold_case=fold_case)
