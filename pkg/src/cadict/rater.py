"""Semantic cores and the similarity-ratio concreteness rating.

A core is a pair of disjoint seed sets: Z strongly abstract and Z strongly
concrete words. A word's raw rating is the ratio of its mean cosine to the
concrete seed over its mean cosine to the abstract seed; larger means more
concrete. Mean cosines at or below a small floor are clamped so the ratio
stays positive and defined, with the denominator case flagged per word.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from cadict.embeddings import VectorStore
from cadict.errors import DataError

logger = logging.getLogger(__name__)

SIMILARITY_FLOOR = 1e-6
FLAG_DENOMINATOR_FLOORED = "denominator_floored"


@dataclass(frozen=True)
class SemanticCore:
    """Paired seed sets of equal size Z; disjoint, duplicate-free."""

    seed_abstract: tuple[str, ...]
    seed_concrete: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "seed_abstract", tuple(self.seed_abstract))
        object.__setattr__(self, "seed_concrete", tuple(self.seed_concrete))
        if len(self.seed_abstract) < 1 or len(self.seed_abstract) != len(self.seed_concrete):
            raise ValueError("seeds must be non-empty and of equal size")
        if len(set(self.seed_abstract)) != len(self.seed_abstract):
            raise ValueError("duplicate tokens in abstract seed")
        if len(set(self.seed_concrete)) != len(self.seed_concrete):
            raise ValueError("duplicate tokens in concrete seed")
        if set(self.seed_abstract) & set(self.seed_concrete):
            raise ValueError("seeds must be disjoint")

    @property
    def z(self) -> int:
        return len(self.seed_abstract)

    def swapped(self) -> "SemanticCore":
        """The same core with abstract and concrete roles exchanged."""
        return SemanticCore(seed_abstract=self.seed_concrete, seed_concrete=self.seed_abstract)

    def require_in_store(self, store: VectorStore) -> None:
        for t in self.seed_abstract + self.seed_concrete:
            if t not in store:
                raise DataError(f"core token not in vector store: {t!r}")


@dataclass(frozen=True)
class RatedWord:
    """One rated token. `scaled_rating` is None until a batch rescale assigns it."""

    token: str
    raw_rating: float
    scaled_rating: float | None = None
    flags: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class BatchRating:
    """rate_all output: rated words in input order plus the OOV skip report."""

    rated: tuple[RatedWord, ...]
    skipped: tuple[str, ...]


@dataclass(frozen=True)
class DictionarySummary:
    """Counts from one build_dictionary run."""

    rated: int
    skipped: int
    floored: int
    skipped_tokens: tuple[str, ...] = ()


def _mean_seed_vector(seed: Iterable[str], store: VectorStore) -> np.ndarray:
    # canonical lexicographic order keeps the summation bit-reproducible
    # under seed permutations and across runs
    ordered = sorted(seed)
    rows = store.rows(ordered)
    return rows.sum(axis=0) / len(ordered)


def mean_similarity(w: str, seed: Iterable[str], store: VectorStore) -> float:
    """Mean cosine of `w` against the seed members, clamped to [-1, 1].

    If `w` itself is a seed member it is included like any other member.
    """
    seed = tuple(seed)
    if not seed:
        raise ValueError("seed must be non-empty")
    wv = store.vector(w)
    return float(np.clip(np.dot(wv, _mean_seed_vector(seed, store)), -1.0, 1.0))


def raw_ratings(matrix: np.ndarray, core: SemanticCore,
                store: VectorStore) -> tuple[np.ndarray, np.ndarray]:
    """Raw ratio ratings for unit-vector rows of `matrix` under `core`.

    Returns (raw, denominator_floored). This is the single arithmetic path
    shared by single-word rating, batch rating, and the core search, so all
    of them agree bit for bit.
    """
    mean_c = _mean_seed_vector(core.seed_concrete, store)
    mean_a = _mean_seed_vector(core.seed_abstract, store)
    sims_c = np.clip(matrix @ mean_c, -1.0, 1.0)
    sims_a = np.clip(matrix @ mean_a, -1.0, 1.0)
    raw = np.maximum(sims_c, SIMILARITY_FLOOR) / np.maximum(sims_a, SIMILARITY_FLOOR)
    return raw, sims_a <= SIMILARITY_FLOOR


def rate_word(w: str, core: SemanticCore, store: VectorStore) -> RatedWord:
    """Rate one word: max(sim_C, floor) / max(sim_A, floor); flags a floored denominator."""
    core.require_in_store(store)
    matrix = store.vector(w).reshape(1, -1)
    raw, floored = raw_ratings(matrix, core, store)
    flags = frozenset({FLAG_DENOMINATOR_FLOORED}) if floored[0] else frozenset()
    return RatedWord(token=w, raw_rating=float(raw[0]), scaled_rating=None, flags=flags)


def _min_max_scale(raw: np.ndarray) -> np.ndarray:
    lo = float(raw.min())
    hi = float(raw.max())
    if lo == hi:
        return np.full_like(raw, 3.0)
    return 1.0 + 4.0 * (raw - lo) / (hi - lo)


def _resolve(words: Iterable[str], store: VectorStore) -> tuple[list[str], list[int], list[str]]:
    found: list[str] = []
    idx: list[int] = []
    skipped: list[str] = []
    for w in words:
        i = store.row_index(w)
        if i is None:
            skipped.append(w)
        else:
            found.append(w)
            idx.append(i)
    return found, idx, skipped


def rate_all(words: Iterable[str], core: SemanticCore, store: VectorStore) -> BatchRating:
    """Rate every resolvable word; OOV tokens go to the skip report, not errors.

    Scaled ratings are the batch min-max rescale of the raw ratio onto [1, 5]
    (an all-equal batch maps to 3.0), so rank order is preserved exactly.
    Output order equals input order.
    """
    core.require_in_store(store)
    found, idx, skipped = _resolve(words, store)
    if not found:
        raise DataError("empty resolvable word set: no input word is in the vector store")
    matrix = store.matrix[np.asarray(idx, dtype=np.intp)]
    raw, floored = raw_ratings(matrix, core, store)
    scaled = _min_max_scale(raw)
    rated = tuple(
        RatedWord(
            token=t,
            raw_rating=float(r),
            scaled_rating=float(s),
            flags=frozenset({FLAG_DENOMINATOR_FLOORED}) if f else frozenset(),
        )
        for t, r, s, f in zip(found, raw, scaled, floored)
    )
    if skipped:
        logger.info("rate_all: %d token(s) out of vocabulary", len(skipped))
    return BatchRating(rated=rated, skipped=tuple(skipped))


def build_dictionary(core: SemanticCore, vocab: Iterable[str] | None,
                     store: VectorStore, out: str | Path) -> DictionarySummary:
    """Rate `vocab` (default: the whole store) and write the dictionary TSV.

    Row format: token, raw rating (9 significant digits), scaled rating
    (3 decimals), flags (`-` when none), tab separated.
    """
    core.require_in_store(store)
    tokens = list(vocab) if vocab is not None else list(store.tokens)
    found, idx, skipped = _resolve(tokens, store)
    if not found:
        raise DataError("empty resolvable word set: no vocab word is in the vector store")
    matrix = store.matrix[np.asarray(idx, dtype=np.intp)]
    raw, floored = raw_ratings(matrix, core, store)
    scaled = _min_max_scale(raw)
    with open(out, "w", encoding="utf-8") as fh:
        for t, r, s, f in zip(found, raw, scaled, floored):
            flags = FLAG_DENOMINATOR_FLOORED if f else "-"
            fh.write(f"{t}\t{r:.9g}\t{s:.3f}\t{flags}\n")
    return DictionarySummary(
        rated=len(found),
        skipped=len(skipped),
        floored=int(floored.sum()),
        skipped_tokens=tuple(skipped),
    )


def save_core(core: SemanticCore, path: str | Path, provenance: dict | None = None) -> None:
    """Write a core file: z, both seed arrays, and a provenance block."""
    doc = {
        "format_version": 1,
        "kind": "semantic_core",
        "z": core.z,
        "seed_abstract": list(core.seed_abstract),
        "seed_concrete": list(core.seed_concrete),
        "provenance": provenance or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_core(path: str | Path) -> tuple[SemanticCore, dict]:
    """Read a core file written by `save_core`; returns (core, provenance)."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a valid core file: {exc}") from exc
    try:
        core = SemanticCore(
            seed_abstract=tuple(doc["seed_abstract"]),
            seed_concrete=tuple(doc["seed_concrete"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a valid core file: {exc}") from exc
    if "z" in doc and doc["z"] != core.z:
        raise DataError(f"{path}: declared z={doc['z']} but seeds have length {core.z}")
    return core, doc.get("provenance", {})
