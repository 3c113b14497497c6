"""First-stage retrieval: Okapi BM25 over an inverted index and dense
cosine search over L2-normalized embeddings.

BM25 variant: Okapi with the +1-inside-log IDF,
``idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1)``, which is always
non-negative. Query terms are scored per occurrence. Documents with a
score of zero are omitted from results, and ties are broken by ascending
document id everywhere.

Dense index file layout (little-endian):

    magic   b"TMDI"
    version uint32 (currently 1)
    doc_count uint64
    dim       uint64
    matrix    doc_count * dim float32, row-major, rows L2-normalized
    for each doc: uint32 byte-length + UTF-8 doc id
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .corpus import Corpus, tokenize

__all__ = [
    "RetrievalHit",
    "Bm25Index",
    "DenseIndex",
    "build_bm25",
    "bm25_search",
    "bm25_score",
    "cosine",
    "build_dense",
    "dense_search",
    "save_dense",
    "load_dense",
]

_DENSE_MAGIC = b"TMDI"
_DENSE_VERSION = 1


@dataclass(frozen=True)
class RetrievalHit:
    """One ranked search result; ranks start at 1 and scores never increase."""

    doc_id: str
    score: float
    rank: int


@dataclass
class Bm25Index:
    """Inverted index with the statistics Okapi BM25 needs.

    ``postings`` maps a term to ``[(doc_position, term_frequency), ...]``
    in ascending document position.
    """

    doc_count: int
    avg_doc_len: float
    postings: dict[str, list[tuple[int, int]]]
    doc_lens: list[int]
    doc_ids: list[str]
    k1: float = 1.2
    b: float = 0.75
    _df: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._df = {term: len(plist) for term, plist in self.postings.items()}

    def idf(self, term: str) -> float:
        df = self._df.get(term, 0)
        if df == 0:
            return 0.0
        return math.log((self.doc_count - df + 0.5) / (df + 0.5) + 1.0)


def build_bm25(corpus: Corpus, k1: float = 1.2, b: float = 0.75) -> Bm25Index:
    """Build an inverted index over title+text of every document."""
    if len(corpus) == 0:
        raise ValueError("cannot build a BM25 index over an empty corpus")
    if k1 < 0:
        raise ValueError("k1 must be >= 0")
    if not 0.0 <= b <= 1.0:
        raise ValueError("b must be in [0, 1]")
    postings: dict[str, list[tuple[int, int]]] = {}
    doc_lens: list[int] = []
    for pos, doc in enumerate(corpus):
        tokens = tokenize(doc.retrieval_text())
        doc_lens.append(len(tokens))
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for term, tf in counts.items():
            postings.setdefault(term, []).append((pos, tf))
    avg_len = sum(doc_lens) / len(doc_lens)
    return Bm25Index(
        doc_count=len(corpus),
        avg_doc_len=avg_len,
        postings=postings,
        doc_lens=doc_lens,
        doc_ids=[doc.id for doc in corpus],
        k1=k1,
        b=b,
    )


def bm25_score(index: Bm25Index, query: str, doc_position: int) -> float:
    """Okapi BM25 score of one document for a query, summed per query token."""
    if not 0 <= doc_position < index.doc_count:
        raise IndexError(f"document position {doc_position} out of range")
    dl = index.doc_lens[doc_position]
    norm = index.k1 * (1.0 - index.b + index.b * dl / index.avg_doc_len)
    score = 0.0
    for term in tokenize(query):
        plist = index.postings.get(term)
        if plist is None:
            continue
        tf = 0
        for pos, freq in plist:
            if pos == doc_position:
                tf = freq
                break
        if tf == 0:
            continue
        score += index.idf(term) * tf * (index.k1 + 1.0) / (tf + norm)
    return score


def bm25_search(index: Bm25Index, query: str, k: int) -> list[RetrievalHit]:
    """Top-k documents by BM25 score; zero-score documents are omitted."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores: dict[int, float] = {}
    for term in tokenize(query):
        plist = index.postings.get(term)
        if plist is None:
            continue
        idf = index.idf(term)
        for pos, tf in plist:
            dl = index.doc_lens[pos]
            norm = index.k1 * (1.0 - index.b + index.b * dl / index.avg_doc_len)
            scores[pos] = scores.get(pos, 0.0) + idf * tf * (index.k1 + 1.0) / (tf + norm)
    ranked = sorted(
        ((pos, s) for pos, s in scores.items() if s > 0.0),
        key=lambda item: (-item[1], index.doc_ids[item[0]]),
    )
    return [
        RetrievalHit(doc_id=index.doc_ids[pos], score=s, rank=rank)
        for rank, (pos, s) in enumerate(ranked[:k], start=1)
    ]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two vectors; symmetric and in [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine is undefined for a zero vector")
    value = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, value))


@dataclass
class DenseIndex:
    """Row-per-document embedding matrix with unit-norm rows."""

    doc_ids: list[str]
    matrix: np.ndarray  # (doc_count, dim) float32, rows L2-normalized
    normalized: bool = True

    @property
    def doc_count(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def build_dense(corpus: Corpus, encoder: Callable[[str], np.ndarray]) -> DenseIndex:
    """Encode every document (title+text) and L2-normalize the rows.

    Encoder failures are re-raised with the offending document id; any
    NaN/Inf or all-zero embedding is rejected.
    """
    if len(corpus) == 0:
        raise ValueError("cannot build a dense index over an empty corpus")
    rows = []
    dim: int | None = None
    for doc in corpus:
        try:
            vec = np.asarray(encoder(doc.retrieval_text()), dtype=np.float64)
        except Exception as exc:
            raise RuntimeError(f"encoder failed on document {doc.id!r}: {exc}") from exc
        if vec.ndim != 1:
            raise ValueError(f"encoder returned a non-vector for document {doc.id!r}")
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise ValueError(
                f"encoder dim changed on document {doc.id!r}: {vec.shape[0]} != {dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"non-finite embedding for document {doc.id!r}")
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ValueError(f"zero embedding for document {doc.id!r}")
        rows.append(vec / norm)
    matrix = np.asarray(rows, dtype=np.float32)
    return DenseIndex(doc_ids=[doc.id for doc in corpus], matrix=matrix)


def dense_search(index: DenseIndex, query: np.ndarray, k: int) -> list[RetrievalHit]:
    """Top-k documents by cosine similarity to a query embedding."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != index.dim:
        raise ValueError(f"query dim {q.shape} does not match index dim {index.dim}")
    norm = np.linalg.norm(q)
    if norm == 0.0:
        raise ValueError("cosine is undefined for a zero query")
    scores = index.matrix.astype(np.float64) @ (q / norm)
    order = sorted(range(index.doc_count), key=lambda i: (-scores[i], index.doc_ids[i]))
    return [
        RetrievalHit(doc_id=index.doc_ids[i], score=float(scores[i]), rank=rank)
        for rank, i in enumerate(order[:k], start=1)
    ]


def save_dense(index: DenseIndex, path: str | Path) -> None:
    """Persist a dense index using the binary layout documented above."""
    with open(path, "wb") as fh:
        fh.write(_DENSE_MAGIC)
        fh.write(struct.pack("<I", _DENSE_VERSION))
        fh.write(struct.pack("<QQ", index.doc_count, index.dim))
        fh.write(np.ascontiguousarray(index.matrix, dtype=np.float32).tobytes())
        for doc_id in index.doc_ids:
            raw = doc_id.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)


def load_dense(path: str | Path) -> DenseIndex:
    """Load a dense index written by ``save_dense``."""
    data = Path(path).read_bytes()
    if data[:4] != _DENSE_MAGIC:
        raise ValueError(f"{path}: not a dense index file")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != _DENSE_VERSION:
        raise ValueError(f"{path}: unsupported dense index version {version}")
    doc_count, dim = struct.unpack_from("<QQ", data, 8)
    offset = 24
    nbytes = doc_count * dim * 4
    matrix = np.frombuffer(data, dtype="<f4", count=doc_count * dim, offset=offset)
    matrix = matrix.reshape(doc_count, dim).copy()
    offset += nbytes
    doc_ids: list[str] = []
    for _ in range(doc_count):
        (length,) = struct.unpack_from("<I", data, offset)
        offset += 4
        doc_ids.append(data[offset : offset + length].decode("utf-8"))
        offset += length
    return DenseIndex(doc_ids=doc_ids, matrix=matrix)
