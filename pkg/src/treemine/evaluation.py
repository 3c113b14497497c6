"""Ranking metrics over run files and relevance judgments.

Conventions: DCG uses log base 2 with the (i+1) discount, a document is
relevant when its gain is positive, and queries with no relevant
document contribute 0 to every mean (and are counted). All metrics
depend only on the ordering of run scores.

File formats:

* qrels: 4 columns, ``qid 0 docid gain``
* runs:  6 columns, ``qid Q0 docid rank score tag`` (TREC)
* queries: JSON-Lines ``{"id": str, "text": str}``
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import NamedTuple

from .retrieval import RetrievalHit

__all__ = [
    "MetricResult",
    "Qrels",
    "RunResult",
    "load_qrels",
    "save_qrels",
    "load_queries",
    "validate_run",
    "run_from_hits",
    "ndcg_at_k",
    "precision_recall_at_k",
    "mrr_at_k",
    "read_trec_run",
    "write_trec_run",
]

Qrels = dict[str, dict[str, int]]
RunResult = dict[str, list[tuple[str, float]]]


class MetricResult(NamedTuple):
    per_query: dict[str, float]
    mean: float


def _mean(values: dict[str, float]) -> float:
    if not values:
        return 0.0
    return sum(values.values()) / len(values)


def load_qrels(path: str | Path) -> Qrels:
    """Read 4-column qrels; gains must be non-negative integers."""
    qrels: Qrels = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 columns, got {len(parts)}")
        qid, _, doc_id, gain_str = parts
        try:
            gain = int(gain_str)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: gain {gain_str!r} is not an integer") from None
        if gain < 0:
            raise ValueError(f"{path}:{lineno}: negative gain")
        qrels.setdefault(qid, {})[doc_id] = gain
    if not qrels:
        raise ValueError(f"{path}: empty qrels")
    return qrels


def save_qrels(qrels: Qrels, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid in qrels:
            for doc_id, gain in qrels[qid].items():
                fh.write(f"{qid} 0 {doc_id} {gain}\n")


def load_queries(path: str | Path) -> dict[str, str]:
    """Read JSON-Lines queries (works for question or CoT-as-query files)."""
    queries: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        if "id" not in obj or "text" not in obj:
            raise ValueError(f"{path}:{lineno}: query needs 'id' and 'text'")
        queries[obj["id"]] = obj["text"]
    return queries


def validate_run(run: RunResult) -> None:
    """Check per-query uniqueness of doc ids and non-increasing scores."""
    for qid, ranking in run.items():
        seen: set[str] = set()
        prev = math.inf
        for doc_id, score in ranking:
            if doc_id in seen:
                raise ValueError(f"query {qid!r}: duplicate document {doc_id!r}")
            seen.add(doc_id)
            if score > prev:
                raise ValueError(f"query {qid!r}: scores increase at {doc_id!r}")
            prev = score


def run_from_hits(hits_by_query: dict[str, list[RetrievalHit]]) -> RunResult:
    run = {
        qid: [(h.doc_id, h.score) for h in hits] for qid, hits in hits_by_query.items()
    }
    validate_run(run)
    return run


def _require_judged(run: RunResult, qrels: Qrels) -> None:
    missing = [qid for qid in run if qid not in qrels]
    if missing:
        raise ValueError(f"run queries missing from qrels: {missing[:5]}")


def ndcg_at_k(run: RunResult, qrels: Qrels, k: int) -> MetricResult:
    """Normalized DCG at cutoff k per query, plus the mean."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _require_judged(run, qrels)
    per_query: dict[str, float] = {}
    for qid, ranking in run.items():
        gains = qrels[qid]
        dcg = 0.0
        for i, (doc_id, _) in enumerate(ranking[:k], start=1):
            gain = gains.get(doc_id, 0)
            if gain:
                dcg += gain / math.log2(i + 1)
        ideal = sorted(gains.values(), reverse=True)[:k]
        idcg = sum(g / math.log2(i + 1) for i, g in enumerate(ideal, start=1) if g)
        per_query[qid] = dcg / idcg if idcg > 0 else 0.0
    return MetricResult(per_query, _mean(per_query))


def precision_recall_at_k(
    run: RunResult, qrels: Qrels, k: int
) -> tuple[MetricResult, MetricResult]:
    """P@k (fixed denominator k) and R@k (0 when nothing is relevant)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _require_judged(run, qrels)
    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    for qid, ranking in run.items():
        gains = qrels[qid]
        relevant_total = sum(1 for g in gains.values() if g > 0)
        hits = sum(1 for doc_id, _ in ranking[:k] if gains.get(doc_id, 0) > 0)
        precision[qid] = hits / k
        recall[qid] = hits / relevant_total if relevant_total else 0.0
    return (
        MetricResult(precision, _mean(precision)),
        MetricResult(recall, _mean(recall)),
    )


def mrr_at_k(run: RunResult, qrels: Qrels, k: int) -> MetricResult:
    """Reciprocal rank of the first relevant document within the top k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _require_judged(run, qrels)
    per_query: dict[str, float] = {}
    for qid, ranking in run.items():
        gains = qrels[qid]
        rr = 0.0
        for i, (doc_id, _) in enumerate(ranking[:k], start=1):
            if gains.get(doc_id, 0) > 0:
                rr = 1.0 / i
                break
        per_query[qid] = rr
    return MetricResult(per_query, _mean(per_query))


def read_trec_run(path: str | Path) -> RunResult:
    """Parse a 6-column TREC run; the rank column must match file order."""
    run: RunResult = {}
    expected_rank: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
        qid, _, doc_id, rank_str, score_str, _tag = parts
        try:
            rank = int(rank_str)
            score = float(score_str)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad rank or score") from None
        expected = expected_rank.get(qid, 0) + 1
        if rank != expected:
            raise ValueError(
                f"{path}:{lineno}: rank {rank} inconsistent with order (expected {expected})"
            )
        expected_rank[qid] = expected
        run.setdefault(qid, []).append((doc_id, score))
    validate_run(run)
    return run


def write_trec_run(run: RunResult, path: str | Path, tag: str = "treemine") -> None:
    """Write the standard 6-column format; scores keep full precision."""
    validate_run(run)
    with open(path, "w", encoding="utf-8") as fh:
        for qid, ranking in run.items():
            for rank, (doc_id, score) in enumerate(ranking, start=1):
                fh.write(f"{qid} Q0 {doc_id} {rank} {score!r} {tag}\n")
