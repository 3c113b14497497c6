"""Mine finished search trees into retrieval training data.

Only root-to-terminal paths with reward 1 that pass through at least one
retrieval node are kept. Each kept trajectory yields up to four query
types per retrieval position:

* ``cot``      - question plus the reasoning steps before the query node
  (generated QG text never appears in these queries),
* ``llmq``     - a concise information-need sentence written by the
  generation backend from question, partial solution, and theorem,
* ``question`` - the original math question verbatim,
* ``lexical``  - term-overlapping queries generated from the theorem
  alone and kept only when BM25 retrieves the theorem in its top-20
  (round-trip consistency).

The positive is the retrieved theorem's original text (by id); hard
negatives come from the reflection-reject ledger and are padded from top
BM25 hits to a fixed width at assembly time.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from .corpus import Corpus
from .llm import DecodingParams, GenBackend, generate, render_prompt
from .mcts import ActionKind, SearchTree, reward
from .retrieval import Bm25Index, bm25_search

logger = logging.getLogger(__name__)

__all__ = [
    "QUERY_TYPES",
    "ROUND_TRIP_K",
    "Trajectory",
    "TrainingSample",
    "SynthesisConfig",
    "extract_trajectories",
    "make_cot_query",
    "make_llm_query",
    "make_question_query",
    "make_lexical_queries",
    "assemble_dataset",
    "load_dataset",
    "write_stats",
]

QUERY_TYPES = ("cot", "llmq", "question", "lexical")

# Round-trip consistency: a lexical query is kept only when BM25 returns
# its source theorem within the top ROUND_TRIP_K results.
ROUND_TRIP_K = 20


@dataclass
class Trajectory:
    """One rewarded root-to-terminal path containing retrieval nodes."""

    problem_id: str
    question: str
    step_contents: list[str]
    step_actions: list[str]
    qg_positions: list[int]
    qg_node_ids: list[int]
    rt_theorems: dict[int, str]  # qg position -> accepted theorem id
    negatives: dict[int, list[str]]  # qg position -> rejected theorem ids
    terminal_reward: float = 1.0


@dataclass
class TrainingSample:
    """Export unit: a query, its positive document, and hard negatives."""

    query: str
    query_type: str
    positive_id: str
    negative_ids: list[str]
    problem_id: str


@dataclass
class SynthesisConfig:
    negatives_per_sample: int = 12
    lexical_candidates: int = 3
    query_types: tuple[str, ...] = QUERY_TYPES
    decoding: DecodingParams = field(default_factory=DecodingParams)

    def __post_init__(self) -> None:
        for qt in self.query_types:
            if qt not in QUERY_TYPES:
                raise ValueError(f"unknown query type {qt!r}")


def extract_trajectories(tree: SearchTree) -> list[Trajectory]:
    """All reward-1 terminal paths that contain at least one RT node."""
    rejects_by_qg: dict[int, list[str]] = {}
    for entry in tree.ledger:
        rejects_by_qg.setdefault(entry.qg_node_id, []).append(entry.theorem_id)

    trajectories: list[Trajectory] = []
    for terminal in tree.terminals():
        r = terminal.reward
        if r is None:
            r = reward(terminal, tree.problem)
        if r != 1.0:
            continue
        path = tree.path_to_root(terminal.node_id)[1:]  # drop the root
        if not any(n.action is ActionKind.RT for n in path):
            continue
        qg_positions: list[int] = []
        qg_node_ids: list[int] = []
        rt_theorems: dict[int, str] = {}
        negatives: dict[int, list[str]] = {}
        for pos, node in enumerate(path):
            if node.action is not ActionKind.QG:
                continue
            if pos + 1 >= len(path) or path[pos + 1].action is not ActionKind.RT:
                continue
            qg_positions.append(pos)
            qg_node_ids.append(node.node_id)
            rt_theorems[pos] = path[pos + 1].theorem_id or ""
            negatives[pos] = list(rejects_by_qg.get(node.node_id, []))
        if not qg_positions:
            continue
        trajectories.append(
            Trajectory(
                problem_id=tree.problem.id,
                question=tree.problem.question,
                step_contents=[n.content for n in path],
                step_actions=[n.action.value if n.action else "" for n in path],
                qg_positions=qg_positions,
                qg_node_ids=qg_node_ids,
                rt_theorems=rt_theorems,
                negatives=negatives,
                terminal_reward=r,
            )
        )
    return trajectories


def _reasoning_prefix(traj: Trajectory, qg_position: int) -> list[str]:
    """Steps strictly before the query node, with QG text filtered out."""
    return [
        content
        for content, action in zip(
            traj.step_contents[:qg_position], traj.step_actions[:qg_position]
        )
        if action != ActionKind.QG.value
    ]


def _positive_for(traj: Trajectory, qg_position: int) -> str:
    if qg_position not in traj.rt_theorems:
        raise ValueError(
            f"trajectory of problem {traj.problem_id} has no accepted theorem "
            f"at position {qg_position}"
        )
    return traj.rt_theorems[qg_position]


def _ledger_negatives(traj: Trajectory, qg_position: int, positive_id: str) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for doc_id in traj.negatives.get(qg_position, []):
        if doc_id == positive_id or doc_id in seen:
            continue
        seen.add(doc_id)
        out.append(doc_id)
    return out


def make_cot_query(traj: Trajectory, qg_position: int) -> TrainingSample:
    """Chain-of-thought query: question plus the steps before the QG node."""
    positive = _positive_for(traj, qg_position)
    steps = _reasoning_prefix(traj, qg_position)
    query = traj.question if not steps else traj.question + "\n" + "\n".join(steps)
    return TrainingSample(
        query=query,
        query_type="cot",
        positive_id=positive,
        negative_ids=_ledger_negatives(traj, qg_position, positive),
        problem_id=traj.problem_id,
    )


_LLMQ_MARKER = "Generated Query:"


def make_llm_query(
    traj: Trajectory,
    qg_position: int,
    backend: GenBackend,
    corpus: Corpus,
    decoding: DecodingParams | None = None,
) -> TrainingSample | None:
    """Concise information-need query written by the backend.

    Returns None (and logs) when the completion carries no
    ``Generated Query:`` marker; nothing is fabricated.
    """
    positive = _positive_for(traj, qg_position)
    doc = corpus.get(positive)
    steps = _reasoning_prefix(traj, qg_position)
    prompt = render_prompt(
        "llm_query",
        {
            "question": traj.question,
            "partial_solution": "\n".join(steps),
            "theorem": doc.text,
        },
    )
    params = decoding or DecodingParams()
    completion = generate(backend, prompt, params)
    query = _extract_after_marker(completion)
    if query is None:
        logger.info(
            "llmq sample skipped for problem %s (no %r marker)",
            traj.problem_id,
            _LLMQ_MARKER,
        )
        return None
    return TrainingSample(
        query=query,
        query_type="llmq",
        positive_id=positive,
        negative_ids=_ledger_negatives(traj, qg_position, positive),
        problem_id=traj.problem_id,
    )


def _extract_after_marker(completion: str) -> str | None:
    idx = completion.rfind(_LLMQ_MARKER)
    if idx < 0:
        return None
    rest = completion[idx + len(_LLMQ_MARKER) :]
    line = rest.splitlines()[0].strip() if rest else ""
    return line or None


def make_question_query(traj: Trajectory, qg_position: int) -> TrainingSample:
    """The input math question, verbatim, as the query."""
    positive = _positive_for(traj, qg_position)
    return TrainingSample(
        query=traj.question,
        query_type="question",
        positive_id=positive,
        negative_ids=_ledger_negatives(traj, qg_position, positive),
        problem_id=traj.problem_id,
    )


def make_lexical_queries(
    theorem,
    backend: GenBackend,
    bm25: Bm25Index,
    candidates: int = 3,
    max_negatives: int = 12,
    problem_id: str = "",
    decoding: DecodingParams | None = None,
) -> list[TrainingSample]:
    """Term-matching queries generated from the theorem text alone.

    Each candidate survives only if BM25 retrieves the theorem within
    its top-20 results; hard negatives are the other top hits.
    """
    prompt = render_prompt("lexical_query", {"theorem": theorem.text})
    params = decoding or DecodingParams()
    completion = generate(backend, prompt, params)
    parsed: list[str] = []
    for line in completion.splitlines():
        stripped = line.strip()
        if stripped.lower().startswith("query:"):
            candidate = stripped.split(":", 1)[1].strip()
            if candidate:
                parsed.append(candidate)
    samples: list[TrainingSample] = []
    for candidate in parsed[:candidates]:
        hits = bm25_search(bm25, candidate, ROUND_TRIP_K)
        hit_ids = [h.doc_id for h in hits]
        if theorem.id not in hit_ids:
            continue
        negatives = [doc_id for doc_id in hit_ids if doc_id != theorem.id][:max_negatives]
        samples.append(
            TrainingSample(
                query=candidate,
                query_type="lexical",
                positive_id=theorem.id,
                negative_ids=negatives,
                problem_id=problem_id,
            )
        )
    return samples


def _pad_negatives(
    sample: TrainingSample,
    target: int,
    corpus: Corpus,
    bm25: Bm25Index,
) -> list[str]:
    """Exactly ``target`` negatives: ledger first, then BM25-mined hits,
    then ascending doc ids as a last resort; never the positive."""
    negatives: list[str] = []
    seen: set[str] = {sample.positive_id}
    for doc_id in sample.negative_ids:
        if doc_id not in seen:
            seen.add(doc_id)
            negatives.append(doc_id)
        if len(negatives) == target:
            return negatives
    for hit in bm25_search(bm25, sample.query, target + len(seen) + 8):
        if hit.doc_id not in seen:
            seen.add(hit.doc_id)
            negatives.append(hit.doc_id)
        if len(negatives) == target:
            return negatives
    for doc_id in sorted(corpus.id_index):
        if doc_id not in seen:
            seen.add(doc_id)
            negatives.append(doc_id)
        if len(negatives) == target:
            return negatives
    raise ValueError(
        f"corpus too small to supply {target} negatives for query {sample.query[:40]!r}"
    )


def assemble_dataset(
    samples: list[TrainingSample],
    corpus: Corpus,
    bm25: Bm25Index,
    out_path: str | Path,
    stats_path: str | Path | None = None,
    negatives_per_sample: int = 12,
) -> dict[str, int]:
    """Validate, deduplicate, pad, and write the training file.

    Deduplication key is (query, positive_id); first occurrence wins.
    Invalid samples are excluded and logged. Returns per-type counts
    (plus an ``all`` row), which are also written as TSV when
    ``stats_path`` is given.
    """
    stats = {qt: 0 for qt in QUERY_TYPES}
    seen_keys: set[tuple[str, str]] = set()
    kept: list[TrainingSample] = []
    for sample in samples:
        if not sample.query.strip():
            logger.warning("excluded sample with empty query (problem %s)", sample.problem_id)
            continue
        if sample.query_type not in QUERY_TYPES:
            logger.warning("excluded sample with unknown type %r", sample.query_type)
            continue
        if sample.positive_id not in corpus:
            logger.warning("excluded sample with unknown positive %r", sample.positive_id)
            continue
        key = (sample.query, sample.positive_id)
        if key in seen_keys:
            continue
        seen_keys.add(key)
        padded = _pad_negatives(sample, negatives_per_sample, corpus, bm25)
        kept.append(replace(sample, negative_ids=padded))
        stats[sample.query_type] += 1

    with open(out_path, "w", encoding="utf-8") as fh:
        for sample in kept:
            fh.write(
                json.dumps(
                    {
                        "query": sample.query,
                        "query_type": sample.query_type,
                        "positive_id": sample.positive_id,
                        "negative_ids": sample.negative_ids,
                        "problem_id": sample.problem_id,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    stats["all"] = len(kept)
    if stats_path is not None:
        write_stats(stats, stats_path)
    return stats


def write_stats(stats: dict[str, int], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("query_type\tcount\n")
        for qt in QUERY_TYPES:
            fh.write(f"{qt}\t{stats.get(qt, 0)}\n")
        fh.write(f"all\t{stats.get('all', 0)}\n")


def load_dataset(path: str | Path) -> list[TrainingSample]:
    """Read a training.jsonl file back into samples."""
    samples: list[TrainingSample] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            samples.append(
                TrainingSample(
                    query=obj["query"],
                    query_type=obj["query_type"],
                    positive_id=obj["positive_id"],
                    negative_ids=list(obj["negative_ids"]),
                    problem_id=obj.get("problem_id", ""),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"{path}:{lineno}: malformed training sample ({exc})") from exc
    return samples
