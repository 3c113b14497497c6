"""Command-line pipeline: generate, synthesize, train, index, search,
eval, and inspect-tree subcommands.

Every subcommand is reproducible byte-for-byte given the same config,
seed, and mock script. Per-problem failures during generation are
logged and skipped; the command still exits 0 and reports the skip
count.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import evaluation, mcts, retrieval, synthesis, train
from .config import PipelineConfig, default_config, load_config
from .corpus import Corpus, load_corpus, load_problems
from .llm import BackendError, DecodingParams, GenBackend, HttpBackend, MockBackend
from .seeds import derive_seed

logger = logging.getLogger(__name__)


def _build_backend(cfg: PipelineConfig) -> GenBackend | None:
    kind = cfg.backend.kind
    if kind == "none":
        return None
    if kind == "mock":
        if not cfg.backend.mock_script:
            raise ValueError("backend kind is 'mock' but no mock_script is configured")
        return MockBackend.from_file(cfg.backend.mock_script)
    if kind == "http":
        if not cfg.backend.endpoint:
            raise ValueError("backend kind is 'http' but no endpoint is configured")
        token = os.environ.get(cfg.backend.auth_env) or None
        return HttpBackend(cfg.backend.endpoint, cfg.backend.model, auth_token=token)
    raise ValueError(f"unknown backend kind {kind!r}")


def _build_retriever(cfg: PipelineConfig, corpus: Corpus) -> mcts.TheoremRetriever:
    kind = cfg.retriever.kind
    if kind == "bm25":
        index = retrieval.build_bm25(corpus, k1=cfg.retriever.k1, b=cfg.retriever.b)
        return mcts.TheoremRetriever(
            corpus=corpus,
            search_fn=lambda q, k: retrieval.bm25_search(index, q, k),
            retriever_id="bm25",
        )
    if kind == "dense":
        if not cfg.retriever.dense_index or not cfg.retriever.checkpoint:
            raise ValueError("dense retriever needs dense_index and checkpoint paths")
        index = retrieval.load_dense(cfg.retriever.dense_index)
        encoder, _ = train.load_checkpoint(cfg.retriever.checkpoint)
        return mcts.TheoremRetriever(
            corpus=corpus,
            search_fn=lambda q, k: retrieval.dense_search(index, encoder.encode(q), k),
            retriever_id="dense",
        )
    raise ValueError(f"unknown retriever kind {kind!r}")


def _load_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if getattr(args, "corpus", None):
        cfg.corpus_path = args.corpus
    if getattr(args, "problems", None):
        cfg.problems_path = args.problems
    if getattr(args, "output_dir", None):
        cfg.output_dir = args.output_dir
    if getattr(args, "mock_script", None):
        cfg.backend.kind = "mock"
        cfg.backend.mock_script = args.mock_script
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "workers", None) is not None:
        cfg.workers = args.workers
    return cfg


def _require_file(path: str, what: str) -> Path:
    if not path:
        raise ValueError(f"no {what} path configured")
    p = Path(path)
    if not p.is_file():
        raise ValueError(f"{what} file does not exist: {p}")
    return p


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    corpus_path = _require_file(cfg.corpus_path, "corpus")
    problems_path = _require_file(cfg.problems_path, "problems")
    if cfg.backend.kind == "mock":
        _require_file(cfg.backend.mock_script, "mock script")
    if cfg.backend.kind == "none":
        raise ValueError("generate needs a backend (mock or http)")

    corpus = load_corpus(corpus_path)
    problems = load_problems(problems_path)
    retriever = _build_retriever(cfg, corpus)
    out_dir = Path(cfg.output_dir) / "trees"
    out_dir.mkdir(parents=True, exist_ok=True)

    shared_backend = _build_backend(cfg) if cfg.backend.kind == "http" else None

    def run_one(problem):
        # each problem gets its own mock (script cursors are stateful)
        backend = shared_backend or _build_backend(cfg)
        run_cfg = dataclasses.replace(
            cfg.mcts, seed=derive_seed(cfg.seed, f"mcts:{problem.id}")
        )
        tree = mcts.run_search(problem, backend, retriever, run_cfg)
        return tree, run_cfg

    results: dict[str, tuple] = {}
    skipped: list[str] = []
    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        futures = {pool.submit(run_one, p): p for p in problems}
        for future, problem in futures.items():
            try:
                results[problem.id] = future.result()
            except Exception as exc:
                logger.error("problem %s failed: %s", problem.id, exc)
                skipped.append(problem.id)

    print(f"{'problem':<14} {'rollouts':>8} {'solved':>6} {'rt_paths':>8}")
    solved_count = 0
    for problem in problems:
        if problem.id not in results:
            print(f"{problem.id:<14} {'-':>8} {'skip':>6} {'-':>8}")
            continue
        tree, run_cfg = results[problem.id]
        mcts.dump_tree(tree, out_dir / f"{problem.id}.json", config=run_cfg)
        trajectories = synthesis.extract_trajectories(tree)
        solved = any(t.reward == 1.0 for t in tree.terminals())
        solved_count += int(solved)
        print(
            f"{problem.id:<14} {tree.completed_rollouts:>8} "
            f"{'yes' if solved else 'no':>6} {len(trajectories):>8}"
        )
    print(
        f"total problems={len(problems)} solved={solved_count} "
        f"skipped={len(skipped)} trees_dir={out_dir}"
    )
    return 0


def cmd_synthesize(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    corpus = load_corpus(_require_file(cfg.corpus_path, "corpus"))
    tree_dir = Path(args.trees or (Path(cfg.output_dir) / "trees"))
    if not tree_dir.is_dir():
        raise ValueError(f"tree directory does not exist: {tree_dir}")
    tree_files = sorted(tree_dir.glob("*.json"))
    if not tree_files:
        raise ValueError(f"no tree dumps found in {tree_dir}")

    types = cfg.synthesis.types
    if args.types:
        types = tuple(t.strip() for t in args.types.split(",") if t.strip())
        for t in types:
            if t not in synthesis.QUERY_TYPES:
                raise ValueError(f"unknown query type {t!r}")

    backend = _build_backend(cfg)
    bm25 = retrieval.build_bm25(corpus, k1=cfg.retriever.k1, b=cfg.retriever.b)

    samples: list[synthesis.TrainingSample] = []
    llmq_skipped = 0
    lexical_sources: list[tuple[str, str]] = []  # (theorem id, problem id)
    seen_theorems: set[str] = set()

    for tree_file in tree_files:
        tree = mcts.load_tree(tree_file)
        for traj in synthesis.extract_trajectories(tree):
            for pos in traj.qg_positions:
                if "cot" in types:
                    samples.append(synthesis.make_cot_query(traj, pos))
                if "question" in types:
                    samples.append(synthesis.make_question_query(traj, pos))
                if "llmq" in types and backend is not None:
                    params = DecodingParams(
                        seed=derive_seed(cfg.seed, f"llmq:{traj.problem_id}:{pos}")
                    )
                    sample = synthesis.make_llm_query(
                        traj, pos, backend, corpus, decoding=params
                    )
                    if sample is None:
                        llmq_skipped += 1
                    else:
                        samples.append(sample)
                positive = traj.rt_theorems[pos]
                if positive not in seen_theorems:
                    seen_theorems.add(positive)
                    lexical_sources.append((positive, traj.problem_id))

    if "lexical" in types and backend is not None:
        for theorem_id, problem_id in lexical_sources:
            params = DecodingParams(seed=derive_seed(cfg.seed, f"lexical:{theorem_id}"))
            samples.extend(
                synthesis.make_lexical_queries(
                    corpus.get(theorem_id),
                    backend,
                    bm25,
                    candidates=cfg.synthesis.lexical_candidates,
                    max_negatives=cfg.synthesis.negatives,
                    problem_id=problem_id,
                    decoding=params,
                )
            )

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "training.jsonl"
    stats_path = out_dir / "stats.tsv"
    stats = synthesis.assemble_dataset(
        samples,
        corpus,
        bm25,
        out_path,
        stats_path,
        negatives_per_sample=cfg.synthesis.negatives,
    )
    print(f"{'query_type':<12} {'count':>6}")
    for qt in synthesis.QUERY_TYPES:
        print(f"{qt:<12} {stats.get(qt, 0):>6}")
    print(f"{'all':<12} {stats.get('all', 0):>6}")
    if llmq_skipped:
        print(f"llmq samples skipped (no marker): {llmq_skipped}")
    print(f"wrote {out_path} and {stats_path}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    corpus = load_corpus(_require_file(cfg.corpus_path, "corpus"))
    data_path = Path(args.data or (Path(cfg.output_dir) / "training.jsonl"))
    dataset = synthesis.load_dataset(_require_file(str(data_path), "training data"))

    train_cfg = dataclasses.replace(cfg.train, seed=derive_seed(cfg.seed, "train"))
    if args.lr is not None:
        train_cfg = dataclasses.replace(train_cfg, learning_rate=args.lr)
    if args.epochs is not None:
        train_cfg = dataclasses.replace(train_cfg, epochs=args.epochs)
    if train_cfg.learning_rate == 0.0:
        print("warning: learning rate is 0; the checkpoint will equal the initial model")

    encoder = train.ToyEncoder(
        hash_dim=cfg.hash_dim, emb_dim=cfg.emb_dim, seed=derive_seed(cfg.seed, "encoder")
    )
    head = None
    which = args.model
    if which in ("retriever", "both"):
        encoder = train.train_retriever(dataset, corpus, train_cfg, encoder=encoder)
    if which in ("reranker", "both"):
        head = train.train_reranker(dataset, corpus, train_cfg, hash_dim=cfg.hash_dim)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ckpt_path = Path(args.checkpoint or (out_dir / "model.ckpt"))
    train.save_checkpoint(ckpt_path, encoder, head)
    print(f"trained on {len(dataset)} samples; checkpoint written to {ckpt_path}")
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    corpus = load_corpus(_require_file(cfg.corpus_path, "corpus"))
    ckpt_path = _require_file(
        args.checkpoint or str(Path(cfg.output_dir) / "model.ckpt"), "checkpoint"
    )
    encoder, _ = train.load_checkpoint(ckpt_path)
    index = retrieval.build_dense(corpus, encoder.encode)
    out_path = Path(args.index or (Path(cfg.output_dir) / "dense.idx"))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    retrieval.save_dense(index, out_path)
    print(f"indexed {index.doc_count} documents (dim {index.dim}) into {out_path}")
    return 0


def _search_hits(
    cfg: PipelineConfig,
    args: argparse.Namespace,
    corpus: Corpus,
    query: str,
    k: int,
) -> list[retrieval.RetrievalHit]:
    if args.index:
        index = retrieval.load_dense(args.index)
        encoder, _ = train.load_checkpoint(
            _require_file(
                args.checkpoint or str(Path(cfg.output_dir) / "model.ckpt"), "checkpoint"
            )
        )
        return retrieval.dense_search(index, encoder.encode(query), k)
    bm25 = _get_bm25(cfg, corpus)
    return retrieval.bm25_search(bm25, query, k)


_bm25_cache: dict[int, retrieval.Bm25Index] = {}


def _get_bm25(cfg: PipelineConfig, corpus: Corpus) -> retrieval.Bm25Index:
    key = id(corpus)
    if key not in _bm25_cache:
        _bm25_cache[key] = retrieval.build_bm25(corpus, k1=cfg.retriever.k1, b=cfg.retriever.b)
    return _bm25_cache[key]


def _maybe_rerank(
    args: argparse.Namespace,
    cfg: PipelineConfig,
    corpus: Corpus,
    query: str,
    hits: list[retrieval.RetrievalHit],
) -> list[retrieval.RetrievalHit]:
    if not args.rerank:
        return hits
    _, head = train.load_checkpoint(
        _require_file(
            args.checkpoint or str(Path(cfg.output_dir) / "model.ckpt"), "checkpoint"
        )
    )
    if head is None:
        raise ValueError("checkpoint carries no reranker head")
    depth = args.rerank_depth
    pool = hits[:depth]
    scored = [
        (train.rerank_score(head, query, corpus.get(h.doc_id).retrieval_text()), h.doc_id)
        for h in pool
    ]
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [
        retrieval.RetrievalHit(doc_id=doc_id, score=score, rank=rank)
        for rank, (score, doc_id) in enumerate(scored, start=1)
    ]


def cmd_search(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    corpus = load_corpus(_require_file(cfg.corpus_path, "corpus"))
    k = args.k
    if args.query:
        hits = _search_hits(cfg, args, corpus, args.query, max(k, args.rerank_depth))
        hits = _maybe_rerank(args, cfg, corpus, args.query, hits)[:k]
        for hit in hits:
            doc = corpus.get(hit.doc_id)
            print(f"{hit.rank:>3} {hit.doc_id:<12} {hit.score:>12.6f} {doc.title}")
        return 0
    if not args.queries:
        raise ValueError("search needs either --query or --queries")
    queries = evaluation.load_queries(_require_file(args.queries, "queries"))
    run: evaluation.RunResult = {}
    for qid, text in queries.items():
        hits = _search_hits(cfg, args, corpus, text, max(k, args.rerank_depth))
        hits = _maybe_rerank(args, cfg, corpus, text, hits)[:k]
        run[qid] = [(h.doc_id, h.score) for h in hits]
    out = Path(args.run or (Path(cfg.output_dir) / "run.trec"))
    out.parent.mkdir(parents=True, exist_ok=True)
    evaluation.write_trec_run(run, out, tag=args.tag)
    print(f"wrote run for {len(run)} queries to {out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    run = evaluation.read_trec_run(_require_file(args.run, "run"))
    qrels = evaluation.load_qrels(_require_file(args.qrels, "qrels"))
    k = args.k
    ndcg = evaluation.ndcg_at_k(run, qrels, k)
    precision, recall = evaluation.precision_recall_at_k(run, qrels, k)
    mrr = evaluation.mrr_at_k(run, qrels, k)
    lines = [
        f"{'metric':<10} {'value':>8}",
        f"{f'nDCG@{k}':<10} {ndcg.mean:>8.4f}",
        f"{f'P@{k}':<10} {precision.mean:>8.4f}",
        f"{f'R@{k}':<10} {recall.mean:>8.4f}",
        f"{f'MRR@{k}':<10} {mrr.mean:>8.4f}",
    ]
    table = "\n".join(lines)
    print(table)
    if args.per_query:
        print(f"\n{'query':<16} {'nDCG':>8} {'P':>8} {'R':>8} {'RR':>8}")
        for qid in run:
            print(
                f"{qid:<16} {ndcg.per_query[qid]:>8.4f} {precision.per_query[qid]:>8.4f} "
                f"{recall.per_query[qid]:>8.4f} {mrr.per_query[qid]:>8.4f}"
            )
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(table + "\n", encoding="utf-8")
    return 0


def cmd_inspect_tree(args: argparse.Namespace) -> int:
    tree = mcts.load_tree(_require_file(args.tree, "tree dump"))
    print(f"problem {tree.problem.id}: {tree.problem.question}")
    print(f"gold answer: {tree.problem.gold_answer}")
    print(f"completed rollouts: {tree.completed_rollouts}")

    def show(node_id: int, indent: int) -> None:
        node = tree.node(node_id)
        action = node.action.value if node.action else "ROOT"
        preview = node.content.replace("\n", " ")
        if len(preview) > 72:
            preview = preview[:69] + "..."
        flags = []
        if node.terminal:
            flags.append("terminal")
        if node.reward is not None:
            flags.append(f"reward={node.reward:g}")
        if node.theorem_id:
            flags.append(f"theorem={node.theorem_id}")
        suffix = f" [{', '.join(flags)}]" if flags else ""
        print(
            f"{'  ' * indent}#{node.node_id} {action} N={node.visit_count} "
            f"Q={node.q_value:g}{suffix} | {preview}"
        )
        for child in node.children:
            show(child, indent + 1)

    show(tree.root, 0)
    if tree.ledger:
        print(f"hard-negative ledger: {len(tree.ledger)} entries")
        for entry in tree.ledger:
            print(f"  qg_node={entry.qg_node_id} theorem={entry.theorem_id} {entry.reason}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treemine",
        description=(
            "Solve math problems with retrieval-augmented tree search, mine the "
            "trees into retrieval training data, train toy retrievers, and "
            "evaluate rankings."
        ),
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="INI config file")
        p.add_argument("--corpus", help="corpus.jsonl path (overrides config)")
        p.add_argument("--output-dir", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="root seed (overrides config)")

    p = sub.add_parser("generate", help="run tree search over a problem set")
    common(p)
    p.add_argument("--problems", help="problems.jsonl path (overrides config)")
    p.add_argument("--mock-script", help="mock backend script (JSON-Lines)")
    p.add_argument("--workers", type=int, help="worker pool width")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("synthesize", help="mine tree dumps into training data")
    common(p)
    p.add_argument("--trees", help="directory of tree dumps")
    p.add_argument("--mock-script", help="mock backend script (JSON-Lines)")
    p.add_argument("--types", help="comma-separated query types to emit")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("train", help="train the toy retriever and reranker")
    common(p)
    p.add_argument("--data", help="training.jsonl path")
    p.add_argument("--checkpoint", help="output checkpoint path")
    p.add_argument("--model", choices=("retriever", "reranker", "both"), default="both")
    p.add_argument("--lr", type=float, help="override learning rate")
    p.add_argument("--epochs", type=int, help="override epoch count")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("index", help="build a dense index from a checkpoint")
    common(p)
    p.add_argument("--checkpoint", help="model checkpoint path")
    p.add_argument("--index", help="output index path")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="query an index (optionally reranked)")
    common(p)
    p.add_argument("--query", help="single query text")
    p.add_argument("--queries", help="JSON-Lines queries file (batch mode)")
    p.add_argument("--index", help="dense index path (default: BM25)")
    p.add_argument("--checkpoint", help="checkpoint for dense queries / reranking")
    p.add_argument("--rerank", action="store_true", help="rerank with the trained head")
    p.add_argument("--rerank-depth", type=int, default=20, help="candidates to rerank")
    p.add_argument("--k", type=int, default=10, help="results per query")
    p.add_argument("--run", help="output TREC run path (batch mode)")
    p.add_argument("--tag", default="treemine", help="run tag")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="score a run against qrels")
    p.add_argument("--run", required=True, help="TREC run file")
    p.add_argument("--qrels", required=True, help="qrels file")
    p.add_argument("--k", type=int, default=10, help="metric cutoff")
    p.add_argument("--per-query", action="store_true", help="print per-query rows")
    p.add_argument("--output", help="also write the table to this file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect-tree", help="pretty-print a tree dump")
    p.add_argument("--tree", required=True, help="tree dump JSON path")
    p.set_defaults(func=cmd_inspect_tree)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError, BackendError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
