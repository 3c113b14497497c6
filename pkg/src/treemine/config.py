"""Pipeline configuration: one INI file with sections, overridable by flags.

Sections and keys (all optional; defaults shown in ``default_config``):

    [paths]     corpus, problems, output_dir
    [mcts]      rollouts, max_depth, exploration_c, rt_top_k,
                ost_children, qg_children
    [decoding]  temperature, top_k, top_p, max_tokens
    [backend]   kind (mock|http|none), mock_script, endpoint, model, auth_env
    [retriever] kind (bm25|dense), k1, b, dense_index, checkpoint
    [synthesis] negatives, lexical_candidates, types (comma-separated)
    [train]     group_size, temperature, learning_rate, epochs, batch_size,
                hash_dim, emb_dim
    [run]       seed, workers

The [run] seed is the root seed; every stochastic component derives its
own seed from it, so a single value replays the whole pipeline.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .llm import DecodingParams
from .mcts import MctsConfig
from .synthesis import QUERY_TYPES
from .train import DEFAULT_EMB_DIM, DEFAULT_HASH_DIM, TrainConfig

__all__ = ["BackendConfig", "RetrieverConfig", "SynthesisSettings", "PipelineConfig", "load_config"]


@dataclass
class BackendConfig:
    kind: str = "mock"  # mock | http | none
    mock_script: str = ""
    endpoint: str = ""
    model: str = ""
    auth_env: str = "TREEMINE_API_TOKEN"


@dataclass
class RetrieverConfig:
    kind: str = "bm25"  # bm25 | dense
    k1: float = 1.2
    b: float = 0.75
    dense_index: str = ""
    checkpoint: str = ""


@dataclass
class SynthesisSettings:
    negatives: int = 12
    lexical_candidates: int = 3
    types: tuple[str, ...] = QUERY_TYPES


@dataclass
class PipelineConfig:
    corpus_path: str = ""
    problems_path: str = ""
    output_dir: str = "out"
    mcts: MctsConfig = field(default_factory=MctsConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)
    retriever: RetrieverConfig = field(default_factory=RetrieverConfig)
    synthesis: SynthesisSettings = field(default_factory=SynthesisSettings)
    train: TrainConfig = field(default_factory=TrainConfig)
    hash_dim: int = DEFAULT_HASH_DIM
    emb_dim: int = DEFAULT_EMB_DIM
    seed: int = 0
    workers: int = 1


def default_config() -> PipelineConfig:
    return PipelineConfig()


def load_config(path: str | Path) -> PipelineConfig:
    """Parse an INI config file into a PipelineConfig."""
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")

    cfg = PipelineConfig()
    if parser.has_section("paths"):
        sec = parser["paths"]
        cfg.corpus_path = sec.get("corpus", cfg.corpus_path)
        cfg.problems_path = sec.get("problems", cfg.problems_path)
        cfg.output_dir = sec.get("output_dir", cfg.output_dir)
    decoding = DecodingParams()
    if parser.has_section("decoding"):
        sec = parser["decoding"]
        decoding = DecodingParams(
            temperature=sec.getfloat("temperature", decoding.temperature),
            top_k=sec.getint("top_k", decoding.top_k),
            top_p=sec.getfloat("top_p", decoding.top_p),
            max_tokens=sec.getint("max_tokens", decoding.max_tokens),
        )
    mcts = MctsConfig(decoding=decoding)
    if parser.has_section("mcts"):
        sec = parser["mcts"]
        mcts = MctsConfig(
            rollouts=sec.getint("rollouts", mcts.rollouts),
            max_depth=sec.getint("max_depth", mcts.max_depth),
            exploration_c=sec.getfloat("exploration_c", mcts.exploration_c),
            rt_top_k=sec.getint("rt_top_k", mcts.rt_top_k),
            ost_children=sec.getint("ost_children", mcts.ost_children),
            qg_children=sec.getint("qg_children", mcts.qg_children),
            decoding=decoding,
        )
    cfg.mcts = mcts
    if parser.has_section("backend"):
        sec = parser["backend"]
        cfg.backend = BackendConfig(
            kind=sec.get("kind", cfg.backend.kind),
            mock_script=sec.get("mock_script", cfg.backend.mock_script),
            endpoint=sec.get("endpoint", cfg.backend.endpoint),
            model=sec.get("model", cfg.backend.model),
            auth_env=sec.get("auth_env", cfg.backend.auth_env),
        )
    if parser.has_section("retriever"):
        sec = parser["retriever"]
        cfg.retriever = RetrieverConfig(
            kind=sec.get("kind", cfg.retriever.kind),
            k1=sec.getfloat("k1", cfg.retriever.k1),
            b=sec.getfloat("b", cfg.retriever.b),
            dense_index=sec.get("dense_index", cfg.retriever.dense_index),
            checkpoint=sec.get("checkpoint", cfg.retriever.checkpoint),
        )
    if parser.has_section("synthesis"):
        sec = parser["synthesis"]
        types_raw = sec.get("types", ",".join(QUERY_TYPES))
        types = tuple(t.strip() for t in types_raw.split(",") if t.strip())
        for t in types:
            if t not in QUERY_TYPES:
                raise ValueError(f"unknown query type in config: {t!r}")
        cfg.synthesis = SynthesisSettings(
            negatives=sec.getint("negatives", cfg.synthesis.negatives),
            lexical_candidates=sec.getint(
                "lexical_candidates", cfg.synthesis.lexical_candidates
            ),
            types=types,
        )
    if parser.has_section("train"):
        sec = parser["train"]
        cfg.train = TrainConfig(
            group_size=sec.getint("group_size", cfg.train.group_size),
            temperature=sec.getfloat("temperature", cfg.train.temperature),
            learning_rate=sec.getfloat("learning_rate", cfg.train.learning_rate),
            epochs=sec.getint("epochs", cfg.train.epochs),
            batch_size=sec.getint("batch_size", cfg.train.batch_size),
        )
        cfg.hash_dim = sec.getint("hash_dim", cfg.hash_dim)
        cfg.emb_dim = sec.getint("emb_dim", cfg.emb_dim)
    if parser.has_section("run"):
        sec = parser["run"]
        cfg.seed = sec.getint("seed", cfg.seed)
        cfg.workers = sec.getint("workers", cfg.workers)
    return cfg
