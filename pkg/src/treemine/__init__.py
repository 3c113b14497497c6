"""treemine: retrieval-augmented tree search over math problems, trajectory
mining into retrieval training data, toy contrastive training, and ranking
evaluation."""

__version__ = "0.1.0"

from .corpus import Corpus, MathProblem, TheoremDoc, load_corpus, load_problems, tokenize
from .llm import (
    DecodingParams,
    HttpBackend,
    MockBackend,
    extract_boxed_answer,
    render_prompt,
    verify_answer,
)
from .mcts import ActionKind, MctsConfig, SearchTree, TheoremRetriever, run_search
from .retrieval import (
    Bm25Index,
    DenseIndex,
    RetrievalHit,
    bm25_search,
    build_bm25,
    build_dense,
    cosine,
    dense_search,
)
from .synthesis import TrainingSample, Trajectory, assemble_dataset, extract_trajectories
from .train import RerankHead, ToyEncoder, TrainConfig, train_reranker, train_retriever

__all__ = [
    "__version__",
    "Corpus",
    "MathProblem",
    "TheoremDoc",
    "load_corpus",
    "load_problems",
    "tokenize",
    "DecodingParams",
    "HttpBackend",
    "MockBackend",
    "extract_boxed_answer",
    "render_prompt",
    "verify_answer",
    "ActionKind",
    "MctsConfig",
    "SearchTree",
    "TheoremRetriever",
    "run_search",
    "Bm25Index",
    "DenseIndex",
    "RetrievalHit",
    "bm25_search",
    "build_bm25",
    "build_dense",
    "cosine",
    "dense_search",
    "TrainingSample",
    "Trajectory",
    "assemble_dataset",
    "extract_trajectories",
    "RerankHead",
    "ToyEncoder",
    "TrainConfig",
    "train_reranker",
    "train_retriever",
]
