"""Desk-scale retriever and reranker training.

The encoder is a hashed bag of token unigrams and bigrams pushed through
a trainable linear projection and L2-normalized, so query/document
relevance is plain cosine similarity. The objective is InfoNCE with
temperature scaling,

    L = -log( exp(s(q,p)/t) / (exp(s(q,p)/t) + sum_d exp(s(q,d-)/t)) ),

where the negative set holds the sample's hard negatives plus, for the
retriever only, the positives of the other examples in the batch
(in-batch candidates that share the query's own positive id are masked
out, since an identical document cannot act as a negative). Gradients
are analytic and checked against central finite differences in the test
suite. The optimizer is plain SGD with a linear learning-rate decay.

The reranker is a pointwise linear head over hashed features of the
rendered pair ``query: {q} document: {d}``, trained with the same loss
but without in-batch negatives.

Documents enter training as title+text, matching what the dense index
encodes.

Checkpoint layout (little-endian): magic ``TMCK``, version uint32,
hash_dim uint64, emb_dim uint64, seed int64, projection matrix as
float32, then a uint8 flag and, when set, the reranker head: hash_dim
uint64, weights float32, bias float32.
"""

from __future__ import annotations

import logging
import math
import random
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, tokenize
from .seeds import derive_seed
from .synthesis import TrainingSample

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_HASH_DIM",
    "DEFAULT_EMB_DIM",
    "TrainConfig",
    "TrainGroup",
    "ToyEncoder",
    "RerankHead",
    "features",
    "infonce_loss",
    "batch_loss",
    "infonce_grad",
    "train_retriever",
    "render_pair",
    "rerank_score",
    "reranker_batch_loss",
    "reranker_grad",
    "train_reranker",
    "groups_from_dataset",
    "save_checkpoint",
    "load_checkpoint",
]

DEFAULT_HASH_DIM = 2**16
DEFAULT_EMB_DIM = 256

_CKPT_MAGIC = b"TMCK"
_CKPT_VERSION = 1


@dataclass
class TrainConfig:
    """Contrastive training knobs.

    ``group_size`` counts the positive plus the hard negatives drawn per
    query (12 means 1 positive + 11 negatives). Temperature, learning
    rate, epoch count, and the linear LR schedule follow the standard
    retriever-training configuration; ``batch_size`` is a single-process
    stand-in for the distributed batch settings.
    """

    group_size: int = 12
    temperature: float = 0.01
    learning_rate: float = 1e-4
    epochs: int = 1
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.group_size < 2:
            raise ValueError("group_size must be >= 2")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class TrainGroup:
    """One training example: query text, positive, and hard negatives."""

    query: str
    positive_id: str
    positive: str
    negative_ids: list[str] = field(default_factory=list)
    negatives: list[str] = field(default_factory=list)


def features(text: str, hash_dim: int) -> dict[int, float]:
    """Hashed counts of token unigrams and bigrams."""
    tokens = tokenize(text)
    feats: dict[int, float] = {}
    for tok in tokens:
        bucket = zlib.crc32(("u:" + tok).encode("utf-8")) % hash_dim
        feats[bucket] = feats.get(bucket, 0.0) + 1.0
    for first, second in zip(tokens, tokens[1:]):
        bucket = zlib.crc32(("b:" + first + " " + second).encode("utf-8")) % hash_dim
        feats[bucket] = feats.get(bucket, 0.0) + 1.0
    return feats


class ToyEncoder:
    """Deterministic text encoder: hashed features times a projection.

    Output is always L2-normalized; text with no tokens maps to a fixed
    unit fallback vector.
    """

    def __init__(
        self,
        hash_dim: int = DEFAULT_HASH_DIM,
        emb_dim: int = DEFAULT_EMB_DIM,
        seed: int = 0,
        proj: np.ndarray | None = None,
    ):
        if hash_dim < 1 or emb_dim < 1:
            raise ValueError("hash_dim and emb_dim must be positive")
        self.hash_dim = hash_dim
        self.emb_dim = emb_dim
        self.seed = seed
        if proj is None:
            rng = np.random.default_rng(seed)
            proj = rng.standard_normal((hash_dim, emb_dim)) / math.sqrt(emb_dim)
        else:
            proj = np.asarray(proj, dtype=np.float64)
            if proj.shape != (hash_dim, emb_dim):
                raise ValueError(f"projection shape {proj.shape} != ({hash_dim}, {emb_dim})")
        self.proj = proj

    def copy(self) -> "ToyEncoder":
        return ToyEncoder(self.hash_dim, self.emb_dim, self.seed, proj=self.proj.copy())

    def _fallback(self) -> np.ndarray:
        vec = np.zeros(self.emb_dim)
        vec[0] = 1.0
        return vec

    def raw(self, text: str) -> tuple[dict[int, float] | None, np.ndarray | None]:
        """Pre-normalization state: (features, projected vector).

        Returns (None, None) for feature-less text, which encodes to the
        constant fallback and carries no gradient.
        """
        feats = features(text, self.hash_dim)
        if not feats:
            return None, None
        u = np.zeros(self.emb_dim)
        for bucket, count in feats.items():
            u += count * self.proj[bucket]
        if np.linalg.norm(u) == 0.0:
            return None, None
        return feats, u

    def encode(self, text: str) -> np.ndarray:
        feats, u = self.raw(text)
        if u is None:
            return self._fallback()
        return u / np.linalg.norm(u)


def infonce_loss(q: np.ndarray, pos: np.ndarray, negs: list[np.ndarray], tau: float) -> float:
    """InfoNCE over cosine similarities, computed with max-subtraction."""
    if tau <= 0:
        raise ValueError("temperature must be > 0")
    from .retrieval import cosine

    sims = [cosine(q, pos)] + [cosine(q, n) for n in negs]
    if len(sims) == 1:
        return 0.0
    logits = np.asarray(sims) / tau
    peak = logits.max()
    lse = peak + math.log(np.exp(logits - peak).sum())
    return float(lse - logits[0])


class _TextState:
    """Per-unique-text forward state and accumulated embedding gradient."""

    __slots__ = ("feats", "u", "norm", "e", "grad_e")

    def __init__(self, encoder: ToyEncoder, text: str):
        self.feats, self.u = encoder.raw(text)
        if self.u is None:
            self.norm = 1.0
            self.e = encoder._fallback()
        else:
            self.norm = float(np.linalg.norm(self.u))
            self.e = self.u / self.norm
        self.grad_e = np.zeros(encoder.emb_dim)


def _group_candidates(
    groups: list[TrainGroup], index: int, group_size: int, in_batch_negatives: bool
) -> list[tuple[str, str]]:
    """(doc_id, text) candidates for one group, positive first."""
    group = groups[index]
    cands = [(group.positive_id, group.positive)]
    limit = group_size - 1
    for neg_id, neg_text in zip(group.negative_ids[:limit], group.negatives[:limit]):
        cands.append((neg_id, neg_text))
    if in_batch_negatives:
        for j, other in enumerate(groups):
            if j == index or other.positive_id == group.positive_id:
                continue
            cands.append((other.positive_id, other.positive))
    return cands


def _batch_pass(
    encoder: ToyEncoder,
    groups: list[TrainGroup],
    tau: float,
    group_size: int,
    in_batch_negatives: bool,
    want_grad: bool,
) -> tuple[float, dict[int, np.ndarray]]:
    if not groups:
        return 0.0, {}
    states: dict[str, _TextState] = {}

    def state(text: str) -> _TextState:
        st = states.get(text)
        if st is None:
            st = _TextState(encoder, text)
            states[text] = st
        return st

    total = 0.0
    scale = 1.0 / len(groups)
    for i, group in enumerate(groups):
        q_state = state(group.query)
        cands = _group_candidates(groups, i, group_size, in_batch_negatives)
        cand_states = [state(text) for _, text in cands]
        sims = np.array([float(q_state.e @ st.e) for st in cand_states])
        if len(sims) == 1:
            continue  # no negatives: loss 0, no gradient
        logits = sims / tau
        peak = logits.max()
        exp = np.exp(logits - peak)
        softmax = exp / exp.sum()
        total += float(peak + math.log(exp.sum()) - logits[0])
        if want_grad:
            gamma = softmax.copy()
            gamma[0] -= 1.0
            gamma /= tau
            for g, st in zip(gamma, cand_states):
                q_state.grad_e += scale * g * st.e
                st.grad_e += scale * g * q_state.e

    grad_rows: dict[int, np.ndarray] = {}
    if want_grad:
        for st in states.values():
            if st.feats is None or not st.grad_e.any():
                continue
            g_u = (st.grad_e - float(st.e @ st.grad_e) * st.e) / st.norm
            for bucket, count in st.feats.items():
                row = grad_rows.get(bucket)
                if row is None:
                    row = np.zeros(encoder.emb_dim)
                    grad_rows[bucket] = row
                row += count * g_u
    return total * scale, grad_rows


def batch_loss(
    encoder: ToyEncoder,
    groups: list[TrainGroup],
    tau: float,
    group_size: int = 12,
    in_batch_negatives: bool = True,
) -> float:
    """Mean InfoNCE loss of a batch under the given candidate assembly."""
    loss, _ = _batch_pass(encoder, groups, tau, group_size, in_batch_negatives, want_grad=False)
    return loss


def infonce_grad(
    encoder: ToyEncoder,
    groups: list[TrainGroup],
    tau: float,
    group_size: int = 12,
    in_batch_negatives: bool = True,
) -> tuple[float, dict[int, np.ndarray]]:
    """Mean batch loss and its gradient w.r.t. the projection matrix.

    The gradient is returned sparsely as feature-row -> emb_dim vector;
    rows not present are exactly zero.
    """
    return _batch_pass(encoder, groups, tau, group_size, in_batch_negatives, want_grad=True)


def groups_from_dataset(
    dataset: list[TrainingSample], corpus: Corpus, group_size: int
) -> list[TrainGroup]:
    """Resolve doc ids to title+text; unresolvable ids raise KeyError."""
    groups = []
    for sample in dataset:
        positive = corpus.get(sample.positive_id)
        neg_ids = sample.negative_ids[: group_size - 1]
        groups.append(
            TrainGroup(
                query=sample.query,
                positive_id=sample.positive_id,
                positive=positive.retrieval_text(),
                negative_ids=neg_ids,
                negatives=[corpus.get(nid).retrieval_text() for nid in neg_ids],
            )
        )
    return groups


def _sgd(
    groups: list[TrainGroup],
    config: TrainConfig,
    step_fn,
    label: str,
) -> None:
    """Shared SGD driver: seeded shuffling and linear LR decay to zero."""
    batches_per_epoch = max(1, math.ceil(len(groups) / config.batch_size))
    total_steps = max(1, config.epochs * batches_per_epoch)
    step = 0
    for epoch in range(config.epochs):
        order = list(range(len(groups)))
        random.Random(derive_seed(config.seed, f"shuffle:{label}:{epoch}")).shuffle(order)
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [groups[i] for i in order[start : start + config.batch_size]]
            lr = config.learning_rate * (1.0 - step / total_steps)
            loss = step_fn(batch, lr)
            epoch_loss += loss * len(batch)
            logger.debug("%s epoch %d step %d loss %.6f lr %.6g", label, epoch, step, loss, lr)
            step += 1
        logger.info("%s epoch %d mean loss %.6f", label, epoch, epoch_loss / max(1, len(order)))


def train_retriever(
    dataset: list[TrainingSample],
    corpus: Corpus,
    config: TrainConfig,
    encoder: ToyEncoder | None = None,
) -> ToyEncoder:
    """SGD on InfoNCE with hard plus in-batch negatives.

    The input encoder is left untouched; a trained copy is returned.
    With a zero learning rate the projection comes back bit-identical.
    """
    base = encoder if encoder is not None else ToyEncoder(seed=config.seed)
    trained = base.copy()
    groups = groups_from_dataset(dataset, corpus, config.group_size)

    def step_fn(batch: list[TrainGroup], lr: float) -> float:
        loss, grad_rows = infonce_grad(
            trained, batch, config.temperature, config.group_size, in_batch_negatives=True
        )
        if lr > 0.0:
            for bucket, row in grad_rows.items():
                trained.proj[bucket] -= lr * row
        return loss

    _sgd(groups, config, step_fn, "retriever")
    return trained


@dataclass
class RerankHead:
    """Pointwise linear scoring head over hashed joint features."""

    weights: np.ndarray  # (hash_dim,)
    bias: float = 0.0

    @property
    def hash_dim(self) -> int:
        return int(self.weights.shape[0])

    @classmethod
    def zeros(cls, hash_dim: int = DEFAULT_HASH_DIM) -> "RerankHead":
        return cls(weights=np.zeros(hash_dim), bias=0.0)

    def copy(self) -> "RerankHead":
        return RerankHead(weights=self.weights.copy(), bias=self.bias)


def render_pair(query: str, doc: str) -> str:
    return f"query: {query} document: {doc}"


def rerank_score(head: RerankHead, query: str, doc: str) -> float:
    """Joint hashed features of the rendered pair dotted with the head."""
    score = head.bias
    for bucket, count in features(render_pair(query, doc), head.hash_dim).items():
        score += head.weights[bucket] * count
    return float(score)


def _rerank_pass(
    head: RerankHead,
    groups: list[TrainGroup],
    tau: float,
    group_size: int,
    want_grad: bool,
) -> tuple[float, dict[int, float], float]:
    if not groups:
        return 0.0, {}, 0.0
    total = 0.0
    scale = 1.0 / len(groups)
    grad_w: dict[int, float] = {}
    grad_b = 0.0
    for group in groups:
        limit = group_size - 1
        docs = [group.positive] + list(group.negatives[:limit])
        if len(docs) == 1:
            continue
        featsets = [features(render_pair(group.query, d), head.hash_dim) for d in docs]
        scores = np.array(
            [
                head.bias + sum(head.weights[b] * c for b, c in fs.items())
                for fs in featsets
            ]
        )
        logits = scores / tau
        peak = logits.max()
        exp = np.exp(logits - peak)
        softmax = exp / exp.sum()
        total += float(peak + math.log(exp.sum()) - logits[0])
        if want_grad:
            gamma = softmax.copy()
            gamma[0] -= 1.0
            gamma /= tau
            for g, fs in zip(gamma, featsets):
                grad_b += scale * g
                for bucket, count in fs.items():
                    grad_w[bucket] = grad_w.get(bucket, 0.0) + scale * g * count
    return total * scale, grad_w, grad_b


def reranker_batch_loss(
    head: RerankHead, groups: list[TrainGroup], tau: float, group_size: int = 12
) -> float:
    loss, _, _ = _rerank_pass(head, groups, tau, group_size, want_grad=False)
    return loss


def reranker_grad(
    head: RerankHead, groups: list[TrainGroup], tau: float, group_size: int = 12
) -> tuple[float, dict[int, float], float]:
    """Mean loss plus gradients w.r.t. head weights (sparse) and bias."""
    return _rerank_pass(head, groups, tau, group_size, want_grad=True)


def train_reranker(
    dataset: list[TrainingSample],
    corpus: Corpus,
    config: TrainConfig,
    hash_dim: int = DEFAULT_HASH_DIM,
) -> RerankHead:
    """Same loss as the retriever but without in-batch negatives."""
    head = RerankHead.zeros(hash_dim)
    groups = groups_from_dataset(dataset, corpus, config.group_size)

    def step_fn(batch: list[TrainGroup], lr: float) -> float:
        loss, grad_w, grad_b = reranker_grad(head, batch, config.temperature, config.group_size)
        if lr > 0.0:
            for bucket, g in grad_w.items():
                head.weights[bucket] -= lr * g
            head.bias -= lr * grad_b
        return loss

    _sgd(groups, config, step_fn, "reranker")
    return head


def save_checkpoint(
    path: str | Path, encoder: ToyEncoder, head: RerankHead | None = None
) -> None:
    """Write encoder (and optional reranker head) with float32 payloads."""
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<I", _CKPT_VERSION))
        fh.write(struct.pack("<QQq", encoder.hash_dim, encoder.emb_dim, encoder.seed))
        fh.write(encoder.proj.astype("<f4").tobytes())
        if head is None:
            fh.write(struct.pack("<B", 0))
        else:
            fh.write(struct.pack("<B", 1))
            fh.write(struct.pack("<Q", head.hash_dim))
            fh.write(head.weights.astype("<f4").tobytes())
            fh.write(struct.pack("<f", head.bias))


def load_checkpoint(path: str | Path) -> tuple[ToyEncoder, RerankHead | None]:
    data = Path(path).read_bytes()
    if data[:4] != _CKPT_MAGIC:
        raise ValueError(f"{path}: not a model checkpoint")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != _CKPT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    hash_dim, emb_dim, seed = struct.unpack_from("<QQq", data, 8)
    offset = 8 + 24
    count = hash_dim * emb_dim
    proj = (
        np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        .astype(np.float64)
        .reshape(hash_dim, emb_dim)
    )
    offset += count * 4
    encoder = ToyEncoder(hash_dim=hash_dim, emb_dim=emb_dim, seed=seed, proj=proj)
    (has_head,) = struct.unpack_from("<B", data, offset)
    offset += 1
    head: RerankHead | None = None
    if has_head:
        (head_dim,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        weights = np.frombuffer(data, dtype="<f4", count=head_dim, offset=offset).astype(
            np.float64
        )
        offset += head_dim * 4
        (bias,) = struct.unpack_from("<f", data, offset)
        head = RerankHead(weights=weights, bias=float(bias))
    return encoder, head
