"""RDF2vec-style entity embeddings: random walks plus skip-gram with negative sampling.

Walks alternate node and predicate tokens. Every entity gets its own random
generator derived from ``(seed, entity)``, so the corpus does not depend on
the order in which entities are processed (or on ``n_jobs``). Training is a
batched numpy implementation with a fixed update order, hence bit-for-bit
reproducible on one platform.

Tokens are the IRI string for IRIs, ``_:label`` for blank nodes and the
N-Triples form for literals.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.decomposition import PCA

from .graph import Graph
from .terms import IRI, BNode, Term

__all__ = [
    "Walk",
    "WalkCorpus",
    "TrainConfig",
    "EmbeddingSpace",
    "token",
    "generate_walks",
    "train",
    "neighbors",
    "project_2d",
    "RDF2VecTransformer",
]


def token(term: Term) -> str:
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, BNode):
        return "_:" + term.label
    return term.n3()


def _stable_hash(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def _entity_rng(seed: int, entity: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _stable_hash(entity)]))


@dataclass(frozen=True)
class Walk:
    entity: str
    seed: int
    depth: int
    tokens: tuple[str, ...]


@dataclass
class WalkCorpus:
    walks: list[Walk]

    def __len__(self) -> int:
        return len(self.walks)

    @property
    def sequences(self) -> list[tuple[str, ...]]:
        return [w.tokens for w in self.walks]

    def vocabulary(self) -> list[str]:
        return sorted({t for w in self.walks for t in w.tokens})


def _adjacency(graph: Graph) -> dict[str, list[tuple[str, str]]]:
    adj: dict[str, list[tuple[str, str]]] = {}
    for t in graph.triples():  # sorted, so each edge list is in a fixed order
        adj.setdefault(token(t.subject), []).append((token(t.predicate), token(t.object)))
    return adj


def _walks_for(entities: Sequence[str], adj, n: int, depth: int, seed: int) -> list[Walk]:
    out = []
    for entity in entities:
        rng = _entity_rng(seed, entity)
        for _ in range(n):
            tokens = [entity]
            node = entity
            for _ in range(depth):
                edges = adj.get(node)
                if not edges:
                    break
                p, node = edges[int(rng.integers(len(edges)))]
                tokens += [p, node]
            out.append(Walk(entity, seed, depth, tuple(tokens)))
    return out


def generate_walks(graph: Graph, walks_per_entity: int = 50, depth: int = 4, seed: int = 0,
                   n_jobs: int = 1, entities: Optional[Iterable[Term]] = None) -> WalkCorpus:
    """``walks_per_entity`` random walks of at most ``depth`` hops from every IRI subject."""
    if walks_per_entity < 1 or depth < 1:
        raise ValueError("walks_per_entity and depth must be at least 1")
    if entities is None:
        starts = sorted({token(s) for s in graph.subject_terms() if isinstance(s, IRI)})
    else:
        starts = sorted({token(e) for e in entities if isinstance(e, IRI)})
    adj = _adjacency(graph)
    if n_jobs == 1 or len(starts) < 2:
        return WalkCorpus(_walks_for(starts, adj, walks_per_entity, depth, seed))
    jobs = n_jobs if n_jobs > 0 else max(1, len(starts))
    chunks = [starts[i::jobs] for i in range(jobs) if starts[i::jobs]]
    parts = Parallel(n_jobs=n_jobs)(delayed(_walks_for)(c, adj, walks_per_entity, depth, seed) for c in chunks)
    by_entity: dict[str, list[Walk]] = {}
    for part in parts:
        for w in part:
            by_entity.setdefault(w.entity, []).append(w)
    return WalkCorpus([w for e in starts for w in by_entity[e]])


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 64
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    min_learning_rate: float = 0.0001
    # Updates within a batch are summed, so large batches overshoot on frequent tokens.
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.negatives < 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError(f"invalid training configuration: {self}")


@dataclass
class EmbeddingSpace:
    entities: list[str]
    vectors: np.ndarray
    config: TrainConfig = field(default_factory=TrainConfig)
    losses: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.entities):
            raise ValueError("vectors must be a matrix with one row per entity")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("embedding contains non-finite values")
        self._index = {e: i for i, e in enumerate(self.entities)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, entity) -> bool:
        return _name(entity) in self._index

    def index(self, entity) -> int:
        try:
            return self._index[_name(entity)]
        except KeyError:
            raise KeyError(f"entity not embedded: {_name(entity)}") from None

    def vector(self, entity) -> np.ndarray:
        return self.vectors[self.index(entity)]

    def cosine(self, a, b) -> float:
        u, v = self.vector(a), self.vector(b)
        denom = np.linalg.norm(u) * np.linalg.norm(v)
        return float(u @ v / denom) if denom else 0.0

    def to_text(self) -> str:
        return "".join(e + "\t" + "\t".join(repr(float(x)) for x in row) + "\n"
                       for e, row in zip(self.entities, self.vectors))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_text(cls, text: str) -> "EmbeddingSpace":
        entities, rows = [], []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            name, *values = line.split("\t")
            if not values:
                raise ValueError(f"line {lineno}: no vector for {name!r}")
            entities.append(name)
            rows.append([float(v) for v in values])
        if len({len(r) for r in rows}) > 1:
            raise ValueError("vectors have differing dimensions")
        return cls(entities, np.array(rows, dtype=np.float64).reshape(len(rows), -1))

    @classmethod
    def load(cls, path) -> "EmbeddingSpace":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _name(entity) -> str:
    return entity if isinstance(entity, str) else token(entity)


def _pairs(sequences: list[list[int]], window: int) -> tuple[np.ndarray, np.ndarray]:
    centers, contexts = [], []
    for seq in sequences:
        n = len(seq)
        for i, c in enumerate(seq):
            for j in range(max(0, i - window), min(n, i + window + 1)):
                if j != i:
                    centers.append(c)
                    contexts.append(seq[j])
    return np.array(centers, dtype=np.int64), np.array(contexts, dtype=np.int64)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def train(corpus: Union[WalkCorpus, Sequence[Sequence[str]]], config: Optional[TrainConfig] = None) -> EmbeddingSpace:
    """Skip-gram with negative sampling over the walk corpus."""
    config = config or TrainConfig()
    sequences = corpus.sequences if isinstance(corpus, WalkCorpus) else [tuple(s) for s in corpus]
    vocab = sorted({t for s in sequences for t in s})
    if not vocab:
        raise ValueError("cannot train on an empty corpus")
    index = {t: i for i, t in enumerate(vocab)}
    encoded = [[index[t] for t in s] for s in sequences]
    centers, contexts = _pairs(encoded, config.window)

    rng = np.random.default_rng(config.seed)
    V, d, K = len(vocab), config.dim, config.negatives
    w_in = (rng.random((V, d)) - 0.5) / d
    w_out = np.zeros((V, d))
    counts = np.bincount(np.concatenate([np.array(s, dtype=np.int64) for s in encoded]), minlength=V)
    noise = counts ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    losses: list[float] = []
    n_pairs = len(centers)
    if n_pairs == 0:
        return EmbeddingSpace(vocab, w_in, config, losses)
    total_batches = config.epochs * math.ceil(n_pairs / config.batch_size)
    step = 0
    for _ in range(config.epochs):
        order = rng.permutation(n_pairs)
        epoch_loss = 0.0
        for start in range(0, n_pairs, config.batch_size):
            lr = config.learning_rate - (config.learning_rate - config.min_learning_rate) * step / total_batches
            step += 1
            batch = order[start:start + config.batch_size]
            c, o = centers[batch], contexts[batch]
            neg = np.searchsorted(noise_cdf, rng.random((len(batch), K)), side="right").clip(max=V - 1)
            v = w_in[c]
            u_pos = w_out[o]
            u_neg = w_out[neg]
            s_pos = _sigmoid(np.einsum("bd,bd->b", v, u_pos))
            s_neg = _sigmoid(np.einsum("bd,bkd->bk", v, u_neg))
            eps = 1e-12
            epoch_loss += float(-np.log(s_pos + eps).sum() - np.log(1.0 - s_neg + eps).sum())
            g_pos = s_pos - 1.0
            grad_v = g_pos[:, None] * u_pos + np.einsum("bk,bkd->bd", s_neg, u_neg)
            np.add.at(w_out, o, -lr * g_pos[:, None] * v)
            np.add.at(w_out, neg.ravel(), (-lr * s_neg[:, :, None] * v[:, None, :]).reshape(-1, d))
            np.add.at(w_in, c, -lr * grad_v)
        losses.append(epoch_loss / n_pairs)
    return EmbeddingSpace(vocab, w_in, config, losses)


def neighbors(space: EmbeddingSpace, entity, k: int = 10, candidates: Optional[Iterable] = None) -> list[tuple[str, float]]:
    """Top-``k`` entities by cosine similarity, excluding ``entity``; ties by name.

    ``candidates`` restricts the ranking to a subset of the space.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    i = space.index(entity)
    pool = range(len(space)) if candidates is None else sorted({space.index(c) for c in candidates})
    norms = np.linalg.norm(space.vectors, axis=1)
    norms[norms == 0] = 1.0
    unit = space.vectors / norms[:, None]
    sims = unit @ unit[i]
    ranked = sorted((j for j in pool if j != i), key=lambda j: (-sims[j], space.entities[j]))
    return [(space.entities[j], float(sims[j])) for j in ranked[:k]]


def project_2d(space: EmbeddingSpace, entities: Optional[Iterable] = None) -> list[tuple[str, float, float]]:
    """Mean-centred projection onto the top two principal components."""
    names = space.entities if entities is None else [_name(e) for e in entities]
    if len(names) < 2:
        raise ValueError("projection needs at least two entities")
    X = np.stack([space.vector(n) for n in names])
    if X.shape[1] < 2:
        raise ValueError("projection needs vectors of dimension at least two")
    coords = PCA(n_components=2, svd_solver="full").fit_transform(X)
    return [(n, float(x), float(y)) for n, (x, y) in zip(names, coords)]


class RDF2VecTransformer(TransformerMixin, BaseEstimator):
    """Estimator wrapper: ``fit`` on a :class:`Graph`, ``transform`` entities to vectors.

    ``transform`` accepts a graph (its walk-start entities, sorted) or an
    iterable of entities given as terms or token strings.
    """

    def __init__(self, walks_per_entity: int = 50, depth: int = 4, dim: int = 64, window: int = 5,
                 negatives: int = 5, epochs: int = 5, learning_rate: float = 0.025, seed: int = 0,
                 n_jobs: int = 1):
        self.walks_per_entity = walks_per_entity
        self.depth = depth
        self.dim = dim
        self.window = window
        self.negatives = negatives
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.n_jobs = n_jobs

    def _train_config(self) -> TrainConfig:
        return TrainConfig(dim=self.dim, window=self.window, negatives=self.negatives, epochs=self.epochs,
                           learning_rate=self.learning_rate, seed=self.seed)

    def fit(self, X: Graph, y=None):
        self.corpus_ = generate_walks(X, self.walks_per_entity, self.depth, self.seed, self.n_jobs)
        self.space_ = train(self.corpus_, self._train_config())
        self.entities_ = sorted({w.entity for w in self.corpus_.walks})
        self.loss_curve_ = list(self.space_.losses)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "space_"):
            raise AttributeError("RDF2VecTransformer is not fitted yet; call fit first")
        names = self.entities_ if isinstance(X, Graph) else [_name(e) for e in X]
        return np.stack([self.space_.vector(n) for n in names]) if names else np.empty((0, self.dim))

