"""User-item graph embeddings: random walks -> PPMI -> truncated eigendecomposition."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_finite_vector, check_positive_int, check_symmetric

__all__ = [
    "DEFAULT_RANK",
    "Node",
    "InteractionGraph",
    "WalkCorpus",
    "EmbeddingTable",
    "build_interaction_graph",
    "sample_walks",
    "cooccurrence_ppmi",
    "factorize_ppmi",
    "item_feature",
    "concat_features",
    "GraphEmbedder",
]

DEFAULT_RANK = 64


class Node(NamedTuple):
    kind: str  # "user" or "item"
    id: str

    def __str__(self):
        return f"{self.kind}:{self.id}"


@dataclass
class InteractionGraph:
    """Weighted undirected bipartite graph, nodes kept in sorted order."""

    nodes: list = field(default_factory=list)
    adjacency: dict = field(default_factory=dict)

    @property
    def index(self):
        return {node: i for i, node in enumerate(self.nodes)}

    def neighbors(self, node):
        return self.adjacency.get(node, {})

    def edges(self):
        for a in self.nodes:
            for b, w in self.adjacency.get(a, {}).items():
                if a < b:
                    yield a, b, w

    def add_edge(self, a: Node, b: Node, weight: float):
        if {a.kind, b.kind} != {"user", "item"}:
            raise ValueError(f"edge {a}-{b} is not user-item")
        if not weight > 0:
            raise ValueError("edge weights must be positive")
        for u, v in ((a, b), (b, a)):
            nbrs = self.adjacency.setdefault(u, {})
            nbrs[v] = nbrs.get(v, 0.0) + weight


@dataclass(frozen=True)
class WalkCorpus:
    walks: list
    walk_length: int
    walks_per_node: int
    seed: int


@dataclass
class EmbeddingTable:
    node_to_vector: dict
    rank: int
    eigenvalues: Optional[np.ndarray] = None  # set by factorize_ppmi, not serialized

    def __post_init__(self):
        for node, vec in self.node_to_vector.items():
            if len(vec) != self.rank or not np.all(np.isfinite(vec)):
                raise ValueError(f"bad embedding for {node}")

    def dump(self, fh):
        fh.write(f"gemb v1 {len(self.node_to_vector)} {self.rank}\n")
        for node in sorted(self.node_to_vector):
            values = " ".join(f"{v:.9g}" for v in self.node_to_vector[node])
            fh.write(f"{node}\t{values}\n")

    @classmethod
    def load(cls, fh):
        header = fh.readline().split()
        if len(header) != 4 or header[:2] != ["gemb", "v1"]:
            raise ValueError("not a gemb v1 file")
        n, rank = int(header[2]), int(header[3])
        table = {}
        for line in fh:
            tag, values = line.rstrip("\n").split("\t")
            kind, _, node_id = tag.partition(":")
            table[Node(kind, node_id)] = np.array(values.split(), dtype=float) if rank else np.zeros(0)
        if len(table) != n:
            raise ValueError(f"expected {n} nodes, read {len(table)}")
        return cls(table, rank)


def build_interaction_graph(records) -> InteractionGraph:
    """One node per user and item; edge weight sums ratings over repeat reviews."""
    graph = InteractionGraph()
    for r in records:
        graph.add_edge(Node("user", r.user_id), Node("item", r.item_id), float(r.rating))
    graph.nodes = sorted(graph.adjacency)
    return graph


def _walk(graph, start, length, rng):
    walk = [start]
    node = start
    while len(walk) < length:
        nbrs = graph.neighbors(node)
        if not nbrs:
            break
        # sort for a platform-independent draw order
        cand = sorted(nbrs)
        cum = np.cumsum([nbrs[c] for c in cand])
        pick = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        node = cand[min(pick, len(cand) - 1)]
        walk.append(node)
    return walk


def sample_walks(graph: InteractionGraph, walks_per_node: int = 10, walk_length: int = 8,
                 seed: int = 0) -> WalkCorpus:
    """Weighted random walks of ``walk_length`` nodes from every node.

    Each start node draws from its own generator seeded by ``(seed, node index)``,
    so walks do not depend on the order start nodes are processed in.
    """
    check_positive_int(walks_per_node, "walks_per_node")
    check_positive_int(walk_length, "walk_length")
    walks = []
    for i, node in enumerate(graph.nodes):
        rng = np.random.default_rng([seed, i])
        for _ in range(walks_per_node):
            walks.append(_walk(graph, node, walk_length, rng))
    return WalkCorpus(walks, walk_length, walks_per_node, seed)


def cooccurrence_ppmi(walks: WalkCorpus, window: int = 2, nodes=None):
    """PPMI matrix of (center, context) co-occurrence within ``±window``.

    Returns ``(matrix, nodes)``. ``nodes`` fixes the row order; by default
    the sorted set of nodes seen in the walks.
    """
    check_positive_int(window, "window")
    if nodes is None:
        nodes = sorted({n for walk in walks.walks for n in walk})
    index = {n: i for i, n in enumerate(nodes)}
    counts = np.zeros((len(nodes), len(nodes)))
    for walk in walks.walks:
        ids = [index[n] for n in walk]
        for pos, center in enumerate(ids):
            lo, hi = max(0, pos - window), min(len(ids), pos + window + 1)
            for ctx in range(lo, hi):
                if ctx != pos:
                    counts[center, ids[ctx]] += 1.0
    total = counts.sum()
    if total == 0:
        return np.zeros_like(counts), list(nodes)
    marg = counts.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        pmi = np.log(counts * total / np.outer(marg, marg))
    ppmi = np.where(counts > 0, np.maximum(pmi, 0.0), 0.0)
    # pair counting is symmetric, but float products need not be bit-symmetric
    ppmi = np.triu(ppmi) + np.triu(ppmi, 1).T
    return ppmi, list(nodes)


def top_eigenpairs(matrix, rank, iterations=100, seed=0):
    """Top-``rank`` eigenpairs (by magnitude) via orthogonal iteration.

    A Rayleigh-Ritz step on the converged subspace yields the pairs, sorted
    by decreasing ``|lambda|``. Each eigenvector's largest-magnitude entry is
    made positive so the output does not depend on sign conventions.
    """
    a = check_symmetric(matrix)
    n = a.shape[0]
    if not 0 <= rank <= n:
        raise ValueError(f"rank {rank} outside [0, {n}]")
    if rank == 0:
        return np.zeros(0), np.zeros((n, 0))
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, rank)))
    for _ in range(iterations):
        z = a @ q
        if not np.any(z):
            break
        q, _ = np.linalg.qr(z)
    vals, w = np.linalg.eigh(q.T @ a @ q)
    vecs = q @ w
    order = np.argsort(-np.abs(vals), kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    pivots = np.argmax(np.abs(vecs), axis=0)
    signs = np.where(vecs[pivots, np.arange(rank)] < 0, -1.0, 1.0)
    return vals, vecs * signs


def factorize_ppmi(matrix, rank, iterations=100, seed=0, nodes=None) -> EmbeddingTable:
    """Embedding of node ``i`` is ``v_k[i] * sqrt(max(lambda_k, 0))`` for the top pairs."""
    a = check_symmetric(matrix)
    if rank > a.shape[0]:
        raise ValueError(f"rank {rank} exceeds matrix size {a.shape[0]}")
    if nodes is None:
        nodes = list(range(a.shape[0]))
    vals, vecs = top_eigenpairs(a, rank, iterations, seed)
    emb = vecs * np.sqrt(np.maximum(vals, 0.0))
    return EmbeddingTable({node: emb[i].copy() for i, node in enumerate(nodes)}, rank, vals)


def item_feature(item_id, table: EmbeddingTable, rank: int) -> np.ndarray:
    if rank != table.rank:
        raise ValueError(f"rank {rank} does not match table rank {table.rank}")
    vec = table.node_to_vector.get(Node("item", item_id))
    return np.zeros(rank) if vec is None else vec.copy()


def concat_features(tfidf, graph_feat) -> np.ndarray:
    return np.concatenate([check_finite_vector(tfidf, "tfidf"),
                           check_finite_vector(graph_feat, "graph_feat")])


class GraphEmbedder(TransformerMixin, BaseEstimator):
    """Item embeddings from the user-item review graph.

    ``fit`` takes review records; ``transform`` takes records (or bare item
    ids) and returns one embedding row per entry, zeros for unseen items.
    Matrices smaller than ``rank`` are zero-padded to ``rank`` columns.
    """

    def __init__(self, rank=DEFAULT_RANK, walks_per_node=10, walk_length=8, window=2,
                 n_iter=100, seed=0):
        self.rank = rank
        self.walks_per_node = walks_per_node
        self.walk_length = walk_length
        self.window = window
        self.n_iter = n_iter
        self.seed = seed

    def fit(self, X, y=None):
        self.graph_ = build_interaction_graph(X)
        walks = sample_walks(self.graph_, self.walks_per_node, self.walk_length, self.seed)
        ppmi, nodes = cooccurrence_ppmi(walks, self.window, nodes=self.graph_.nodes)
        effective = min(self.rank, len(nodes))
        table = factorize_ppmi(ppmi, effective, self.n_iter, self.seed, nodes)
        padded = {n: np.pad(v, (0, self.rank - effective)) for n, v in table.node_to_vector.items()}
        self.table_ = EmbeddingTable(padded, self.rank)
        return self

    def transform(self, X):
        check_is_fitted(self, "table_")
        ids = [x if isinstance(x, str) else x.item_id for x in X]
        out = np.zeros((len(ids), self.rank))
        for row, item in enumerate(ids):
            out[row] = item_feature(item, self.table_, self.rank)
        return out
