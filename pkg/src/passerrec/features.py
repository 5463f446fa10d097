"""Review -> feature-row pipeline: cleaned-text TF-IDF next to item graph embeddings."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .data import clean_text
from .graph import DEFAULT_RANK, GraphEmbedder
from .tfidf import DEFAULT_MAX_TERMS, TfidfFeaturizer

__all__ = ["ReviewFeaturizer", "save_features", "load_features"]


class ReviewFeaturizer(TransformerMixin, BaseEstimator):
    """Fit TF-IDF and graph embeddings on training reviews, then featurize any reviews.

    Output rows are ``max_terms`` TF-IDF weights followed by ``rank`` graph
    embedding values for the review's item (zeros for items not seen in
    ``fit``). With the defaults that is 1936 + 64 = 2000 columns.
    """

    def __init__(self, max_terms=DEFAULT_MAX_TERMS, rank=DEFAULT_RANK, walks_per_node=10,
                 walk_length=8, window=2, n_iter=100, seed=0):
        self.max_terms = max_terms
        self.rank = rank
        self.walks_per_node = walks_per_node
        self.walk_length = walk_length
        self.window = window
        self.n_iter = n_iter
        self.seed = seed

    def fit(self, X, y=None):
        records = list(X)
        self.tfidf_ = TfidfFeaturizer(self.max_terms).fit([clean_text(r.text) for r in records])
        self.graph_ = GraphEmbedder(self.rank, self.walks_per_node, self.walk_length,
                                    self.window, self.n_iter, self.seed).fit(records)
        self.n_features_out_ = self.max_terms + self.rank
        return self

    def transform(self, X):
        check_is_fitted(self, "tfidf_")
        records = list(X)
        text = self.tfidf_.transform([clean_text(r.text) for r in records])
        return np.hstack([text, self.graph_.transform(records)])


def save_features(fh, X, y):
    """Text matrix: header ``features v1 <rows> <cols>``, then ``label v1 ... vD`` per row."""
    X = np.asarray(X, dtype=float)
    fh.write(f"features v1 {X.shape[0]} {X.shape[1]}\n")
    for label, row in zip(y, X):
        fh.write(f"{int(label)} " + " ".join("0" if v == 0 else f"{v:.17g}" for v in row) + "\n")


def load_features(fh):
    header = fh.readline().split()
    if len(header) != 4 or header[:2] != ["features", "v1"]:
        raise ValueError("not a features v1 file")
    rows, cols = int(header[2]), int(header[3])
    data = np.loadtxt(fh, ndmin=2) if rows else np.zeros((0, cols + 1))
    if data.shape != (rows, cols + 1):
        raise ValueError(f"expected {rows}x{cols + 1} values, got {data.shape}")
    return data[:, 1:], data[:, 0].astype(int)
