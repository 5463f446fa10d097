"""Capped-vocabulary TF-IDF features."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive_int

__all__ = [
    "DEFAULT_MAX_TERMS",
    "Vocabulary",
    "TfidfModel",
    "tokenize",
    "build_vocabulary",
    "term_frequency",
    "fit_idf",
    "tfidf_vector",
    "TfidfFeaturizer",
]

# 1936 text dims + 64 graph dims = 2000 total features
DEFAULT_MAX_TERMS = 1936

_SPLIT = re.compile(r"[^a-z0-9]+")


@dataclass(frozen=True)
class Vocabulary:
    term_to_index: dict
    document_frequency: dict
    corpus_size: int

    def __len__(self):
        return len(self.term_to_index)

    @property
    def terms(self):
        """Terms in index order."""
        return sorted(self.term_to_index, key=self.term_to_index.__getitem__)


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: Vocabulary
    idf: np.ndarray

    def dump(self, fh):
        vocab = self.vocabulary
        fh.write(f"tfidf v1 {len(vocab)} {vocab.corpus_size}\n")
        for term in vocab.terms:
            fh.write(f"{term}\t{vocab.term_to_index[term]}\t"
                     f"{vocab.document_frequency[term]}\t{float(self.idf[vocab.term_to_index[term]])!r}\n")

    @classmethod
    def load(cls, fh):
        header = fh.readline().split()
        if len(header) != 4 or header[:2] != ["tfidf", "v1"]:
            raise ValueError("not a tfidf v1 file")
        size, corpus_size = int(header[2]), int(header[3])
        index, df = {}, {}
        idf = np.zeros(size)
        for line in fh:
            term, i, d, w = line.rstrip("\n").split("\t")
            index[term], df[term] = int(i), int(d)
            idf[int(i)] = float(w)
        if len(index) != size:
            raise ValueError(f"expected {size} terms, read {len(index)}")
        return cls(Vocabulary(index, df, corpus_size), idf)


def tokenize(text: str) -> list[str]:
    return [tok for tok in _SPLIT.split(text.lower()) if tok]


def build_vocabulary(corpus, max_terms: int = DEFAULT_MAX_TERMS) -> Vocabulary:
    """Keep the ``max_terms`` terms with the highest document frequency.

    Ties are broken lexicographically; indices follow that ranking.
    """
    check_positive_int(max_terms, "max_terms")
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus is empty")
    df = Counter()
    for doc in corpus:
        df.update(set(doc))
    if not df:
        raise ValueError("corpus contains no tokens")
    ranked = sorted(df, key=lambda t: (-df[t], t))[:max_terms]
    return Vocabulary({t: i for i, t in enumerate(ranked)},
                      {t: df[t] for t in ranked}, len(corpus))


def term_frequency(doc, vocab: Vocabulary) -> np.ndarray:
    """In-vocabulary term counts normalised by the in-vocabulary token total."""
    tf = np.zeros(len(vocab))
    index = vocab.term_to_index
    total = 0
    for tok in doc:
        i = index.get(tok)
        if i is not None:
            tf[i] += 1.0
            total += 1
    if total:
        tf /= total
    return tf


def fit_idf(corpus, vocab: Vocabulary) -> TfidfModel:
    if hasattr(corpus, "__len__") and len(corpus) != vocab.corpus_size:
        raise ValueError("vocabulary was built from a different corpus")
    idf = np.zeros(len(vocab))
    for term, i in vocab.term_to_index.items():
        df = vocab.document_frequency[term]
        if df < 1:
            raise RuntimeError(f"term {term!r} has zero document frequency")
        idf[i] = math.log(vocab.corpus_size / df)
    return TfidfModel(vocab, idf)


def tfidf_vector(doc, model: TfidfModel) -> np.ndarray:
    return term_frequency(doc, model.vocabulary) * model.idf


class TfidfFeaturizer(TransformerMixin, BaseEstimator):
    """TF-IDF vectorizer over already-cleaned review texts.

    Parameters
    ----------
    max_terms : int, default=1936
        Vocabulary cap. Output always has ``max_terms`` columns; slots beyond
        the fitted vocabulary stay zero so the feature width is fixed.
    """

    def __init__(self, max_terms=DEFAULT_MAX_TERMS):
        self.max_terms = max_terms

    def fit(self, X, y=None):
        corpus = [tokenize(text) for text in X]
        self.model_ = fit_idf(corpus, build_vocabulary(corpus, self.max_terms))
        self.n_features_out_ = self.max_terms
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        texts = list(X)
        out = np.zeros((len(texts), self.n_features_out_))
        width = len(self.model_.vocabulary)
        for row, text in enumerate(texts):
            out[row, :width] = tfidf_vector(tokenize(text), self.model_)
        return out
