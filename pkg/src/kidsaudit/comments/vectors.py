"""TF-IDF vectorization of preprocessed comments.

Weight of a term in a document is tf * ln(N / df): raw in-document
count times the natural log of corpus size over document frequency.
Vectors are unit-normalized; a document whose every term appears in
every document ends up as a zero vector (norm 0) and is excluded from
clustering by callers.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import EmptyVocabulary
from .preprocess import Comment, content_tokens


@dataclass
class DocVector:
    weights: dict[str, float] = field(default_factory=dict)
    norm: float = 0.0


def vectorize(corpus: list[Comment], stopwords: frozenset[str] = frozenset(),
              ) -> list[DocVector]:
    """TF-IDF vectors for a corpus; raises EmptyVocabulary when no
    term survives stopword removal."""
    if not corpus:
        raise EmptyVocabulary("empty corpus")
    docs = [content_tokens(c, stopwords) for c in corpus]
    df: Counter[str] = Counter()
    for tokens in docs:
        df.update(set(tokens))
    if not df:
        raise EmptyVocabulary("no terms survive stopword removal")
    n = len(corpus)
    idf = {term: math.log(n / count) for term, count in df.items()}

    out = []
    for tokens in docs:
        tf = Counter(tokens)
        weights = {}
        for term, count in tf.items():
            w = count * idf[term]
            if w != 0.0:
                weights[term] = w
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm > 0.0:
            weights = {t: w / norm for t, w in weights.items()}
            out.append(DocVector(weights=weights, norm=1.0))
        else:
            out.append(DocVector(weights={}, norm=0.0))
    return out


def to_matrix(vectors: list[DocVector]) -> tuple[np.ndarray, list[str]]:
    """Dense matrix over the shared vocabulary, one row per vector."""
    vocab = sorted({t for v in vectors for t in v.weights})
    index = {t: i for i, t in enumerate(vocab)}
    mat = np.zeros((len(vectors), max(len(vocab), 1)))
    for row, vec in enumerate(vectors):
        for term, w in vec.weights.items():
            mat[row, index[term]] = w
    return mat, vocab


def load_dense_vectors(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Externally precomputed embeddings keyed by comment id:
    {"ids": [...], "vectors": [[...], ...]}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    ids = list(raw["ids"])
    mat = np.asarray(raw["vectors"], dtype=float)
    if mat.ndim != 2 or mat.shape[0] != len(ids):
        raise ValueError("vector file shape does not match ids")
    return ids, mat
