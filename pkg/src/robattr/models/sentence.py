"""Deterministic sentence encoders standing in for pretrained models.

Token vectors combine a hash base with distributional smoothing fit on a
reference corpus: words sharing contexts get nearby vectors, so in-context
substitutions perturb the sentence embedding less than out-of-vocabulary
ones. Two registry variants differ in dimension, hash salt and weighting.
"""

from __future__ import annotations

import numpy as np

from ..text import RawCorpus, WordTokenizer
from .embeddings import HashedEmbeddings

__all__ = ["DistributionalSentenceEncoder", "EncoderError"]


class EncoderError(RuntimeError):
    """The encoder produced an unusable (zero-norm) embedding."""


class DistributionalSentenceEncoder:
    def __init__(
        self,
        dim: int = 256,
        salt: str = "sentence-a",
        smoothing: float = 0.7,
        idf_weighting: bool = True,
        corpus: RawCorpus | None = None,
    ):
        self.dim = dim
        self.smoothing = smoothing
        self.idf_weighting = idf_weighting
        self._base = HashedEmbeddings(dim=dim, salt=salt)
        self._tokenizer = WordTokenizer()
        self._ctx_vec: dict[str, np.ndarray] = {}
        self._idf: dict[str, float] = {}
        self._n_docs = 0
        if corpus is not None:
            self.fit(corpus)

    def fit(self, corpus: RawCorpus) -> "DistributionalSentenceEncoder":
        window = 2
        sums: dict[str, np.ndarray] = {}
        counts: dict[str, int] = {}
        df: dict[str, int] = {}
        self._n_docs = len(corpus)
        for text in corpus.texts:
            words = [w for w, _ in self._tokenizer.tokenize(text)]
            for w in set(words):
                df[w] = df.get(w, 0) + 1
            for i, w in enumerate(words):
                lo, hi = max(0, i - window), min(len(words), i + window + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    if w not in sums:
                        sums[w] = np.zeros(self.dim)
                        counts[w] = 0
                    sums[w] += self._base.vector(words[j])
                    counts[w] += 1
        self._ctx_vec = {
            w: sums[w] / counts[w] for w in sums if counts[w] > 0
        }
        self._idf = {
            w: float(np.log((1 + self._n_docs) / (1 + n))) for w, n in df.items()
        }
        return self

    def _token_vector(self, token: str) -> np.ndarray:
        base = self._base.vector(token)
        ctx = self._ctx_vec.get(token)
        if ctx is None:
            return base
        return (1.0 - self.smoothing) * base + self.smoothing * ctx

    def encode(self, text: str) -> np.ndarray:
        words = [w for w, _ in self._tokenizer.tokenize(text)]
        if not words:
            return np.zeros(self.dim)
        acc = np.zeros(self.dim)
        total = 0.0
        for w in words:
            weight = self._idf.get(w, 1.0) if self.idf_weighting else 1.0
            weight = max(weight, 1e-3)
            acc += weight * self._token_vector(w)
            total += weight
        vec = acc / total
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise EncoderError("zero-norm sentence embedding")
        return vec / norm
