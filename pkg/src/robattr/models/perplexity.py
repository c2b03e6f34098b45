"""Token-level perplexity models over a bigram fit of a reference corpus.

Two scoring rules sit behind the same interface:

* ``BigramPerplexityModel`` - standard perplexity, exp of the mean negative
  log-likelihood of the observed tokens.
* ``EntropyPerplexityModel`` - the exponentiated-entropy variant
  2^(-sum p log2 p) over the same per-token probabilities, kept for
  comparison.
"""

from __future__ import annotations

import numpy as np

from ..text import RawCorpus, WordTokenizer

__all__ = ["BigramPerplexityModel", "EntropyPerplexityModel"]

_BOS = "<s>"
_UNK = "<unk>"


class BigramPerplexityModel:
    def __init__(self, corpus: RawCorpus, alpha: float = 0.1):
        self.alpha = alpha
        self._tokenizer = WordTokenizer()
        bigrams: dict[tuple[str, str], int] = {}
        unigrams: dict[str, int] = {}
        vocab: set[str] = set()
        for text in corpus.texts:
            words = [w for w, _ in self._tokenizer.tokenize(text)]
            prev = _BOS
            unigrams[prev] = unigrams.get(prev, 0) + 1
            for w in words:
                vocab.add(w)
                bigrams[(prev, w)] = bigrams.get((prev, w), 0) + 1
                unigrams[w] = unigrams.get(w, 0) + 1
                prev = w
        self._bigrams = bigrams
        self._unigrams = unigrams
        self._vocab_size = len(vocab) + 2  # UNK and BOS

    def _known(self, word: str) -> str:
        return word if word in self._unigrams else _UNK

    def token_probs(self, text: str) -> list[float]:
        words = [w for w, _ in self._tokenizer.tokenize(text)]
        probs = []
        prev = _BOS
        for w in words:
            w = self._known(w)
            num = self._bigrams.get((prev, w), 0) + self.alpha
            den = self._unigrams.get(prev, 0) + self.alpha * self._vocab_size
            probs.append(num / den)
            prev = w
        return probs

    def perplexity(self, text: str) -> float:
        probs = self.token_probs(text)
        if not probs:
            return 1.0
        nll = -np.mean(np.log(probs))
        return float(np.exp(nll))


class EntropyPerplexityModel:
    """Exponentiated token-entropy scoring over the bigram probabilities."""

    def __init__(self, corpus: RawCorpus, alpha: float = 0.1):
        self._bigram = BigramPerplexityModel(corpus, alpha=alpha)

    def perplexity(self, text: str) -> float:
        probs = self._bigram.token_probs(text)
        if not probs:
            return 1.0
        entropy = -sum(p * np.log2(p) for p in probs)
        return float(2.0**entropy)
