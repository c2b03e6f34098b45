"""Context-driven substitution proposal model (masked-LM stand-in).

Fit on a reference corpus, it scores vocabulary words for a masked position
by how well they fit the surrounding context: directed adjacency likelihood
on both sides (the dominant term, which is what makes proposals read
fluently), symmetric co-occurrence, a frequency prior, and a dense context
transform. Two cost profiles exist:

* ``full``      - deep context transform, unpruned vocabulary.
* ``distilled`` - shallow transform, frequency-pruned vocabulary.

Both profiles answer one ``propose`` call per query regardless of how many
positions are masked at once, which is what makes batch masking pay off.
"""

from __future__ import annotations

import threading

import numpy as np

from ..text import RawCorpus, TokenizedText, WordTokenizer
from .embeddings import HashedEmbeddings
from .handles import CandidateSet

__all__ = ["ContextProposalModel", "MASK_TOKEN"]

MASK_TOKEN = "[MASK]"


def _is_word(token: str) -> bool:
    return any(ch.isalnum() for ch in token) and token != MASK_TOKEN


class ContextProposalModel:
    """Proposes in-context single-token substitutions.

    variant: "full" or "distilled"; controls transform depth, width and
    vocabulary pruning, i.e. the per-query cost.
    """

    def __init__(self, corpus: RawCorpus, variant: str = "distilled", seed: int = 0):
        if variant not in ("full", "distilled"):
            raise ValueError(f"unknown proposal-model variant {variant!r}")
        self.variant = variant
        self.seed = seed
        self.query_count = 0
        self._lock = threading.Lock()
        self._alpha = 0.1
        if variant == "full":
            self._layers, self._hidden, self._window = 12, 768, 3
        else:
            self._layers, self._hidden, self._window = 2, 128, 2
        self._fit(corpus)

    # ------------------------------------------------------------------

    def _fit(self, corpus: RawCorpus) -> None:
        tokenizer = WordTokenizer()
        counts: dict[str, int] = {}
        docs: list[list[str]] = []
        for text in corpus.texts:
            words = [w for w, _ in tokenizer.tokenize(text) if _is_word(w)]
            docs.append(words)
            for w in words:
                counts[w] = counts.get(w, 0) + 1
        vocab = sorted(counts)
        if self.variant == "distilled":
            # prune singletons; keep at least the 50 most frequent words
            keep = [w for w in vocab if counts[w] >= 2]
            if len(keep) < 50:
                keep = sorted(vocab, key=lambda w: (-counts[w], w))[:50]
                keep.sort()
            vocab = keep
        self.vocab = vocab
        self._index = {w: i for i, w in enumerate(vocab)}
        self.counts = counts
        self._total = sum(counts.values()) or 1
        v = len(vocab)
        # directed adjacency counts: _after[w][c] = #(w followed by c),
        # _before[w][c] = #(w preceded by c); plus symmetric window counts
        self._after = np.zeros((v, v))
        self._before = np.zeros((v, v))
        self._cooc = np.zeros((v, v))
        for words in docs:
            for i, w in enumerate(words):
                wi = self._index.get(w)
                if wi is None:
                    continue
                if i + 1 < len(words):
                    nj = self._index.get(words[i + 1])
                    if nj is not None:
                        self._after[wi, nj] += 1.0
                if i > 0:
                    pj = self._index.get(words[i - 1])
                    if pj is not None:
                        self._before[wi, pj] += 1.0
                lo = max(0, i - self._window)
                hi = min(len(words), i + self._window + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    cj = self._index.get(words[j])
                    if cj is not None:
                        self._cooc[wi, cj] += 1.0
        self._after_totals = self._after.sum(axis=1)
        self._before_totals = self._before.sum(axis=1)
        self._cooc_totals = self._cooc.sum(axis=1) + 1.0
        emb = HashedEmbeddings(dim=self._hidden, salt=f"proposal-{self.seed}")
        self._vocab_emb = emb.matrix(vocab)  # (v, hidden)
        self._word_emb = emb
        rng = np.random.default_rng(self.seed)
        # two base transforms cycled `layers` times: full depth compute at a
        # fraction of the weight memory
        self._transforms = [
            rng.standard_normal((self._hidden, self._hidden)) / np.sqrt(self._hidden)
            for _ in range(min(2, self._layers))
        ]

    # ------------------------------------------------------------------

    def propose(
        self,
        t: TokenizedText,
        masked_indices: set[int],
        candidates_per_position: int,
    ) -> CandidateSet:
        """One model query: candidates for every masked position at once."""
        if candidates_per_position < 1:
            raise ValueError("candidates_per_position must be >= 1")
        bad = [i for i in masked_indices if not (0 <= i < len(t))]
        if bad:
            raise IndexError(f"masked indices out of range: {bad}")
        with self._lock:
            self.query_count += 1
        per_position: dict[int, list[tuple[str, float]]] = {}
        for index in sorted(masked_indices):
            scores = self._score_vocab(t, index, masked_indices)
            original = t.tokens[index].lower()
            ranked = sorted(
                range(len(self.vocab)), key=lambda i: (-scores[i], self.vocab[i])
            )
            chosen: list[tuple[str, float]] = []
            for i in ranked:
                word = self.vocab[i]
                if word == original or not _is_word(word):
                    continue
                chosen.append((word, float(scores[i])))
                if len(chosen) == candidates_per_position:
                    break
            per_position[index] = chosen
        return CandidateSet(per_position)

    # ------------------------------------------------------------------

    def _neighbor(self, t: TokenizedText, index: int, masked: set[int], step: int):
        """Nearest unmasked word token on one side, with a distance weight."""
        j = index + step
        distance = 1
        while 0 <= j < len(t) and distance <= 2:
            if j not in masked and _is_word(t.tokens[j]):
                return t.tokens[j], (1.0 if distance == 1 else 0.5)
            j += step
            distance += 1
        return None, 0.0

    def _context_tokens(
        self, t: TokenizedText, index: int, masked: set[int]
    ) -> list[str]:
        out = []
        lo = max(0, index - self._window)
        hi = min(len(t), index + self._window + 1)
        for j in range(lo, hi):
            if j == index or j in masked:
                continue
            token = t.tokens[j]
            if _is_word(token):
                out.append(token)
        return out

    def _score_vocab(
        self, t: TokenizedText, index: int, masked: set[int]
    ) -> np.ndarray:
        v = len(self.vocab)
        alpha = self._alpha
        freq = np.array(
            [np.log((self.counts.get(w, 0) + 1.0) / self._total) for w in self.vocab]
        )
        score = 0.25 * freq

        # directed adjacency fit: candidates must read naturally after the
        # left neighbor and before the right one
        prev_word, w_prev = self._neighbor(t, index, masked, -1)
        if prev_word is not None:
            pi = self._index.get(prev_word)
            if pi is not None:
                num = self._after[pi, :] + alpha
                den = self._after_totals[pi] + alpha * v
                score += 3.0 * w_prev * np.log(num / den)
        next_word, w_next = self._neighbor(t, index, masked, +1)
        if next_word is not None:
            ni = self._index.get(next_word)
            if ni is not None:
                num = self._after[:, ni] + alpha
                den = self._after_totals + alpha * v
                score += 3.0 * w_next * np.log(num / den)

        # symmetric window co-occurrence
        for c in self._context_tokens(t, index, masked):
            ci = self._index.get(c)
            if ci is not None:
                score += 0.3 * np.log(
                    (self._cooc[:, ci] + alpha) / (self._cooc_totals + alpha * v)
                )

        # dense context transform; depth/width is what separates the variants
        context = self._context_tokens(t, index, masked)
        ctx_vec = np.zeros(self._hidden)
        for c in context:
            ctx_vec += self._word_emb.vector(c)
        if context:
            ctx_vec /= len(context)
        for layer in range(self._layers):
            w = self._transforms[layer % len(self._transforms)]
            ctx_vec = np.tanh(w @ ctx_vec)
        score = score + 0.05 * (self._vocab_emb @ ctx_vec)
        return score
