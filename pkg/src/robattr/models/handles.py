"""Abstract interfaces for every learned model the estimator touches.

All downstream code (attribution, attack, distances) depends only on these
handles, so full-scale models and the bundled desk-scale stand-ins are
interchangeable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from ..text import TokenizedText

__all__ = [
    "ClassifierHandle",
    "MaskedLMHandle",
    "SentenceEncoderHandle",
    "PerplexityModelHandle",
    "GrammarCheckerHandle",
    "CandidateSet",
    "UnsupportedMethodError",
    "zero_token_embedding",
]


class UnsupportedMethodError(RuntimeError):
    """An attribution method was requested that the classifier cannot serve."""


@runtime_checkable
class ClassifierHandle(Protocol):
    """A text classifier decomposed into embedding and classification stages."""

    num_classes: int

    def embed(self, t: TokenizedText) -> np.ndarray:
        """Map a sample to its (tokens x embedding_dim) matrix."""
        ...

    def predict_probs(self, x: np.ndarray) -> np.ndarray:
        """Class probabilities for an embedded sample; sums to 1."""
        ...

    def gradient(self, x: np.ndarray, class_id: int) -> np.ndarray:
        """d prob[class_id] / d x, same shape as x."""
        ...


@runtime_checkable
class AttentionClassifierHandle(ClassifierHandle, Protocol):
    def attention_weights(self, x: np.ndarray) -> np.ndarray:
        """Per-token attention scores for an embedded sample."""
        ...


@dataclass
class CandidateSet:
    """Substitution proposals per masked classifier-token position.

    per_position maps token index -> list of (candidate, score), sorted by
    descending score with no duplicate candidates inside a position.
    """

    per_position: dict[int, list[tuple[str, float]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for idx, cands in self.per_position.items():
            scores = [s for _, s in cands]
            if any(a < b for a, b in zip(scores, scores[1:])):
                raise ValueError(f"candidates at position {idx} not sorted")
            words = [w for w, _ in cands]
            if len(set(words)) != len(words):
                raise ValueError(f"duplicate candidates at position {idx}")

    def candidates(self, index: int) -> list[str]:
        return [w for w, _ in self.per_position.get(index, [])]


@runtime_checkable
class MaskedLMHandle(Protocol):
    """Context model proposing in-place token substitutions.

    query_count increases by exactly one per propose() call, no matter how
    many positions the call masks.
    """

    query_count: int

    def propose(
        self,
        t: TokenizedText,
        masked_indices: set[int],
        candidates_per_position: int,
    ) -> CandidateSet:
        ...


@runtime_checkable
class SentenceEncoderHandle(Protocol):
    dim: int

    def encode(self, text: str) -> np.ndarray:
        ...


@runtime_checkable
class PerplexityModelHandle(Protocol):
    def perplexity(self, text: str) -> float:
        ...


@runtime_checkable
class GrammarCheckerHandle(Protocol):
    def error_count(self, text: str) -> int:
        ...


def zero_token_embedding(
    h: ClassifierHandle, t: TokenizedText, i: int
) -> np.ndarray:
    """embed(t) with the row(s) of token i zeroed out."""
    if not (0 <= i < len(t)):
        raise IndexError(f"token index {i} out of range for {len(t)} tokens")
    x = np.array(h.embed(t), copy=True)
    x[i, :] = 0.0
    return x
