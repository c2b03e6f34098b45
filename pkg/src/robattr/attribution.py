"""Per-token attribution maps: saliency, integrated gradients, attention.

Every method reduces per-dimension contributions to one signed score per
classifier token (sum over embedding dimensions), preserving the sign
convention that positive scores push toward the target class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models.handles import ClassifierHandle, UnsupportedMethodError
from .text import TokenizedText

__all__ = [
    "AttributionMap",
    "saliency",
    "integrated_gradients",
    "attention_attribution",
    "compute_attribution",
    "METHODS",
]

METHODS = ("saliency", "integrated_gradients", "attention")

_ALIASES = {
    "s": "saliency",
    "ig": "integrated_gradients",
    "a": "attention",
}


def canonical_method(name: str) -> str:
    key = name.lower()
    key = _ALIASES.get(key, key)
    if key not in METHODS:
        raise UnsupportedMethodError(f"unknown attribution method {name!r}")
    return key


@dataclass
class AttributionMap:
    scores: np.ndarray
    method: str
    label: int
    sample_ref: str = ""

    def __post_init__(self) -> None:
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 1:
            raise ValueError("attribution scores must be a vector")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("attribution scores must be finite")

    def __len__(self) -> int:
        return len(self.scores)

    def to_json(self) -> dict:
        return {
            "sample_ref": self.sample_ref,
            "method": self.method,
            "label": self.label,
            "scores": [float(s) for s in self.scores],
        }

    @classmethod
    def from_json(cls, record: dict) -> "AttributionMap":
        return cls(
            scores=np.array(record["scores"], dtype=np.float64),
            method=record["method"],
            label=int(record["label"]),
            sample_ref=record.get("sample_ref", ""),
        )


def _resolve_embedding(
    h: ClassifierHandle, t: TokenizedText, x: np.ndarray | None
) -> np.ndarray:
    return h.embed(t) if x is None else np.asarray(x, dtype=np.float64)


def saliency(
    h: ClassifierHandle,
    t: TokenizedText,
    label: int,
    x: np.ndarray | None = None,
) -> AttributionMap:
    """Signed gradient attribution: per token, the sum over embedding
    dimensions of d prob[label] / d x."""
    x = _resolve_embedding(h, t, x)
    try:
        grad = h.gradient(x, label)
    except (AttributeError, NotImplementedError) as exc:
        raise UnsupportedMethodError("classifier exposes no gradient") from exc
    return AttributionMap(grad.sum(axis=1), "saliency", label, t.sample_id)


def integrated_gradients(
    h: ClassifierHandle,
    t: TokenizedText,
    label: int,
    steps: int = 50,
    x: np.ndarray | None = None,
) -> AttributionMap:
    """Path-integrated gradients from the all-zero embedding baseline.

    The path integral is a Riemann sum over `steps` interval midpoints,
    accurate to O(1/steps^2); for a linear classifier the result is exact
    at any step count.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = _resolve_embedding(h, t, x)
    try:
        total = np.zeros_like(x)
        for k in range(steps):
            alpha = (k + 0.5) / steps
            total += h.gradient(alpha * x, label)
    except (AttributeError, NotImplementedError) as exc:
        raise UnsupportedMethodError("classifier exposes no gradient") from exc
    avg = total / steps
    contributions = x * avg
    return AttributionMap(
        contributions.sum(axis=1), "integrated_gradients", label, t.sample_id
    )


def attention_attribution(
    h: ClassifierHandle,
    t: TokenizedText,
    label: int,
    x: np.ndarray | None = None,
) -> AttributionMap:
    """Attention mass received by each token, normalized to sum to one.

    Nonnegative weight vectors are rescaled by their sum; raw score vectors
    with negative entries go through softmax first.
    """
    weights_fn = getattr(h, "attention_weights", None)
    if weights_fn is None:
        raise UnsupportedMethodError("classifier exposes no attention weights")
    x = _resolve_embedding(h, t, x)
    try:
        weights = np.asarray(weights_fn(x), dtype=np.float64)
    except AttributeError as exc:
        raise UnsupportedMethodError("classifier exposes no attention weights") from exc
    if weights.shape != (x.shape[0],):
        raise ValueError("attention weights must have one entry per token")
    if np.any(weights < 0) or weights.sum() <= 0:
        shifted = weights - weights.max()
        exp = np.exp(shifted)
        scores = exp / exp.sum()
    else:
        scores = weights / weights.sum()
    return AttributionMap(scores, "attention", label, t.sample_id)


def compute_attribution(
    method: str,
    h: ClassifierHandle,
    t: TokenizedText,
    label: int,
    steps: int = 50,
    x: np.ndarray | None = None,
) -> AttributionMap:
    method = canonical_method(method)
    if method == "saliency":
        return saliency(h, t, label, x=x)
    if method == "integrated_gradients":
        return integrated_gradients(h, t, label, steps=steps, x=x)
    return attention_attribution(h, t, label, x=x)
