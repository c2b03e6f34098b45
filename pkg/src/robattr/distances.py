"""Distance measures between attribution maps and between text samples.

Attribution distance rescales the Pearson correlation into [0, 1]; input
distances cover sentence-embedding similarity, relative perplexity increase
and grammatical-error increase. Each registers under a string key used by
experiment configs and report columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attribution import AttributionMap
from .models.handles import (
    GrammarCheckerHandle,
    PerplexityModelHandle,
    SentenceEncoderHandle,
)
from .models.sentence import EncoderError

__all__ = [
    "DistanceConfig",
    "attribution_distance",
    "pearson",
    "is_constant",
    "semantic_distance",
    "perplexity_increase",
    "grammar_error_increase",
    "ATTRIBUTION_DISTANCE_KEYS",
    "INPUT_DISTANCE_KEYS",
]

# registry keys: the attribution-map distance and the input distances
ATTRIBUTION_DISTANCE_KEYS = ("pcc",)
INPUT_DISTANCE_KEYS = ("sts_use_like", "sts_minilm_like", "pp", "ge")


@dataclass(frozen=True)
class DistanceConfig:
    eps_pp: float = 1e-6  # denominator guard for the perplexity ratio
    eps_ds: float = 1e-3  # floor for input distances inside the k ratio

    def __post_init__(self) -> None:
        if self.eps_pp <= 0 or self.eps_ds <= 0:
            raise ValueError("distance epsilons must be positive")


def is_constant(values: np.ndarray) -> bool:
    values = np.asarray(values, dtype=np.float64)
    return bool(np.all(values == values[0]))


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; undefined (raises) for constant inputs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("inputs must be equal-length vectors")
    if len(a) < 2:
        raise ValueError("need at least 2 entries")
    da = a - a.mean()
    db = b - b.mean()
    denom = float(np.sqrt((da * da).sum() * (db * db).sum()))
    if denom == 0.0:
        raise ZeroDivisionError("correlation undefined for constant input")
    return float(np.clip((da * db).sum() / denom, -1.0, 1.0))


def attribution_distance(
    a: AttributionMap | np.ndarray, b: AttributionMap | np.ndarray
) -> float:
    """Correlation distance 1 - (1 + PCC) / 2, in [0, 1].

    Zero for perfectly correlated maps, one for perfectly anticorrelated.
    When either map is constant the correlation is undefined and the
    no-information midpoint 0.5 is returned; callers that aggregate should
    flag such records via `is_constant`.
    """
    av = a.scores if isinstance(a, AttributionMap) else np.asarray(a, float)
    bv = b.scores if isinstance(b, AttributionMap) else np.asarray(b, float)
    if av.shape != bv.shape:
        raise ValueError("attribution maps must have equal lengths")
    if len(av) < 2:
        return 0.5  # single-entry maps are constant; correlation undefined
    try:
        rho = pearson(av, bv)
    except ZeroDivisionError:
        return 0.5
    return 1.0 - (1.0 + rho) / 2.0


def semantic_distance(
    enc: SentenceEncoderHandle, s_adv: str, s: str
) -> float:
    """Sentence-embedding distance 1 - (cos + 1) / 2, in [0, 1]."""
    if not s_adv or not s:
        raise ValueError("semantic distance needs non-empty strings")
    va = np.asarray(enc.encode(s_adv), dtype=np.float64)
    vb = np.asarray(enc.encode(s), dtype=np.float64)
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise EncoderError("zero-norm sentence embedding")
    cos = float(np.clip(va @ vb / (na * nb), -1.0, 1.0))
    return 1.0 - (cos + 1.0) / 2.0


def perplexity_increase(
    pp: PerplexityModelHandle,
    s_adv: str,
    s: str,
    cfg: DistanceConfig | None = None,
) -> float:
    """Relative perplexity growth (PP(s_adv) - PP(s)) / (PP(s) + eps).

    Negative when the perturbed text is more fluent than the original.
    """
    cfg = cfg or DistanceConfig()
    if not s_adv or not s:
        raise ValueError("perplexity increase needs non-empty strings")
    pp_adv = pp.perplexity(s_adv)
    pp_orig = pp.perplexity(s)
    return (pp_adv - pp_orig) / (pp_orig + cfg.eps_pp)


def grammar_error_increase(
    gc: GrammarCheckerHandle, s_adv: str, s: str
) -> int:
    """Grammatical-error count difference; negative when errors decrease."""
    return int(gc.error_count(s_adv)) - int(gc.error_count(s))
