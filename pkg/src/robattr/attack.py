"""Greedy word-substitution attack on attribution maps.

The attack maximizes the distance between the perturbed sample's attribution
map and the original one, under the constraint that the predicted class
never changes. It proceeds in two steps:

1. rank tokens by how much zeroing their embedding moves the attribution map;
2. walk the ranked positions in batches, asking a proposal model for
   in-context substitutions for a whole batch in one query, and greedily
   committing any candidate that strictly increases the attribution distance
   while preserving the prediction.

A synonym-table provider drives the same greedy core to form the comparison
baseline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .attribution import canonical_method, compute_attribution
from .distances import attribution_distance
from .models.handles import CandidateSet, ClassifierHandle, zero_token_embedding
from .text import TokenizedText, WordTokenizer, tokenize_aligned

__all__ = [
    "AttackConfig",
    "Substitution",
    "AttackTrace",
    "SynonymTable",
    "importance_ranking",
    "make_batches",
    "attack",
    "baseline_synonym_attack",
    "load_synonym_table",
]

ATTACK_KINDS = ("mlm", "synonym")

_FLOAT_SLACK = 1e-9


def _attribution_distance_fn(key: str) -> Callable:
    if key != "pcc":
        raise ValueError(f"unknown attribution distance key {key!r}")
    return attribution_distance


@dataclass(frozen=True)
class AttackConfig:
    rho_max: float = 0.15
    rho_b: float | None = None  # None applies the min(rho_max, 0.15) rule
    candidates_per_token: int = 15
    attribution_method: str = "integrated_gradients"
    attribution_distance_key: str = "pcc"
    ig_steps: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.rho_max <= 1.0):
            raise ValueError("rho_max must lie in (0, 1]")
        rb = self.effective_rho_b
        if not (0.0 < rb <= self.rho_max):
            raise ValueError("rho_b must lie in (0, rho_max]")
        if self.candidates_per_token < 1:
            raise ValueError("candidates_per_token must be >= 1")
        canonical_method(self.attribution_method)
        _attribution_distance_fn(self.attribution_distance_key)

    @property
    def effective_rho_b(self) -> float:
        if self.rho_b is not None:
            return self.rho_b
        return min(self.rho_max, 0.15)


@dataclass(frozen=True)
class Substitution:
    position: int
    old: str
    new: str
    d_after: float


@dataclass
class AttackTrace:
    original: TokenizedText
    adversarial: TokenizedText
    substitutions: list[Substitution]
    label: int
    rho: float
    d_max: float
    prediction_preserved: bool
    mlm_queries: int
    aborted: bool = False

    def to_json(self) -> dict:
        return {
            "sample_id": self.original.sample_id,
            "original_text": self.original.original_text,
            "adversarial_text": self.adversarial.original_text,
            "label": self.label,
            "substitutions": [
                [s.position, s.old, s.new, s.d_after] for s in self.substitutions
            ],
            "rho": self.rho,
            "d_max": self.d_max,
            "prediction_preserved": self.prediction_preserved,
            "mlm_queries": self.mlm_queries,
            "aborted": self.aborted,
        }

    @classmethod
    def from_json(cls, record: dict) -> "AttackTrace":
        return cls(
            original=tokenize_aligned(
                record["original_text"], sample_id=record.get("sample_id", "")
            ),
            adversarial=tokenize_aligned(
                record["adversarial_text"], sample_id=record.get("sample_id", "")
            ),
            substitutions=[
                Substitution(int(p), o, n, float(d))
                for p, o, n, d in record["substitutions"]
            ],
            label=int(record["label"]),
            rho=float(record["rho"]),
            d_max=float(record["d_max"]),
            prediction_preserved=bool(record["prediction_preserved"]),
            mlm_queries=int(record["mlm_queries"]),
            aborted=bool(record.get("aborted", False)),
        )


# ---------------------------------------------------------------------------
# step 1: importance ranking
# ---------------------------------------------------------------------------


def importance_ranking(
    h: ClassifierHandle,
    attribution_method: str,
    t: TokenizedText,
    label: int,
    distance_fn: Callable = attribution_distance,
    ig_steps: int = 50,
) -> list[int]:
    """Order token indices by how much zeroing each token's embedding moves
    the attribution map away from the original one (descending; ties go to
    the earlier position)."""
    base = compute_attribution(attribution_method, h, t, label, steps=ig_steps)
    scores = []
    for i in range(len(t)):
        x = zero_token_embedding(h, t, i)
        moved = compute_attribution(
            attribution_method, h, t, label, steps=ig_steps, x=x
        )
        scores.append(float(distance_fn(moved, base)))
    return sorted(range(len(t)), key=lambda i: (-scores[i], i))


# ---------------------------------------------------------------------------
# step 2: batching
# ---------------------------------------------------------------------------


def batch_size(n_tokens: int, rho_b: float) -> int:
    return max(1, math.ceil(n_tokens * rho_b - _FLOAT_SLACK))


def substitution_budget(n_tokens: int, rho_max: float) -> int:
    return int(math.floor(n_tokens * rho_max + _FLOAT_SLACK))


def make_batches(
    ranked: list[int], n_tokens: int, rho_b: float, rho_max: float
) -> list[list[int]]:
    """Chunk the ranked prefix that fits the substitution budget into
    batches of ceil(n_tokens * rho_b) positions (last batch may be short)."""
    if not (0.0 < rho_b <= 1.0):
        raise ValueError("rho_b must lie in (0, 1]")
    n_b = batch_size(n_tokens, rho_b)
    budget = min(substitution_budget(n_tokens, rho_max), len(ranked))
    prefix = ranked[:budget]
    return [prefix[i : i + n_b] for i in range(0, len(prefix), n_b)]


# ---------------------------------------------------------------------------
# candidate providers
# ---------------------------------------------------------------------------


class SynonymTable:
    """Static word -> synonyms map serving as the baseline candidate source."""

    def __init__(self, table: dict[str, list[str]]):
        tokenizer = WordTokenizer()
        clean: dict[str, list[str]] = {}
        for word, synonyms in table.items():
            kept = []
            for syn in synonyms:
                pieces = [w for w, _ in tokenizer.tokenize(syn)]
                if len(pieces) == 1 and pieces[0] == syn and syn != word:
                    kept.append(syn)
            if kept:
                clean[word.lower()] = kept
        self._table = clean

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._table

    def __len__(self) -> int:
        return len(self._table)

    def propose(
        self, t: TokenizedText, masked_indices: set[int], candidates_per_position: int
    ) -> CandidateSet:
        per_position: dict[int, list[tuple[str, float]]] = {}
        for index in sorted(masked_indices):
            synonyms = self._table.get(t.tokens[index].lower(), [])
            chosen = synonyms[:candidates_per_position]
            per_position[index] = [
                (w, float(-rank)) for rank, w in enumerate(chosen)
            ]
        return CandidateSet(per_position)


def load_synonym_table(path: str | Path) -> SynonymTable:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"synonym table not found: {path}")
    return SynonymTable(json.loads(path.read_text("utf-8")))


# ---------------------------------------------------------------------------
# the greedy core
# ---------------------------------------------------------------------------


def _greedy_attack(
    h: ClassifierHandle,
    provider,
    t: TokenizedText,
    cfg: AttackConfig,
    count_queries: bool,
) -> AttackTrace:
    method = canonical_method(cfg.attribution_method)
    dist = _attribution_distance_fn(cfg.attribution_distance_key)
    probs = h.predict_probs(h.embed(t))
    label = int(np.argmax(probs))
    base_map = compute_attribution(method, h, t, label, steps=cfg.ig_steps)

    n = len(t)
    budget = substitution_budget(n, cfg.rho_max)
    ranked = importance_ranking(h, method, t, label, dist, cfg.ig_steps)
    batches = make_batches(ranked, n, cfg.effective_rho_b, cfg.rho_max)

    s_adv = t
    d_max = 0.0
    substituted: set[int] = set()
    subs: list[Substitution] = []
    queries = 0
    aborted = False

    for batch in batches:
        if len(substituted) >= budget:
            break
        try:
            candidates = provider.propose(
                s_adv, set(batch), cfg.candidates_per_token
            )
        except Exception:
            aborted = True
            break
        if count_queries:
            queries += 1
        for position in batch:
            if t.stop_word_mask[position]:
                continue
            for cand in candidates.candidates(position):
                trial = s_adv.with_token(position, cand)
                if len(trial) != n:
                    continue  # candidate broke tokenization; not a single token
                trial_probs = h.predict_probs(h.embed(trial))
                if int(np.argmax(trial_probs)) != label:
                    continue
                d_try = float(
                    dist(
                        compute_attribution(
                            method, h, trial, label, steps=cfg.ig_steps
                        ),
                        base_map,
                    )
                )
                if d_try <= d_max:
                    continue
                if position not in substituted and len(substituted) + 1 > budget:
                    break
                subs.append(
                    Substitution(position, s_adv.tokens[position], cand, d_try)
                )
                s_adv = trial
                d_max = d_try
                substituted.add(position)
            # stop once there is no budget left for another position
            if len(substituted) >= budget:
                break

    rho = len(substituted) / n if n else 0.0
    final_probs = h.predict_probs(h.embed(s_adv))
    return AttackTrace(
        original=t,
        adversarial=s_adv,
        substitutions=subs,
        label=label,
        rho=rho,
        d_max=d_max,
        prediction_preserved=int(np.argmax(final_probs)) == label,
        mlm_queries=queries,
        aborted=aborted,
    )


def attack(
    h: ClassifierHandle,
    mlm,
    t: TokenizedText,
    cfg: AttackConfig,
) -> AttackTrace:
    """Run the proposal-model attack against one sample."""
    return _greedy_attack(h, mlm, t, cfg, count_queries=True)


def baseline_synonym_attack(
    h: ClassifierHandle,
    t: TokenizedText,
    cfg: AttackConfig,
    synonym_table: SynonymTable,
) -> AttackTrace:
    """Run the same greedy core with candidates from a static synonym table."""
    return _greedy_attack(h, synonym_table, t, cfg, count_queries=False)
