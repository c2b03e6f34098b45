"""String registries mapping config names to adapter factories.

Experiment configs reference adapters by name; factories take the reference
corpus the desk-scale stand-ins fit on. Registering a new adapter is how
production models (real encoders, a causal LM, an external grammar API)
plug in.
"""

from __future__ import annotations

from typing import Callable

from ..text import RawCorpus
from .grammar import RuleGrammarChecker
from .mlm import ContextProposalModel
from .perplexity import BigramPerplexityModel, EntropyPerplexityModel
from .sentence import DistributionalSentenceEncoder

__all__ = [
    "build_sentence_encoder",
    "build_proposal_model",
    "build_perplexity_model",
    "build_grammar_checker",
    "SENTENCE_ENCODERS",
    "PROPOSAL_MODELS",
    "PERPLEXITY_MODELS",
    "GRAMMAR_CHECKERS",
    "RegistryError",
]


class RegistryError(KeyError):
    pass


SENTENCE_ENCODERS: dict[str, Callable[[RawCorpus, int], object]] = {
    "use_like": lambda corpus, seed: DistributionalSentenceEncoder(
        dim=256, salt=f"sentence-a-{seed}", idf_weighting=True, corpus=corpus
    ),
    "minilm_like": lambda corpus, seed: DistributionalSentenceEncoder(
        dim=128, salt=f"sentence-b-{seed}", idf_weighting=False, corpus=corpus
    ),
}

PROPOSAL_MODELS: dict[str, Callable[[RawCorpus, int], object]] = {
    "full": lambda corpus, seed: ContextProposalModel(corpus, "full", seed=seed),
    "distilled": lambda corpus, seed: ContextProposalModel(
        corpus, "distilled", seed=seed
    ),
}

PERPLEXITY_MODELS: dict[str, Callable[[RawCorpus, int], object]] = {
    "bigram": lambda corpus, seed: BigramPerplexityModel(corpus),
    "entropy": lambda corpus, seed: EntropyPerplexityModel(corpus),
}

GRAMMAR_CHECKERS: dict[str, Callable[[RawCorpus, int], object]] = {
    "rules": lambda corpus, seed: RuleGrammarChecker(),
}


def _lookup(table: dict, kind: str, name: str):
    try:
        return table[name]
    except KeyError:
        raise RegistryError(
            f"unknown {kind} {name!r}; known: {sorted(table)}"
        ) from None


def build_sentence_encoder(name: str, corpus: RawCorpus, seed: int = 0):
    return _lookup(SENTENCE_ENCODERS, "sentence encoder", name)(corpus, seed)


def build_proposal_model(name: str, corpus: RawCorpus, seed: int = 0):
    return _lookup(PROPOSAL_MODELS, "proposal model", name)(corpus, seed)


def build_perplexity_model(name: str, corpus: RawCorpus, seed: int = 0):
    return _lookup(PERPLEXITY_MODELS, "perplexity model", name)(corpus, seed)


def build_grammar_checker(name: str, corpus: RawCorpus, seed: int = 0):
    return _lookup(GRAMMAR_CHECKERS, "grammar checker", name)(corpus, seed)
