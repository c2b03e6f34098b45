from .handles import (
    ClassifierHandle,
    MaskedLMHandle,
    SentenceEncoderHandle,
    PerplexityModelHandle,
    GrammarCheckerHandle,
    CandidateSet,
    UnsupportedMethodError,
    zero_token_embedding,
)
from .embeddings import HashedEmbeddings
from .classifier import (
    ReferenceClassifier,
    TrainConfig,
    TrainingError,
    train_reference_classifier,
    save_classifier,
    load_classifier,
)
from .mlm import ContextProposalModel, MASK_TOKEN
from .sentence import DistributionalSentenceEncoder, EncoderError
from .perplexity import BigramPerplexityModel, EntropyPerplexityModel
from .grammar import RuleGrammarChecker
from .registry import (
    build_sentence_encoder,
    build_proposal_model,
    build_perplexity_model,
    build_grammar_checker,
    RegistryError,
)

__all__ = [
    "ClassifierHandle",
    "MaskedLMHandle",
    "SentenceEncoderHandle",
    "PerplexityModelHandle",
    "GrammarCheckerHandle",
    "CandidateSet",
    "UnsupportedMethodError",
    "zero_token_embedding",
    "HashedEmbeddings",
    "ReferenceClassifier",
    "TrainConfig",
    "TrainingError",
    "train_reference_classifier",
    "save_classifier",
    "load_classifier",
    "ContextProposalModel",
    "MASK_TOKEN",
    "DistributionalSentenceEncoder",
    "EncoderError",
    "BigramPerplexityModel",
    "EntropyPerplexityModel",
    "RuleGrammarChecker",
    "build_sentence_encoder",
    "build_proposal_model",
    "build_perplexity_model",
    "build_grammar_checker",
    "RegistryError",
]
