from .preprocess import preprocess
from .corpus import (
    RawCorpus,
    SplitSpec,
    CorpusError,
    split,
    load_corpus,
    save_corpus,
    make_fixture_corpus,
)
from .tokenize import (
    TokenizedText,
    WordTokenizer,
    ChunkSubwordTokenizer,
    tokenize_aligned,
    truncate,
    AlignmentError,
)
from .stopwords import stop_words, is_stop_word

__all__ = [
    "preprocess",
    "RawCorpus",
    "SplitSpec",
    "CorpusError",
    "split",
    "load_corpus",
    "save_corpus",
    "make_fixture_corpus",
    "TokenizedText",
    "WordTokenizer",
    "ChunkSubwordTokenizer",
    "tokenize_aligned",
    "truncate",
    "AlignmentError",
    "stop_words",
    "is_stop_word",
]
