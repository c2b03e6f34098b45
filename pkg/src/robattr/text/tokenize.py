"""Tokenized samples with aligned classifier-token and subtoken views.

The attack substitutes whole classifier tokens but masks subtokens of the
proposal model, so every sample keeps both tokenizations plus an alignment
map between them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .stopwords import is_stop_word

__all__ = [
    "TokenizedText",
    "WordTokenizer",
    "ChunkSubwordTokenizer",
    "tokenize_aligned",
    "truncate",
    "AlignmentError",
]

_PUNCT = set(".,!?;:'\"#|-()")


class AlignmentError(ValueError):
    """Raised when a classifier token cannot be covered by subtokens."""


@dataclass(frozen=True)
class TokenizedText:
    """A text sample with aligned token views.

    tokens:        classifier tokens, in order.
    char_spans:    (start, end) ranges into original_text, one per token.
    stop_word_mask: True at positions holding stop words.
    mlm_tokens:    subtokens of the proposal-model tokenizer.
    mlm_alignment: per classifier token, the (start, end) index range of its
                   subtokens inside mlm_tokens.
    """

    original_text: str
    tokens: tuple[str, ...]
    char_spans: tuple[tuple[int, int], ...]
    stop_word_mask: tuple[bool, ...]
    mlm_tokens: tuple[str, ...]
    mlm_alignment: tuple[tuple[int, int], ...]
    sample_id: str = ""

    def __post_init__(self) -> None:
        n = len(self.tokens)
        if not (len(self.char_spans) == len(self.stop_word_mask) == n):
            raise ValueError("token-aligned fields must have equal lengths")
        if len(self.mlm_alignment) != n:
            raise ValueError("mlm_alignment must cover every classifier token")
        prev_end = 0
        for start, end in self.char_spans:
            if start < prev_end or end <= start:
                raise ValueError("char_spans must be ordered and non-overlapping")
            prev_end = end
        for start, end in self.mlm_alignment:
            if end <= start:
                raise AlignmentError("empty subtoken range in alignment")

    def __len__(self) -> int:
        return len(self.tokens)

    def with_token(self, index: int, new_token: str) -> "TokenizedText":
        """Return a copy with the token at `index` replaced.

        The surface text is rebuilt by joining tokens with single spaces,
        which is the same normalization the word tokenizer round-trips.
        """
        if not (0 <= index < len(self.tokens)):
            raise IndexError(f"token index {index} out of range")
        tokens = list(self.tokens)
        tokens[index] = new_token
        word_tok = WordTokenizer()
        sub_tok = ChunkSubwordTokenizer()
        return tokenize_aligned(
            " ".join(tokens), word_tok, sub_tok, sample_id=self.sample_id
        )

    def to_json(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "text": self.original_text,
            "tokens": list(self.tokens),
        }


class WordTokenizer:
    """Whitespace tokenizer that peels leading/trailing punctuation into
    separate tokens; interior punctuation stays attached."""

    def tokenize(self, text: str) -> list[tuple[str, tuple[int, int]]]:
        out: list[tuple[str, tuple[int, int]]] = []
        i = 0
        n = len(text)
        while i < n:
            if text[i].isspace():
                i += 1
                continue
            j = i
            while j < n and not text[j].isspace():
                j += 1
            out.extend(self._split_chunk(text, i, j))
            i = j
        return out

    @staticmethod
    def _split_chunk(
        text: str, start: int, end: int
    ) -> list[tuple[str, tuple[int, int]]]:
        left = start
        right = end
        head: list[tuple[str, tuple[int, int]]] = []
        tail: list[tuple[str, tuple[int, int]]] = []
        while left < right and text[left] in _PUNCT:
            head.append((text[left], (left, left + 1)))
            left += 1
        while right > left and text[right - 1] in _PUNCT:
            tail.append((text[right - 1], (right - 1, right)))
            right -= 1
        middle = []
        if right > left:
            middle = [(text[left:right], (left, right))]
        return head + middle + list(reversed(tail))


class ChunkSubwordTokenizer:
    """Deterministic subword splitter standing in for a learned subtoken
    vocabulary: pieces are fixed-width chunks, continuations prefixed ##."""

    def __init__(self, max_piece: int = 6):
        self.max_piece = max_piece

    def split_word(self, word: str) -> list[str]:
        if len(word) <= self.max_piece:
            return [word]
        pieces = [word[: self.max_piece]]
        for i in range(self.max_piece, len(word), self.max_piece):
            pieces.append("##" + word[i : i + self.max_piece])
        return pieces


def tokenize_aligned(
    text: str,
    classifier_tokenizer: WordTokenizer | None = None,
    mlm_tokenizer: ChunkSubwordTokenizer | None = None,
    sample_id: str = "",
) -> TokenizedText:
    """Tokenize `text` under both tokenizers and build the alignment map.

    Expects preprocessed input. Raises AlignmentError (naming the token) if
    any classifier token ends up with no covering subtokens.
    """
    classifier_tokenizer = classifier_tokenizer or WordTokenizer()
    mlm_tokenizer = mlm_tokenizer or ChunkSubwordTokenizer()
    words = classifier_tokenizer.tokenize(text)
    tokens = tuple(w for w, _ in words)
    spans = tuple(span for _, span in words)
    mask = tuple(is_stop_word(w) for w in tokens)
    mlm_tokens: list[str] = []
    alignment: list[tuple[int, int]] = []
    for token in tokens:
        pieces = mlm_tokenizer.split_word(token)
        if not pieces:
            raise AlignmentError(f"no subtokens produced for token {token!r}")
        start = len(mlm_tokens)
        mlm_tokens.extend(pieces)
        alignment.append((start, len(mlm_tokens)))
    return TokenizedText(
        original_text=text,
        tokens=tokens,
        char_spans=spans,
        stop_word_mask=mask,
        mlm_tokens=tuple(mlm_tokens),
        mlm_alignment=tuple(alignment),
        sample_id=sample_id,
    )


def truncate(t: TokenizedText, max_tokens: int) -> TokenizedText:
    """Keep the first `max_tokens` classifier tokens, re-slicing all views."""
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    if len(t) <= max_tokens:
        return t
    keep_spans = t.char_spans[:max_tokens]
    cut = keep_spans[-1][1]
    mlm_end = t.mlm_alignment[max_tokens - 1][1]
    return replace(
        t,
        original_text=t.original_text[:cut],
        tokens=t.tokens[:max_tokens],
        char_spans=keep_spans,
        stop_word_mask=t.stop_word_mask[:max_tokens],
        mlm_tokens=t.mlm_tokens[:mlm_end],
        mlm_alignment=t.mlm_alignment[:max_tokens],
    )
