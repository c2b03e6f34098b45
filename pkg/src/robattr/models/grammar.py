"""Rule-based grammar checker.

A deliberately small reference rule set so the grammatical-error metric is
live in tests; production users plug an external checker behind the same
handle.
"""

from __future__ import annotations

from ..text import WordTokenizer

__all__ = ["RuleGrammarChecker"]

# Closed noun list for determiner-number agreement: singular -> plural.
_NOUN_PLURALS = {
    "movie": "movies",
    "film": "films",
    "story": "stories",
    "plot": "plots",
    "key": "keys",
    "chip": "chips",
    "word": "words",
    "error": "errors",
    "review": "reviews",
    "network": "networks",
    "game": "games",
    "sample": "samples",
    "token": "tokens",
    "dog": "dogs",
    "cat": "cats",
}
_PLURAL_TO_SINGULAR = {p: s for s, p in _NOUN_PLURALS.items()}

_SINGULAR_DETS = {"a", "an", "this", "every", "each"}
_PLURAL_DETS = {"these", "those", "many", "several", "few"}

_TERMINALS = {".", "!", "?"}


class RuleGrammarChecker:
    def __init__(self):
        self._tokenizer = WordTokenizer()

    def error_count(self, text: str) -> int:
        if not text or not text.strip():
            return 0
        words = [w for w, _ in self._tokenizer.tokenize(text)]
        errors = 0
        errors += self._repeated_words(words)
        errors += self._missing_terminal(words)
        errors += self._unmatched_pairs(text)
        errors += self._determiner_number(words)
        return errors

    @staticmethod
    def _repeated_words(words: list[str]) -> int:
        count = 0
        for a, b in zip(words, words[1:]):
            if a.lower() == b.lower() and any(ch.isalpha() for ch in a):
                count += 1
        return count

    @staticmethod
    def _missing_terminal(words: list[str]) -> int:
        if not words:
            return 0
        return 0 if words[-1] in _TERMINALS else 1

    @staticmethod
    def _unmatched_pairs(text: str) -> int:
        errors = 0
        if text.count('"') % 2 == 1:
            errors += 1
        for opener, closer in (("(", ")"),):
            depth = 0
            bad = False
            for ch in text:
                if ch == opener:
                    depth += 1
                elif ch == closer:
                    depth -= 1
                    if depth < 0:
                        bad = True
            if bad or depth != 0:
                errors += 1
        return errors

    @staticmethod
    def _determiner_number(words: list[str]) -> int:
        count = 0
        for det, noun in zip(words, words[1:]):
            det_l, noun_l = det.lower(), noun.lower()
            if det_l in _SINGULAR_DETS and noun_l in _PLURAL_TO_SINGULAR:
                count += 1
            elif det_l in _PLURAL_DETS and noun_l in _NOUN_PLURALS:
                count += 1
        return count
