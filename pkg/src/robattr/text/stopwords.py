"""Loader for the bundled stop-word list."""

from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def stop_words() -> frozenset[str]:
    """Return the bundled English stop-word set (lowercase tokens)."""
    text = (
        resources.files("robattr.data").joinpath("stopwords.txt").read_text("utf-8")
    )
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def is_stop_word(token: str) -> bool:
    return token.lower() in stop_words()
