"""Corpus-level text normalization applied before tokenization."""

import re

# Characters allowed to survive normalization. Everything else (accented
# letters, emoji, control characters, ...) is dropped outright.
_ALLOWED_PUNCT = ".,!?;:'\"#|-()"
_ALLOWED = set(
    "abcdefghijklmnopqrstuvwxyz" "0123456789" " " + _ALLOWED_PUNCT
)

_WS = re.compile(r"\s+")


def preprocess(text: str) -> str:
    """Normalize raw text: lowercase, strip non-whitelisted characters,
    collapse whitespace.

    Returns the empty string when nothing survives; callers are expected
    to filter such samples out.
    """
    lowered = text.lower()
    kept = []
    for ch in lowered:
        if ch in _ALLOWED:
            kept.append(ch)
        elif ch.isspace():
            kept.append(" ")
        # anything else is dropped
    collapsed = _WS.sub(" ", "".join(kept))
    return collapsed.strip()
