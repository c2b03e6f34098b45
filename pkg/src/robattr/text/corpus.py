"""Labeled text corpora: JSONL I/O, deterministic splits, and the synthetic
fixture corpus used throughout the test suite."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .preprocess import preprocess

__all__ = [
    "RawCorpus",
    "SplitSpec",
    "split",
    "load_corpus",
    "save_corpus",
    "make_fixture_corpus",
]


class CorpusError(ValueError):
    """Raised for malformed or unusable corpora."""


@dataclass
class RawCorpus:
    """A labeled text dataset.

    samples: list of (text, label) pairs; labels index into label_names.
    """

    samples: list[tuple[str, int]]
    label_names: list[str]
    name: str = "corpus"

    def __post_init__(self) -> None:
        n_labels = len(self.label_names)
        for text, label in self.samples:
            if not (0 <= label < n_labels):
                raise CorpusError(
                    f"label {label} out of range for {n_labels} label names"
                )
            if not text:
                raise CorpusError("corpus contains an empty text sample")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def texts(self) -> list[str]:
        return [t for t, _ in self.samples]

    @property
    def labels(self) -> list[int]:
        return [l for _, l in self.samples]

    def preprocessed(self) -> "RawCorpus":
        """Normalize every sample, dropping the ones that reduce to nothing."""
        kept = []
        for text, label in self.samples:
            clean = preprocess(text)
            if clean:
                kept.append((clean, label))
        return RawCorpus(kept, list(self.label_names), self.name)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.6
    validation_fraction: float = 0.2
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        fracs = (self.train_fraction, self.validation_fraction, self.test_fraction)
        if not all(0.0 < f < 1.0 for f in fracs):
            raise CorpusError(f"split fractions must lie in (0,1), got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise CorpusError(f"split fractions must sum to 1, got {sum(fracs)}")


def _allocate(n: int, fractions: tuple[float, ...]) -> list[int]:
    """Largest-remainder allocation of n items to the given fractions."""
    raw = [n * f for f in fractions]
    counts = [int(r) for r in raw]
    remainder = n - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def split(corpus: RawCorpus, spec: SplitSpec) -> tuple[RawCorpus, RawCorpus, RawCorpus]:
    """Shuffle once with the spec seed and cut into train/validation/test.

    The three parts are disjoint, exhaustive, and identical across calls
    with the same seed.
    """
    n = len(corpus)
    if n < 3:
        raise CorpusError(f"need at least 3 samples to split, got {n}")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)
    counts = _allocate(
        n, (spec.train_fraction, spec.validation_fraction, spec.test_fraction)
    )
    parts = []
    start = 0
    for part_name, count in zip(("train", "validation", "test"), counts):
        idx = order[start : start + count]
        samples = [corpus.samples[i] for i in idx]
        parts.append(
            RawCorpus(samples, list(corpus.label_names), f"{corpus.name}-{part_name}")
        )
        start += count
    return parts[0], parts[1], parts[2]


def load_corpus(path: str | Path, name: str | None = None) -> RawCorpus:
    """Read a JSONL corpus: one object per line with `text` and `label` fields.

    Label names come from an optional `label_names` key on the first line,
    otherwise they are synthesized from the label ids present.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus file not found: {path}")
    samples: list[tuple[str, int]] = []
    label_names: list[str] | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if "text" not in record or "label" not in record:
                raise CorpusError(f"{path}:{lineno}: missing `text` or `label`")
            if label_names is None and "label_names" in record:
                label_names = list(record["label_names"])
            samples.append((str(record["text"]), int(record["label"])))
    if not samples:
        raise CorpusError(f"{path}: empty corpus")
    if label_names is None:
        label_names = [f"class_{i}" for i in range(max(l for _, l in samples) + 1)]
    return RawCorpus(samples, label_names, name or path.stem)


def save_corpus(corpus: RawCorpus, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for i, (text, label) in enumerate(corpus.samples):
            record: dict = {"text": text, "label": label}
            if i == 0:
                record["label_names"] = list(corpus.label_names)
            fh.write(json.dumps(record) + "\n")


# ---------------------------------------------------------------------------
# Synthetic review corpus used as a desk-scale stand-in for real datasets.
# Two classes with overlapping neutral vocabulary and class-specific content
# words, so trained classifiers have real signal and word substitutions can
# move attribution maps without flipping predictions.
# ---------------------------------------------------------------------------

_POS_ADJ = [
    "wonderful", "superb", "delightful", "brilliant", "charming", "gripping",
    "excellent", "marvelous", "stunning", "refreshing", "heartfelt", "clever",
]
_NEG_ADJ = [
    "dreadful", "tedious", "clumsy", "lifeless", "grating", "shallow",
    "awful", "dismal", "sloppy", "forgettable", "hollow", "bland",
]
_POS_VERB = ["loved", "enjoyed", "admired", "savored", "praised", "treasured"]
_NEG_VERB = ["hated", "endured", "regretted", "resented", "dismissed", "mocked"]
_NOUNS = [
    "movie", "film", "story", "plot", "script", "acting", "cast", "director",
    "ending", "dialogue", "pacing", "soundtrack", "scenery", "performance",
    "restaurant", "dinner", "service", "menu", "dessert", "novel", "chapter",
]
_FILLERS = [
    "yesterday", "tonight", "honestly", "frankly", "overall", "somehow",
    "definitely", "certainly", "absolutely", "truly", "really", "quite",
]
_OPENERS = [
    "i watched the", "we saw the", "my friend recommended the",
    "everyone talked about the", "critics reviewed the", "i finished the",
]
_POS_TAILS = [
    "and it was a complete triumph", "and i smiled the whole time",
    "and the crowd cheered loudly", "and i recommend it to everyone",
    "and every minute felt rewarding", "and the craft shines throughout",
]
_NEG_TAILS = [
    "and it was a complete disaster", "and i checked my watch constantly",
    "and the crowd walked out early", "and i warn everyone to skip it",
    "and every minute felt wasted", "and the flaws show throughout",
]


def make_fixture_corpus(
    n_samples: int = 400, seed: int = 7, name: str = "fixture"
) -> RawCorpus:
    """Generate a deterministic two-class review corpus.

    Class 1 samples use positive content words, class 0 negative ones;
    both share neutral nouns and filler vocabulary. Lengths vary between
    roughly 8 and 30 tokens.
    """
    rng = np.random.default_rng(seed)
    samples: list[tuple[str, int]] = []
    for i in range(n_samples):
        label = int(i % 2)
        adjs = _POS_ADJ if label == 1 else _NEG_ADJ
        verbs = _POS_VERB if label == 1 else _NEG_VERB
        tails = _POS_TAILS if label == 1 else _NEG_TAILS
        opener = _OPENERS[rng.integers(len(_OPENERS))]
        noun = _NOUNS[rng.integers(len(_NOUNS))]
        adj = adjs[rng.integers(len(adjs))]
        verb = verbs[rng.integers(len(verbs))]
        parts = [opener, adj, noun, "."]
        parts += ["i", verb, "the", _NOUNS[rng.integers(len(_NOUNS))]]
        if rng.random() < 0.7:
            parts += [_FILLERS[rng.integers(len(_FILLERS))]]
        if rng.random() < 0.6:
            parts += [",", "the", noun, "was", adjs[rng.integers(len(adjs))]]
        if rng.random() < 0.5:
            parts += [tails[rng.integers(len(tails))]]
        parts += ["."]
        text = preprocess(" ".join(parts))
        samples.append((text, label))
    return RawCorpus(samples, ["negative", "positive"], name)
