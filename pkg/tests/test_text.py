import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robattr.text import (
    ChunkSubwordTokenizer,
    CorpusError,
    RawCorpus,
    SplitSpec,
    WordTokenizer,
    load_corpus,
    make_fixture_corpus,
    preprocess,
    save_corpus,
    split,
    tokenize_aligned,
    truncate,
)


class TestPreprocess:
    def test_lowercase(self):
        assert preprocess("Hello WORLD") == "hello world"

    def test_whitelist_strips_accents_and_emoji(self):
        # by hand: é and the emoji are outside the whitelist, whitespace
        # collapses to single spaces afterwards
        assert preprocess("café ☕ time!") == "caf time!"

    def test_empty(self):
        assert preprocess("") == ""

    def test_reduces_to_nothing(self):
        assert preprocess("☕☕☕") == ""

    def test_keeps_digits_and_listed_punctuation(self):
        assert preprocess("ben vs. the #39;t streak | 21") == "ben vs. the #39;t streak | 21"

    @given(st.text(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_idempotent(self, text):
        once = preprocess(text)
        assert preprocess(once) == once


class TestSplit:
    def test_60_20_20(self):
        corpus = make_fixture_corpus(100, seed=3)
        train, val, test = split(corpus, SplitSpec(seed=5))
        assert (len(train), len(val), len(test)) == (60, 20, 20)

    def test_deterministic(self):
        corpus = make_fixture_corpus(50, seed=3)
        a = split(corpus, SplitSpec(seed=9))
        b = split(corpus, SplitSpec(seed=9))
        for part_a, part_b in zip(a, b):
            assert part_a.samples == part_b.samples

    def test_small_corpus_rounding(self):
        # largest-remainder rule by hand: 10 * (0.6, 0.2, 0.2) = (6, 2, 2)
        corpus = RawCorpus(
            [(f"sample {i} text", i % 2) for i in range(10)], ["a", "b"]
        )
        train, val, test = split(corpus, SplitSpec(seed=0))
        assert (len(train), len(val), len(test)) == (6, 2, 2)

    def test_disjoint_and_exhaustive(self):
        corpus = make_fixture_corpus(83, seed=1)
        parts = split(corpus, SplitSpec(seed=2))
        combined = sorted(s for part in parts for s in part.samples)
        assert combined == sorted(corpus.samples)

    def test_too_small(self):
        corpus = RawCorpus([("one a", 0), ("two b", 1)], ["a", "b"])
        with pytest.raises(CorpusError):
            split(corpus, SplitSpec(seed=0))

    def test_bad_fractions(self):
        with pytest.raises(CorpusError):
            SplitSpec(train_fraction=0.9, validation_fraction=0.2, test_fraction=0.2)


class TestCorpusIO:
    def test_roundtrip(self, tmp_path):
        corpus = make_fixture_corpus(20, seed=4)
        path = tmp_path / "corpus.jsonl"
        save_corpus(corpus, path)
        loaded = load_corpus(path)
        assert loaded.samples == corpus.samples
        assert loaded.label_names == corpus.label_names

    def test_missing_fields(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps({"text": "no label here"}) + "\n")
        with pytest.raises(CorpusError):
            load_corpus(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_corpus(tmp_path / "nope.jsonl")

    def test_label_out_of_range(self):
        with pytest.raises(CorpusError):
            RawCorpus([("text here", 5)], ["only"])


class TestTokenize:
    def test_five_tokens(self):
        t = tokenize_aligned("press the delete key .")
        assert list(t.tokens) == ["press", "the", "delete", "key", "."]

    def test_single_word_span(self):
        t = tokenize_aligned("hello")
        assert list(t.tokens) == ["hello"]
        assert t.char_spans[0] == (0, 5)

    def test_long_word_splits_into_subtokens(self):
        t = tokenize_aligned("quarterback")
        start, end = t.mlm_alignment[0]
        assert end - start == 2
        assert t.mlm_tokens[start] == "quarte"
        assert t.mlm_tokens[start + 1] == "##rback"

    def test_alignment_covers_every_token(self, corpus):
        for text in corpus.texts[:30]:
            t = tokenize_aligned(text)
            covered = []
            for start, end in t.mlm_alignment:
                covered.extend(range(start, end))
            assert covered == list(range(len(t.mlm_tokens)))

    def test_spans_are_exact_substrings(self, corpus):
        for text in corpus.texts[:30]:
            t = tokenize_aligned(text)
            for token, (start, end) in zip(t.tokens, t.char_spans):
                assert text[start:end] == token

    def test_char_concat_is_subsequence(self, corpus):
        for text in corpus.texts[:30]:
            t = tokenize_aligned(text)
            concat = "".join(text[s:e] for s, e in t.char_spans)
            it = iter(text)
            assert all(ch in it for ch in concat)

    def test_punctuation_peeled(self):
        t = tokenize_aligned('she said "wait" (truly) now!')
        assert '"' in t.tokens and "(" in t.tokens and "!" in t.tokens
        assert "wait" in t.tokens and "truly" in t.tokens

    def test_stop_word_mask(self):
        t = tokenize_aligned("the movie was wonderful")
        assert list(t.stop_word_mask) == [True, False, True, False]

    def test_with_token_replaces_and_keeps_length(self):
        t = tokenize_aligned("press the delete key .")
        swapped = t.with_token(2, "remove")
        assert list(swapped.tokens) == ["press", "the", "remove", "key", "."]
        assert len(swapped) == len(t)

    def test_with_token_out_of_range(self):
        t = tokenize_aligned("press the delete key .")
        with pytest.raises(IndexError):
            t.with_token(9, "x")

    def test_word_tokenizer_spans(self):
        pieces = WordTokenizer().tokenize("press the delete key .")
        assert [w for w, _ in pieces] == ["press", "the", "delete", "key", "."]
        assert [s for _, s in pieces] == [(0, 5), (6, 9), (10, 16), (17, 20), (21, 22)]

    def test_subword_tokenizer_chunks(self):
        tok = ChunkSubwordTokenizer(max_piece=6)
        assert tok.split_word("key") == ["key"]
        assert tok.split_word("quarterback") == ["quarte", "##rback"]

    def test_uncoverable_token_names_it(self):
        from robattr.text import AlignmentError

        class Degenerate:
            def split_word(self, word):
                return [] if word == "delete" else [word]

        with pytest.raises(AlignmentError, match="delete"):
            tokenize_aligned("press the delete key .", mlm_tokenizer=Degenerate())


class TestTruncate:
    def test_over_limit(self):
        words = " ".join(f"w{i}" for i in range(100))
        t = tokenize_aligned(words)
        cut = truncate(t, 64)
        assert len(cut) == 64
        assert cut.tokens == t.tokens[:64]

    def test_under_limit_unchanged(self):
        t = tokenize_aligned("just a few tokens here")
        assert truncate(t, 64) is t

    def test_boundary_single_token(self):
        t = tokenize_aligned("word")
        assert truncate(t, 1) is t

    def test_idempotent(self):
        words = " ".join(f"w{i}" for i in range(40))
        t = tokenize_aligned(words)
        once = truncate(t, 10)
        twice = truncate(once, 10)
        assert twice.tokens == once.tokens
        assert twice.original_text == once.original_text

    def test_alignment_resliced(self):
        t = tokenize_aligned("refrigerator quarterback hi")
        cut = truncate(t, 2)
        assert len(cut.mlm_alignment) == 2
        assert cut.mlm_alignment[-1][1] == len(cut.mlm_tokens)

    def test_bad_limit(self):
        t = tokenize_aligned("word")
        with pytest.raises(ValueError):
            truncate(t, 0)


class TestFixtureCorpus:
    def test_size_and_classes(self):
        corpus = make_fixture_corpus(240, seed=0)
        assert len(corpus) == 240
        assert sorted(set(corpus.labels)) == [0, 1]

    def test_deterministic(self):
        a = make_fixture_corpus(50, seed=11)
        b = make_fixture_corpus(50, seed=11)
        assert a.samples == b.samples

    def test_preprocessed_already(self):
        corpus = make_fixture_corpus(30, seed=2)
        for text in corpus.texts:
            assert preprocess(text) == text

    def test_preprocessed_drops_vanishing_samples(self):
        corpus = RawCorpus(
            [("KEEP this one", 0), ("☕☕☕", 1), ("and this", 1)],
            ["a", "b"],
        )
        cleaned = corpus.preprocessed()
        assert cleaned.texts == ["keep this one", "and this"]
