import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from robattr.attribution import AttributionMap
from robattr.distances import (
    DistanceConfig,
    attribution_distance,
    grammar_error_increase,
    is_constant,
    pearson,
    perplexity_increase,
    semantic_distance,
)
from robattr.models import (
    BigramPerplexityModel,
    EncoderError,
    RuleGrammarChecker,
)
from robattr.text import RawCorpus


def _textbook_pcc(a, b):
    """Independent reference: covariance over product of standard deviations."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    n = len(a)
    cov = sum((a[i] - a.mean()) * (b[i] - b.mean()) for i in range(n)) / n
    return cov / (a.std() * b.std())


class FixedEncoder:
    dim = 3

    def __init__(self, mapping):
        self.mapping = mapping

    def encode(self, text):
        return np.asarray(self.mapping[text], dtype=np.float64)


class FixedPerplexity:
    def __init__(self, mapping):
        self.mapping = mapping

    def perplexity(self, text):
        return self.mapping[text]


class TestAttributionDistance:
    def test_identical_nonconstant_is_zero(self):
        a = np.array([1.0, 2.0, 3.0])
        assert attribution_distance(a, a) == 0.0

    def test_reversed_is_one(self):
        assert attribution_distance(np.array([1.0, 2.0, 3.0]), np.array([3.0, 2.0, 1.0])) == 1.0

    def test_matches_textbook_pcc(self):
        a = np.array([1.0, 2.0, 3.0, 4.0])
        b = np.array([1.0, 2.0, 3.0, 10.0])
        expected = 1.0 - (1.0 + _textbook_pcc(a, b)) / 2.0
        assert attribution_distance(a, b) == pytest.approx(expected, abs=1e-12)
        # and against a second independent implementation
        scipy_rho = stats.pearsonr(a, b).statistic
        assert attribution_distance(a, b) == pytest.approx(
            1.0 - (1.0 + scipy_rho) / 2.0, abs=1e-12
        )

    def test_accepts_attribution_maps(self):
        a = AttributionMap(np.array([1.0, 0.0, -1.0]), "saliency", 0)
        b = AttributionMap(np.array([-1.0, 0.0, 1.0]), "saliency", 0)
        assert attribution_distance(a, b) == 1.0

    def test_constant_vector_midpoint(self):
        const = np.array([2.0, 2.0, 2.0])
        varying = np.array([1.0, 2.0, 3.0])
        assert attribution_distance(const, varying) == 0.5
        assert is_constant(const)
        assert not is_constant(varying)

    def test_symmetric(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = rng.standard_normal(6)
            b = rng.standard_normal(6)
            assert attribution_distance(a, b) == pytest.approx(
                attribution_distance(b, a), abs=1e-15
            )

    def test_affine_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = rng.standard_normal(8)
            b = rng.standard_normal(8)
            c = float(rng.uniform(0.1, 5.0))
            shift = float(rng.uniform(-3, 3))
            assert attribution_distance(c * a + shift, b) == pytest.approx(
                attribution_distance(a, b), abs=1e-9
            )

    def test_bounds_randomized(self):
        rng = np.random.default_rng(2)
        lengths = rng.integers(2, 30, size=10_000)
        for n in lengths:
            a = rng.standard_normal(n)
            b = rng.standard_normal(n)
            d = attribution_distance(a, b)
            assert 0.0 <= d <= 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pearson(np.array([1.0, 2.0]), np.array([1.0, 2.0, 3.0]))

    def test_too_short(self):
        with pytest.raises(ValueError):
            pearson(np.array([1.0]), np.array([2.0]))


class TestSemanticDistance:
    def test_identical_text_zero(self):
        enc = FixedEncoder({"same": [1.0, 0.0, 0.0]})
        assert semantic_distance(enc, "same", "same") == 0.0

    def test_orthogonal_half(self):
        enc = FixedEncoder({"a": [1.0, 0.0, 0.0], "b": [0.0, 1.0, 0.0]})
        assert semantic_distance(enc, "a", "b") == pytest.approx(0.5)

    def test_antipodal_one(self):
        enc = FixedEncoder({"a": [1.0, 0.0, 0.0], "b": [-1.0, 0.0, 0.0]})
        assert semantic_distance(enc, "a", "b") == pytest.approx(1.0)

    def test_symmetric(self):
        enc = FixedEncoder({"a": [1.0, 2.0, 0.5], "b": [0.3, -1.0, 0.2]})
        assert semantic_distance(enc, "a", "b") == semantic_distance(enc, "b", "a")

    def test_zero_norm_raises(self):
        enc = FixedEncoder({"a": [0.0, 0.0, 0.0], "b": [1.0, 0.0, 0.0]})
        with pytest.raises(EncoderError):
            semantic_distance(enc, "a", "b")

    def test_empty_string_rejected(self):
        enc = FixedEncoder({})
        with pytest.raises(ValueError):
            semantic_distance(enc, "", "text")

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_bounds_random_embeddings(self, seed):
        rng = np.random.default_rng(seed)
        enc = FixedEncoder(
            {"a": rng.standard_normal(3) + 0.01, "b": rng.standard_normal(3) + 0.01}
        )
        assert 0.0 <= semantic_distance(enc, "a", "b") <= 1.0


class TestPerplexityIncrease:
    def test_equal_is_zero(self):
        pp = FixedPerplexity({"s": 12.0})
        assert perplexity_increase(pp, "s", "s") == 0.0

    def test_doubling_is_about_one(self):
        pp = FixedPerplexity({"orig": 10.0, "adv": 20.0})
        assert perplexity_increase(pp, "adv", "orig") == pytest.approx(1.0, abs=1e-6)

    def test_can_be_negative(self):
        pp = FixedPerplexity({"orig": 10.0, "adv": 5.0})
        assert perplexity_increase(pp, "adv", "orig") < 0

    def test_bigram_one_word_swap_hand_computed(self):
        # fit on two tiny documents, swap one word, recompute the ratio by
        # explicit bigram arithmetic
        corpus = RawCorpus([("the movie was good", 0), ("the movie was bad", 1)], ["a", "b"])
        model = BigramPerplexityModel(corpus, alpha=0.5)
        cfg = DistanceConfig()
        got = perplexity_increase(model, "the movie was bad", "the movie was good", cfg)

        def pp_of(tokens):
            v = 6  # {the, movie, was, good, bad} + <s>/<unk> slots -> 5 words + 1
            unigrams = {"<s>": 2, "the": 2, "movie": 2, "was": 2, "good": 1, "bad": 1}
            bigrams = {
                ("<s>", "the"): 2,
                ("the", "movie"): 2,
                ("movie", "was"): 2,
                ("was", "good"): 1,
                ("was", "bad"): 1,
            }
            prev = "<s>"
            logs = []
            for w in tokens:
                num = bigrams.get((prev, w), 0) + 0.5
                den = unigrams.get(prev, 0) + 0.5 * v
                logs.append(np.log(num / den))
                prev = w
            return float(np.exp(-np.mean(logs)))

        pp_orig = pp_of(["the", "movie", "was", "good"])
        pp_adv = pp_of(["the", "movie", "was", "bad"])
        expected = (pp_adv - pp_orig) / (pp_orig + cfg.eps_pp)
        assert got == pytest.approx(expected, rel=1e-10)

    def test_self_zero_property(self, train_corpus, test_corpus):
        model = BigramPerplexityModel(train_corpus)
        for text in test_corpus.texts[:10]:
            assert perplexity_increase(model, text, text) == 0.0


class TestGrammarErrorIncrease:
    def test_identical_zero(self):
        gc = RuleGrammarChecker()
        assert grammar_error_increase(gc, "fine text .", "fine text .") == 0

    def test_repeated_word_plus_one(self):
        gc = RuleGrammarChecker()
        assert grammar_error_increase(gc, "the the movie ends .", "the movie ends .") == 1

    def test_removed_terminal_plus_one(self):
        gc = RuleGrammarChecker()
        assert grammar_error_increase(gc, "the movie ends", "the movie ends .") == 1

    def test_can_be_negative(self):
        gc = RuleGrammarChecker()
        assert grammar_error_increase(gc, "the movie ends .", "the movie ends") == -1


class TestDistanceConfig:
    def test_defaults(self):
        cfg = DistanceConfig()
        assert cfg.eps_pp == 1e-6
        assert cfg.eps_ds == 1e-3

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            DistanceConfig(eps_pp=0.0)
        with pytest.raises(ValueError):
            DistanceConfig(eps_ds=-1.0)
