import numpy as np
import pytest

from robattr.models import (
    BigramPerplexityModel,
    CandidateSet,
    ContextProposalModel,
    EntropyPerplexityModel,
    DistributionalSentenceEncoder,
    HashedEmbeddings,
    RuleGrammarChecker,
    TrainConfig,
    TrainingError,
    build_proposal_model,
    build_sentence_encoder,
    load_classifier,
    save_classifier,
    train_reference_classifier,
    zero_token_embedding,
    RegistryError,
)
from robattr.models.registry import build_grammar_checker, build_perplexity_model
from robattr.text import RawCorpus, tokenize_aligned


class TestEmbeddings:
    def test_deterministic_across_instances(self):
        a = HashedEmbeddings(dim=16).vector("movie")
        b = HashedEmbeddings(dim=16).vector("movie")
        np.testing.assert_array_equal(a, b)

    def test_distinct_tokens_distinct_vectors(self):
        emb = HashedEmbeddings(dim=16)
        assert not np.allclose(emb.vector("movie"), emb.vector("film"))

    def test_matrix_shape(self):
        emb = HashedEmbeddings(dim=8)
        assert emb.matrix(["a", "b", "c"]).shape == (3, 8)


class TestZeroTokenEmbedding:
    def test_middle_row_zeroed(self, cnn):
        t = tokenize_aligned("wonderful movie tonight")
        x = cnn.embed(t)
        z = zero_token_embedding(cnn, t, 1)
        assert np.all(z[1] == 0)
        np.testing.assert_array_equal(z[0], x[0])
        np.testing.assert_array_equal(z[2], x[2])

    def test_single_token_all_zero(self, cnn):
        t = tokenize_aligned("word")
        z = zero_token_embedding(cnn, t, 0)
        assert np.all(z == 0)

    def test_norm_shrinks(self, cnn):
        t = tokenize_aligned("wonderful movie tonight")
        x = cnn.embed(t)
        z = zero_token_embedding(cnn, t, 0)
        assert np.linalg.norm(z) < np.linalg.norm(x)

    def test_out_of_range(self, cnn):
        t = tokenize_aligned("word")
        with pytest.raises(IndexError):
            zero_token_embedding(cnn, t, 3)


class TestClassifierContract:
    @pytest.mark.parametrize("model_name", ["cnn", "attention_model"])
    def test_probs_simplex(self, model_name, request, test_corpus):
        model = request.getfixturevalue(model_name)
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(1, 20))
            x = rng.standard_normal((n, model.embeddings.dim))
            probs = model.predict_probs(x)
            assert np.all(probs >= 0)
            assert abs(probs.sum() - 1.0) < 1e-5

    @pytest.mark.parametrize("model_name", ["cnn", "attention_model"])
    def test_gradient_matches_finite_differences(self, model_name, request):
        model = request.getfixturevalue(model_name)
        rng = np.random.default_rng(42)
        h = 1e-5
        for _ in range(20):
            n = int(rng.integers(2, 12))
            x = rng.standard_normal((n, model.embeddings.dim))
            direction = rng.standard_normal(x.shape)
            direction /= np.linalg.norm(direction)
            class_id = int(rng.integers(model.num_classes))
            fd = (
                model.predict_probs(x + h * direction)[class_id]
                - model.predict_probs(x - h * direction)[class_id]
            ) / (2 * h)
            analytic = float((model.gradient(x, class_id) * direction).sum())
            assert abs(fd - analytic) <= 1e-3 * max(abs(fd), abs(analytic), 1e-6)

    def test_beats_majority_baseline(self, cnn, attention_model):
        assert cnn.accuracy > 0.5
        assert attention_model.accuracy > 0.5

    def test_training_deterministic(self, corpus_splits):
        train, val, _ = corpus_splits
        a = train_reference_classifier(train, "cnn", TrainConfig(seed=3), validation=val)
        b = train_reference_classifier(train, "cnn", TrainConfig(seed=3), validation=val)
        assert a.weights_hash() == b.weights_hash()

    def test_shuffled_labels_raise(self, corpus_splits):
        train, val, _ = corpus_splits
        rng = np.random.default_rng(0)
        shuffled = RawCorpus(
            [
                (text, int(rng.integers(2)))
                for text, _ in train.samples
            ],
            train.label_names,
        )
        shuffled_val = RawCorpus(
            [(text, int(rng.integers(2))) for text, _ in val.samples],
            val.label_names,
        )
        with pytest.raises(TrainingError) as err:
            train_reference_classifier(
                shuffled, "cnn", TrainConfig(seed=0, max_epochs=4), validation=shuffled_val
            )
        assert 0.0 <= err.value.accuracy <= 1.0

    def test_attention_weights_one_per_token(self, attention_model):
        t = tokenize_aligned("a wonderful movie with a dreadful ending")
        x = attention_model.embed(t)
        alpha = attention_model.attention_weights(x)
        assert alpha.shape == (len(t),)
        assert abs(alpha.sum() - 1.0) < 1e-9

    def test_cnn_has_no_attention(self, cnn):
        t = tokenize_aligned("some words here")
        with pytest.raises(AttributeError):
            cnn.attention_weights(cnn.embed(t))

    def test_checkpoint_roundtrip(self, cnn, tmp_path):
        save_classifier(cnn, tmp_path / "ckpt")
        loaded = load_classifier(tmp_path / "ckpt")
        assert loaded.weights_hash() == cnn.weights_hash()
        t = tokenize_aligned("a wonderful movie")
        np.testing.assert_array_equal(
            loaded.predict_probs(loaded.embed(t)), cnn.predict_probs(cnn.embed(t))
        )

    def test_checkpoint_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_classifier(tmp_path / "absent")


class TestCandidateSet:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            CandidateSet({0: [("a", 0.1), ("b", 0.5)]})

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            CandidateSet({0: [("a", 0.5), ("a", 0.1)]})

    def test_candidates_accessor(self):
        cs = CandidateSet({2: [("x", 1.0), ("y", 0.5)]})
        assert cs.candidates(2) == ["x", "y"]
        assert cs.candidates(5) == []


class TestProposalModel:
    def test_query_counter_increments_once_per_call(self, distilled_mlm, test_corpus):
        t = tokenize_aligned(test_corpus.texts[0])
        before = distilled_mlm.query_count
        distilled_mlm.propose(t, {0, 1, 2}, 5)
        assert distilled_mlm.query_count == before + 1
        distilled_mlm.propose(t, {0}, 5)
        assert distilled_mlm.query_count == before + 2

    def test_candidate_rules(self, distilled_mlm, test_corpus):
        for text in test_corpus.texts[:5]:
            t = tokenize_aligned(text)
            masked = {0, min(3, len(t) - 1)}
            cands = distilled_mlm.propose(t, masked, 10)
            for index in masked:
                got = cands.per_position[index]
                assert len(got) <= 10
                words = [w for w, _ in got]
                assert t.tokens[index].lower() not in words
                assert "[MASK]" not in words
                assert all(any(ch.isalnum() for ch in w) for w in words)
                scores = [s for _, s in got]
                assert scores == sorted(scores, reverse=True)

    def test_deterministic(self, train_corpus, test_corpus):
        a = ContextProposalModel(train_corpus, "distilled", seed=0)
        b = ContextProposalModel(train_corpus, "distilled", seed=0)
        t = tokenize_aligned(test_corpus.texts[0])
        assert a.propose(t, {1, 2}, 8).per_position == b.propose(t, {1, 2}, 8).per_position

    def test_full_variant_larger_vocab(self, train_corpus):
        full = ContextProposalModel(train_corpus, "full", seed=0)
        distilled = ContextProposalModel(train_corpus, "distilled", seed=0)
        assert len(full.vocab) >= len(distilled.vocab)

    def test_masked_index_out_of_range(self, distilled_mlm):
        t = tokenize_aligned("short text")
        with pytest.raises(IndexError):
            distilled_mlm.propose(t, {40}, 3)

    def test_query_counter_atomic_under_threads(self, train_corpus):
        from concurrent.futures import ThreadPoolExecutor

        model = ContextProposalModel(train_corpus, "distilled", seed=0)
        t = tokenize_aligned("i watched the wonderful movie tonight .")
        calls = 64
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda _: model.propose(t, {1, 3}, 4), range(calls)))
        assert model.query_count == calls


class TestSentenceEncoder:
    def test_dim_constant_and_deterministic(self, train_corpus):
        enc = DistributionalSentenceEncoder(dim=64, corpus=train_corpus)
        a = enc.encode("a wonderful movie")
        b = enc.encode("a wonderful movie")
        assert a.shape == (64,)
        np.testing.assert_array_equal(a, b)

    def test_different_texts_differ(self, train_corpus):
        enc = DistributionalSentenceEncoder(dim=64, corpus=train_corpus)
        a = enc.encode("a wonderful movie")
        b = enc.encode("a dreadful movie")
        assert not np.allclose(a, b)

    def test_unit_norm(self, train_corpus):
        enc = DistributionalSentenceEncoder(dim=64, corpus=train_corpus)
        assert abs(np.linalg.norm(enc.encode("some words here")) - 1.0) < 1e-9

    def test_in_context_word_closer_than_oov(self, train_corpus):
        # distributional smoothing should keep corpus words nearer each other
        # than a word the corpus never saw
        enc = DistributionalSentenceEncoder(dim=128, corpus=train_corpus)
        base = "i watched the wonderful movie ."
        in_vocab = "i watched the superb movie ."
        oov = "i watched the zyxwv movie ."
        cos_in = float(enc.encode(base) @ enc.encode(in_vocab))
        cos_oov = float(enc.encode(base) @ enc.encode(oov))
        assert cos_in > cos_oov


class TestPerplexity:
    def test_positive_and_deterministic(self, train_corpus, test_corpus):
        model = BigramPerplexityModel(train_corpus)
        for text in test_corpus.texts[:5]:
            pp = model.perplexity(text)
            assert pp > 0
            assert model.perplexity(text) == pp

    def test_hand_computed_bigram(self):
        # corpus: "a b", "a c" -> vocab {a,b,c}, V = 5 with <s> and <unk>
        # counts: (<s>,a)=2, (a,b)=1, (a,c)=1; unigrams <s>=2, a=2, b=1, c=1
        corpus = RawCorpus([("a b", 0), ("a c", 1)], ["x", "y"])
        model = BigramPerplexityModel(corpus, alpha=0.5)
        v = 5
        p_a = (2 + 0.5) / (2 + 0.5 * v)
        p_b = (1 + 0.5) / (2 + 0.5 * v)
        expected = float(np.exp(-np.mean(np.log([p_a, p_b]))))
        assert model.perplexity("a b") == pytest.approx(expected, rel=1e-12)

    def test_unseen_word_raises_perplexity(self, train_corpus):
        model = BigramPerplexityModel(train_corpus)
        fluent = "i watched the wonderful movie ."
        weird = "i watched the zyxwv movie ."
        assert model.perplexity(weird) > model.perplexity(fluent)

    def test_entropy_variant_positive(self, train_corpus):
        model = EntropyPerplexityModel(train_corpus)
        assert model.perplexity("i watched the movie .") > 0


class TestGrammarChecker:
    def test_empty_is_zero(self):
        assert RuleGrammarChecker().error_count("") == 0

    def test_repeated_word(self):
        checker = RuleGrammarChecker()
        base = checker.error_count("the movie was fine .")
        assert checker.error_count("the the movie was fine .") == base + 1

    def test_missing_terminal(self):
        checker = RuleGrammarChecker()
        assert (
            checker.error_count("the movie was fine")
            == checker.error_count("the movie was fine .") + 1
        )

    def test_unmatched_quote(self):
        checker = RuleGrammarChecker()
        assert checker.error_count('he said "stop .') == checker.error_count(
            'he said "stop" .'
        ) + 1

    def test_determiner_number(self):
        checker = RuleGrammarChecker()
        assert checker.error_count("a movies .") == 1
        assert checker.error_count("these movie .") == 1
        assert checker.error_count("a movie .") == 0

    def test_deterministic(self):
        checker = RuleGrammarChecker()
        text = "these movie movie was fine"
        assert checker.error_count(text) == checker.error_count(text)


class TestRegistry:
    def test_known_names(self, train_corpus):
        assert build_sentence_encoder("use_like", train_corpus).dim == 256
        assert build_sentence_encoder("minilm_like", train_corpus).dim == 128
        assert build_proposal_model("distilled", train_corpus).variant == "distilled"
        assert build_perplexity_model("bigram", train_corpus).perplexity("a .") > 0
        assert build_grammar_checker("rules", train_corpus).error_count("") == 0

    def test_unknown_name(self, train_corpus):
        with pytest.raises(RegistryError):
            build_sentence_encoder("nope", train_corpus)
