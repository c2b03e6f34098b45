import numpy as np
import pytest

from robattr.models import (
    ContextProposalModel,
    TrainConfig,
    train_reference_classifier,
)
from robattr.text import SplitSpec, make_fixture_corpus, split


@pytest.fixture(scope="session")
def corpus():
    return make_fixture_corpus(300, seed=7)


@pytest.fixture(scope="session")
def corpus_splits(corpus):
    return split(corpus, SplitSpec(seed=0))


@pytest.fixture(scope="session")
def train_corpus(corpus_splits):
    return corpus_splits[0]


@pytest.fixture(scope="session")
def test_corpus(corpus_splits):
    return corpus_splits[2]


@pytest.fixture(scope="session")
def cnn(corpus_splits):
    train, val, _ = corpus_splits
    return train_reference_classifier(train, "cnn", TrainConfig(seed=1), validation=val)


@pytest.fixture(scope="session")
def attention_model(corpus_splits):
    train, val, _ = corpus_splits
    return train_reference_classifier(
        train, "attention", TrainConfig(seed=1), validation=val
    )


@pytest.fixture(scope="session")
def distilled_mlm(train_corpus):
    return ContextProposalModel(train_corpus, "distilled", seed=0)


class LinearHandle:
    """Two-class handle whose class-0 score is linear in the embeddings:
    F_0(X) = sum_j w . x_j. Useful because path-integrated attributions are
    exact for it at any step count."""

    num_classes = 2

    def __init__(self, w):
        self.w = np.asarray(w, dtype=np.float64)
        self.dim = len(self.w)

    def embed(self, t):
        rng = np.random.default_rng(abs(hash(t.tokens)) % (2**32))
        return rng.standard_normal((len(t), self.dim))

    def predict_probs(self, x):
        f = float((x @ self.w).sum())
        return np.array([f, 1.0 - f])

    def gradient(self, x, class_id):
        sign = 1.0 if class_id == 0 else -1.0
        return sign * np.tile(self.w, (x.shape[0], 1))


@pytest.fixture
def linear_handle():
    return LinearHandle(w=np.array([0.3, -0.2, 0.5, 0.1]))
