"""Desk-scale reference text classifiers.

Two architectures over a frozen hash-embedding table:

* ``cnn`` - width-3 convolution, tanh, mean pooling, linear head.
* ``attention`` - additive attention over token embeddings, linear head.

Both expose exact analytic input gradients (tanh everywhere, no kinks), so
finite-difference checks agree tightly. Only the head/feature parameters
train; embeddings stay fixed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..text import RawCorpus, TokenizedText, tokenize_aligned
from .embeddings import HashedEmbeddings

__all__ = [
    "ReferenceClassifier",
    "TrainConfig",
    "TrainingError",
    "train_reference_classifier",
    "save_classifier",
    "load_classifier",
]

ARCHITECTURES = ("cnn", "attention")


class TrainingError(RuntimeError):
    def __init__(self, message: str, accuracy: float):
        super().__init__(message)
        self.accuracy = accuracy


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    hidden: int = 16
    embed_dim: int = 32
    max_epochs: int = 40
    batch_size: int = 16
    learning_rate: float = 1e-2
    patience: int = 5


class ReferenceClassifier:
    def __init__(
        self,
        arch: str,
        num_classes: int,
        label_names: list[str],
        params: dict[str, np.ndarray],
        embeddings: HashedEmbeddings,
        seed: int = 0,
        accuracy: float = float("nan"),
    ):
        if arch not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {arch!r}")
        self.arch = arch
        self.num_classes = num_classes
        self.label_names = list(label_names)
        self.params = params
        self.embeddings = embeddings
        self.seed = seed
        self.accuracy = accuracy

    # ------------------------------------------------------------------
    # handle interface
    # ------------------------------------------------------------------

    def embed(self, t: TokenizedText) -> np.ndarray:
        return self.embeddings.matrix(t.tokens)

    def predict_probs(self, x: np.ndarray) -> np.ndarray:
        _, _, probs = self._forward(x)
        return probs

    def gradient(self, x: np.ndarray, class_id: int) -> np.ndarray:
        if not (0 <= class_id < self.num_classes):
            raise IndexError(f"class id {class_id} out of range")
        return self._input_gradient(x, class_id)

    def attention_weights(self, x: np.ndarray) -> np.ndarray:
        if self.arch != "attention":
            raise AttributeError("classifier has no attention layer")
        _, cache, _ = self._forward(x)
        return cache["alpha"]

    def predict(self, t: TokenizedText) -> int:
        return int(np.argmax(self.predict_probs(self.embed(t))))

    def predict_text(self, text: str) -> int:
        return self.predict(tokenize_aligned(text))

    # ------------------------------------------------------------------
    # forward / backward
    # ------------------------------------------------------------------

    def _forward(self, x: np.ndarray):
        p = self.params
        if x.ndim != 2:
            raise ValueError("expected a (tokens x dim) embedding matrix")
        if self.arch == "cnn":
            u = _windows(x)  # (n, 3d)
            h = np.tanh(u @ p["W"].T + p["b"])  # (n, hidden)
            pooled = h.mean(axis=0)
            z = p["V"] @ pooled + p["c"]
            cache = {"u": u, "h": h, "pooled": pooled}
        else:
            pre = x @ p["Wa"].T + p["ba"]  # (n, hidden)
            th = np.tanh(pre)
            e = th @ p["v"]  # (n,)
            alpha = _softmax(e)
            ctx = alpha @ x  # (d,)
            z = p["V"] @ ctx + p["c"]
            cache = {"th": th, "alpha": alpha, "ctx": ctx}
        probs = _softmax(z)
        return z, cache, probs

    def _input_gradient(self, x: np.ndarray, class_id: int) -> np.ndarray:
        p = self.params
        _, cache, probs = self._forward(x)
        g_z = probs[class_id] * (_onehot(class_id, self.num_classes) - probs)
        if self.arch == "cnn":
            n = x.shape[0]
            g_pooled = p["V"].T @ g_z
            g_h = np.tile(g_pooled / n, (n, 1))
            g_a = g_h * (1.0 - cache["h"] ** 2)
            g_u = g_a @ p["W"]  # (n, 3d)
            return _scatter_windows(g_u, x.shape)
        alpha, th = cache["alpha"], cache["th"]
        g_ctx = p["V"].T @ g_z
        s = x @ g_ctx  # (n,)
        g_e = alpha * (s - float(alpha @ s))
        q = ((1.0 - th**2) * p["v"]) @ p["Wa"]  # (n, d)
        return alpha[:, None] * g_ctx[None, :] + g_e[:, None] * q

    def _loss_grads(self, x: np.ndarray, label: int):
        """Cross-entropy loss and parameter gradients for one sample."""
        p = self.params
        _, cache, probs = self._forward(x)
        loss = -float(np.log(max(probs[label], 1e-12)))
        g_z = probs - _onehot(label, self.num_classes)
        grads: dict[str, np.ndarray] = {}
        if self.arch == "cnn":
            n = x.shape[0]
            grads["V"] = np.outer(g_z, cache["pooled"])
            grads["c"] = g_z
            g_pooled = p["V"].T @ g_z
            g_h = np.tile(g_pooled / n, (n, 1))
            g_a = g_h * (1.0 - cache["h"] ** 2)
            grads["W"] = g_a.T @ cache["u"]
            grads["b"] = g_a.sum(axis=0)
        else:
            alpha, th, ctx = cache["alpha"], cache["th"], cache["ctx"]
            grads["V"] = np.outer(g_z, ctx)
            grads["c"] = g_z
            g_ctx = p["V"].T @ g_z
            s = x @ g_ctx
            g_e = alpha * (s - float(alpha @ s))
            dpre = (1.0 - th**2) * p["v"]  # (n, hidden)
            grads["v"] = th.T @ g_e
            grads["Wa"] = (g_e[:, None] * dpre).T @ x
            grads["ba"] = (g_e[:, None] * dpre).sum(axis=0)
        return loss, grads

    def weights_hash(self) -> str:
        hasher = hashlib.sha256()
        for key in sorted(self.params):
            hasher.update(key.encode())
            hasher.update(np.ascontiguousarray(self.params[key]).tobytes())
        return hasher.hexdigest()


def _windows(x: np.ndarray) -> np.ndarray:
    """Concatenate each token's embedding with its zero-padded neighbors."""
    n, d = x.shape
    padded = np.vstack([np.zeros((1, d)), x, np.zeros((1, d))])
    return np.hstack([padded[:n], padded[1 : n + 1], padded[2 : n + 2]])


def _scatter_windows(g_u: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    n, d = shape
    g_x = np.zeros(shape)
    left, mid, right = g_u[:, :d], g_u[:, d : 2 * d], g_u[:, 2 * d :]
    g_x += mid
    g_x[: n - 1] += left[1:]
    g_x[1:] += right[: n - 1]
    return g_x


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def _onehot(i: int, n: int) -> np.ndarray:
    v = np.zeros(n)
    v[i] = 1.0
    return v


def _init_params(
    arch: str, num_classes: int, cfg: TrainConfig, rng: np.random.Generator
) -> dict[str, np.ndarray]:
    d, h = cfg.embed_dim, cfg.hidden
    scale = 0.3
    params = {
        "V": rng.standard_normal((num_classes, h if arch == "cnn" else d)) * scale,
        "c": np.zeros(num_classes),
    }
    if arch == "cnn":
        params["W"] = rng.standard_normal((h, 3 * d)) * scale
        params["b"] = np.zeros(h)
    else:
        params["Wa"] = rng.standard_normal((h, d)) * scale
        params["ba"] = np.zeros(h)
        params["v"] = rng.standard_normal(h) * scale
    return params


class _Adam:
    def __init__(self, params: dict[str, np.ndarray], lr: float):
        self.lr = lr
        self.beta1, self.beta2, self.eps = 0.9, 0.999, 1e-8
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
        self.t += 1
        for k, g in grads.items():
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            m_hat = self.m[k] / (1 - self.beta1**self.t)
            v_hat = self.v[k] / (1 - self.beta2**self.t)
            params[k] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _accuracy(model: ReferenceClassifier, samples) -> float:
    if not samples:
        return 0.0
    hits = sum(1 for t, label in samples if model.predict(t) == label)
    return hits / len(samples)


def train_reference_classifier(
    corpus: RawCorpus,
    arch: str,
    config: TrainConfig | None = None,
    validation: RawCorpus | None = None,
) -> ReferenceClassifier:
    """Train a reference classifier with cross-entropy and early stopping.

    Deterministic under a fixed config seed. Raises TrainingError (carrying
    the accuracy reached) when validation accuracy never clears the
    majority-class baseline.
    """
    cfg = config or TrainConfig()
    if arch not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {arch!r}")
    if len(set(corpus.labels)) < 2:
        raise ValueError("training corpus must contain at least 2 classes")
    if len(corpus) < 100:
        raise ValueError("training corpus must contain at least 100 samples")

    rng = np.random.default_rng(cfg.seed)
    num_classes = len(corpus.label_names)
    embeddings = HashedEmbeddings(dim=cfg.embed_dim)
    params = _init_params(arch, num_classes, cfg, rng)
    model = ReferenceClassifier(
        arch, num_classes, corpus.label_names, params, embeddings, seed=cfg.seed
    )

    train_samples = [(tokenize_aligned(t), l) for t, l in corpus.samples]
    if validation is not None and len(validation) > 0:
        val_samples = [(tokenize_aligned(t), l) for t, l in validation.samples]
        val_labels = validation.labels
    else:
        # hold out a deterministic tail of the training data
        k = max(10, len(train_samples) // 5)
        val_samples = train_samples[-k:]
        train_samples = train_samples[:-k]
        val_labels = [l for _, l in val_samples]

    counts = np.bincount(val_labels, minlength=num_classes)
    baseline = counts.max() / counts.sum()

    optimizer = _Adam(params, cfg.learning_rate)
    best_acc = -1.0
    best_params = None
    stale = 0
    for _ in range(cfg.max_epochs):
        order = rng.permutation(len(train_samples))
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            acc_grads: dict[str, np.ndarray] | None = None
            for idx in batch:
                t, label = train_samples[idx]
                _, grads = model._loss_grads(model.embed(t), label)
                if acc_grads is None:
                    acc_grads = grads
                else:
                    for key, g in grads.items():
                        acc_grads[key] += g
            assert acc_grads is not None
            for key in acc_grads:
                acc_grads[key] /= len(batch)
            optimizer.step(params, acc_grads)
        val_acc = _accuracy(model, val_samples)
        if val_acc > best_acc:
            best_acc = val_acc
            best_params = {k: v.copy() for k, v in params.items()}
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    if best_params is not None:
        model.params = best_params
    if best_acc <= baseline:
        raise TrainingError(
            f"validation accuracy {best_acc:.3f} did not beat the "
            f"majority baseline {baseline:.3f}",
            accuracy=best_acc,
        )
    model.accuracy = best_acc
    return model


# ---------------------------------------------------------------------------
# checkpointing
# ---------------------------------------------------------------------------


def save_classifier(model: ReferenceClassifier, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    np.savez(directory / "weights.npz", **model.params)
    manifest = {
        "architecture": model.arch,
        "num_classes": model.num_classes,
        "label_names": model.label_names,
        "embed_dim": model.embeddings.dim,
        "embed_salt": model.embeddings.salt,
        "vocab_hash": model.embeddings.table_hash(),
        "seed": model.seed,
        "accuracy": model.accuracy,
        "weights_hash": model.weights_hash(),
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return directory


def load_classifier(directory: str | Path) -> ReferenceClassifier:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no classifier manifest in {directory}")
    manifest = json.loads(manifest_path.read_text())
    with np.load(directory / "weights.npz") as data:
        params = {k: data[k].copy() for k in data.files}
    embeddings = HashedEmbeddings(
        dim=manifest["embed_dim"], salt=manifest["embed_salt"]
    )
    model = ReferenceClassifier(
        manifest["architecture"],
        manifest["num_classes"],
        manifest["label_names"],
        params,
        embeddings,
        seed=manifest["seed"],
        accuracy=manifest["accuracy"],
    )
    if model.weights_hash() != manifest["weights_hash"]:
        raise ValueError(f"weights hash mismatch in {directory}")
    return model
