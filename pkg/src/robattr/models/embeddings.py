"""Frozen word-embedding table derived from token hashes.

Stands in for a pretrained embedding matrix: vectors are deterministic
functions of the token string (stable across processes and machines) and
are never updated during training.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["HashedEmbeddings"]


class HashedEmbeddings:
    def __init__(self, dim: int = 32, salt: str = "frozen-v1"):
        self.dim = dim
        self.salt = salt
        self._cache: dict[str, np.ndarray] = {}

    def vector(self, token: str) -> np.ndarray:
        vec = self._cache.get(token)
        if vec is None:
            digest = hashlib.sha256(
                f"{self.salt}|{token}".encode("utf-8")
            ).digest()
            seed = int.from_bytes(digest[:8], "little")
            rng = np.random.default_rng(seed)
            vec = rng.standard_normal(self.dim) / np.sqrt(self.dim)
            vec.flags.writeable = False
            self._cache[token] = vec
        return vec

    def matrix(self, tokens) -> np.ndarray:
        """Stack token vectors into a (len(tokens) x dim) matrix."""
        if len(tokens) == 0:
            return np.zeros((0, self.dim))
        return np.stack([self.vector(tok) for tok in tokens])

    def table_hash(self) -> str:
        """Identity of the (virtual) embedding table, for checkpoint manifests."""
        return hashlib.sha256(f"{self.salt}|{self.dim}".encode()).hexdigest()[:16]
