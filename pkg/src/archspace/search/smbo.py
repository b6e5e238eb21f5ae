"""Sequential model-based optimization with a ridge-regression surrogate."""

from __future__ import annotations

import numpy as np

from .. import rng
from .base import Searcher, random_chooser
from .features import NUM_BUCKETS, extract_features
from .random_search import random_stream


class RidgeSurrogate:
    """Linear model over binary hashed features.

    Solved in kernel form, ``w = X^T (X X^T + lam I)^{-1} (y - mean(y))``,
    which equals the normal-equation solution but costs O(n^3) in the
    number of observations instead of in the 2^14 feature dimension. The
    Gram entries are overlap counts of active buckets and grow by one row
    per observation.
    """

    def __init__(self, lam: float = 1e-3):
        self.lam = lam
        self.feats: list = []
        self.sets: list = []
        self.y: list = []
        self.gram = np.zeros((0, 0))
        self.w = np.zeros(NUM_BUCKETS)
        self.offset = 0.0

    def add(self, indices, score: float):
        s = set(int(i) for i in indices)
        row = np.array([len(s & t) for t in self.sets] + [len(s)], dtype=np.float64)
        n = len(self.sets)
        gram = np.zeros((n + 1, n + 1))
        gram[:n, :n] = self.gram
        gram[n, :] = row
        gram[:, n] = row
        self.gram = gram
        self.sets.append(s)
        self.feats.append(np.asarray(indices, dtype=np.int64))
        self.y.append(float(score))
        self.fit()

    def fit(self):
        y = np.array(self.y)
        self.offset = float(y.mean())
        alpha = np.linalg.solve(self.gram + self.lam * np.eye(len(y)), y - self.offset)
        w = np.zeros(NUM_BUCKETS)
        for a, idx in zip(alpha, self.feats):
            w[idx] += a
        self.w = w

    def predict(self, indices) -> float:
        return float(self.w[np.asarray(indices, dtype=np.int64)].sum()) + self.offset


class SMBOSearcher(Searcher):
    """With probability epsilon a random sample; otherwise the surrogate's
    favourite among ``num_candidates`` random samples (first one wins ties)."""

    name = "smbo"

    def __init__(self, space_fn, seed: int = 0, depth_cap=None, epsilon: float = 0.1,
                 num_candidates: int = 512, ridge_lambda: float = 1e-3):
        super().__init__(space_fn, seed, depth_cap)
        if num_candidates < 1:
            raise ValueError("num_candidates must be positive")
        self.epsilon = epsilon
        self.num_candidates = num_candidates
        self.surrogate = RidgeSurrogate(ridge_lambda)
        self._random = random_chooser(random_stream(self.seed))
        self._coin = rng.stream(self.seed, "search", "smbo", "coin")

    def sample(self):
        if self._coin.random() < self.epsilon:
            space, log = self._drive_fresh(self._random)
            return self._issue(space, log, extract_features(space))
        best = None
        for _ in range(self.num_candidates):
            space, log = self._drive_fresh(self._random)
            feats = extract_features(space)
            score = self.surrogate.predict(feats)
            if best is None or score > best[0]:
                best = (score, space, log, feats)
        _, space, log, feats = best
        return self._issue(space, log, feats)

    def update(self, score, token):
        feats = self._redeem(token)
        self.surrogate.add(feats, score)
