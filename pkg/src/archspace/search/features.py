"""Hashed structural features of terminal spaces."""

from __future__ import annotations

import json
from collections import defaultdict
from functools import lru_cache

import numpy as np

from ..core import SearchSpace
from ..rng import fnv1a64

NUM_BUCKETS = 1 << 14
MAX_PATH = 3


def render_value(v) -> str:
    return v if isinstance(v, str) else json.dumps(v)


def feature_tokens(space: SearchSpace) -> set:
    """Module-type paths of length 1..3 along edges (``"Conv2D>Concat"``) and
    ``"Type/name=value"`` for every module property (hyperparameters and
    constant configuration alike). Module ids never appear."""
    succ = defaultdict(set)
    for i, o in space.incoming.items():
        succ[o.module].add(i.module)
    tokens = set()
    types = {mid: m.type_name for mid, m in space.modules.items()}
    for mid, m in space.modules.items():
        frontier = [(mid, m.type_name)]
        for length in range(1, MAX_PATH + 1):
            tokens.update(path for _, path in frontier)
            if length < MAX_PATH:
                frontier = [(n, f"{path}>{types[n]}") for last, path in frontier for n in succ[last]]
        for name in m.hyperps:
            tokens.add(f"{m.type_name}/{name}={render_value(space.values[m.hyperps[name]])}")
        for name, v in m.config.items():
            tokens.add(f"{m.type_name}/{name}={render_value(v)}")
    return tokens


@lru_cache(maxsize=1 << 16)
def token_index(token: str) -> int:
    return fnv1a64(token) % NUM_BUCKETS


def extract_features(space: SearchSpace) -> np.ndarray:
    """Sorted active bucket indices of the binary feature vector."""
    return np.array(sorted({token_index(t) for t in feature_tokens(space)}), dtype=np.int64)


def dense_features(indices) -> np.ndarray:
    x = np.zeros(NUM_BUCKETS)
    x[np.asarray(indices, dtype=np.int64)] = 1.0
    return x
