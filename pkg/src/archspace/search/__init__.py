"""Searchers, structural features and the enumeration oracle."""

from __future__ import annotations

from .base import SampleResult, Searcher, drive, random_chooser
from .enumerate import count_terminals, enumerate_terminals
from .evolution import EvolutionSearcher
from .features import NUM_BUCKETS, extract_features, feature_tokens
from .mcts import MCTSSearcher
from .random_search import RandomSearcher
from .smbo import RidgeSurrogate, SMBOSearcher

SEARCHERS = {
    "random": RandomSearcher,
    "evolution": EvolutionSearcher,
    "smbo": SMBOSearcher,
    "mcts": MCTSSearcher,
}


def make_searcher(name: str, space_fn, seed: int = 0, depth_cap=None, **params) -> Searcher:
    try:
        cls = SEARCHERS[name]
    except KeyError:
        raise KeyError(f"unknown searcher {name!r}; known: {', '.join(sorted(SEARCHERS))}") from None
    return cls(space_fn, seed=seed, depth_cap=depth_cap, **params)
