"""Regularized (aging) evolution over assignment logs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .. import rng
from ..errors import SearcherStateError
from ..registry import value_key
from .base import Searcher, random_chooser
from .random_search import random_stream


@dataclass
class Member:
    space: object
    log: list
    score: float
    born: int  # insertion index


class EvolutionSearcher(Searcher):
    """Random samples until the population is full; then the best of a random
    tournament is mutated and the oldest member is discarded.

    Mutation picks a position of the parent's log uniformly (moving forward,
    cyclically, past singleton domains), replays everything before it, forces
    a different value there and completes the rest randomly. Values after
    the mutated position are not reused because they may refer to
    hyperparameters that only exist because of earlier choices.
    """

    name = "evolution"

    def __init__(self, space_fn, seed: int = 0, depth_cap=None, population_size: int = 100, sample_size: int = 25):
        super().__init__(space_fn, seed, depth_cap)
        if population_size < 1 or sample_size < 1:
            raise ValueError("population_size and sample_size must be positive")
        self.population_size = population_size
        self.sample_size = sample_size
        self.population: deque = deque()
        self._born = 0
        self.last_mutation = None
        self._random = random_chooser(random_stream(self.seed))
        self._rng = rng.stream(self.seed, "search", "evolution")

    def sample(self):
        if len(self.population) + len(self._pending) < self.population_size:
            space, log = self._drive_fresh(self._random)
            return self._issue(space, log, (space, log))
        if not self.population:
            raise SearcherStateError("the tournament needs scored members; call update first")
        parent = self.tournament()
        choose, pos = self.mutation_chooser(parent)
        self.last_mutation = (parent, pos)
        space, log = self._drive_fresh(choose)
        return self._issue(space, log, (space, log))

    def tournament(self) -> Member:
        k = min(self.sample_size, len(self.population))
        picks = self._rng.choice(len(self.population), size=k, replace=False)
        best = None
        for i in picks:
            m = self.population[int(i)]
            if best is None or m.score > best.score:
                best = m
        return best

    def mutation_position(self, parent: Member):
        """Index of the log entry to change, or None if every domain is a singleton."""
        log = parent.log
        if not log:
            return None
        start = int(self._rng.integers(len(log)))
        for step in range(len(log)):
            i = (start + step) % len(log)
            if len(parent.space.hyperps[log[i][0]].domain) > 1:
                return i
        return None

    def mutation_chooser(self, parent: Member):
        log = parent.log
        pos = self.mutation_position(parent)
        cut = len(log) if pos is None else pos

        def choose(h, domain, k):
            if k <= cut and k < len(log):
                if log[k][0] != h:
                    raise SearcherStateError(f"replay diverged at position {k}: expected {log[k][0]}, got {h}")
                want = value_key(log[k][1])
                old = next(j for j, v in enumerate(domain) if value_key(v) == want)
                if k < cut:
                    return old
                j = int(self._rng.integers(len(domain) - 1))
                return j + 1 if j >= old else j
            return self._random(h, domain, k)

        return choose, pos

    def update(self, score, token):
        space, log = self._redeem(token)
        self.population.append(Member(space, log, float(score), self._born))
        self._born += 1
        while len(self.population) > self.population_size:
            self.population.popleft()
