from __future__ import annotations

from .. import rng
from .base import Searcher, random_chooser


def random_stream(seed: int):
    """Stream shared by every searcher for plain random completions, so a
    searcher that only ever samples randomly reproduces random search."""
    return rng.stream(seed, "search", "random")


class RandomSearcher(Searcher):
    """Uniform value for each independent hyperparameter in iterator order."""

    name = "random"

    def __init__(self, space_fn, seed: int = 0, depth_cap: int | None = None):
        super().__init__(space_fn, seed, depth_cap)
        self._choose = random_chooser(random_stream(self.seed))

    def sample(self):
        space, log = self._drive_fresh(self._choose)
        return self._issue(space, log)
