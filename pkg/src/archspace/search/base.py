"""Searcher interface and the shared loop that drives a space to terminality."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..core import SearchSpace
from ..errors import DepthExceeded, SearcherStateError, StuckSearchSpace, UnknownToken
from ..transition import is_terminal, resolve, transition
from ..traversal import unassigned_independent

# choose(hyperparameter id, domain, position in the log) -> index into domain
Chooser = Callable[[str, tuple, int], int]


@dataclass
class SampleResult:
    space: SearchSpace
    log: list
    token: int


def drive(space: SearchSpace, choose: Chooser, depth_cap: int | None = None) -> list:
    """Assign every unassigned independent hyperparameter in place.

    Works in passes: each pass takes a snapshot of the ordered unassigned
    independent hyperparameters and assigns them in that order, skipping any
    a previous assignment in the pass already made irrelevant; passes repeat
    until the iterator is empty. Returns the assignment log.
    """
    resolve(space)
    log = []
    while True:
        pending = unassigned_independent(space)
        if not pending:
            if not is_terminal(space):
                raise StuckSearchSpace(
                    "independent hyperparameters remain that no named output depends on: "
                    f"{sorted(h for h in space.independent_ids() if h not in space.values)}"
                )
            return log
        for h in pending:
            if h not in space.hyperps or h in space.values:
                continue
            if depth_cap is not None and len(log) >= depth_cap:
                raise DepthExceeded(f"more than {depth_cap} assignments needed to reach a terminal space")
            domain = space.hyperps[h].domain
            v = domain[choose(h, domain, len(log))]
            transition(space, h, v)
            log.append((h, v))


def random_chooser(gen) -> Chooser:
    return lambda h, domain, pos: int(gen.integers(len(domain)))


class Searcher:
    """Base class: ``sample()`` returns a terminal space with its assignment
    log and a token; ``update(score, token)`` reports that sample's score."""

    name = "searcher"

    def __init__(self, space_fn, seed: int = 0, depth_cap: int | None = None):
        self.space_fn = space_fn
        self.seed = int(seed)
        self.depth_cap = depth_cap
        self._next_token = 0
        self._pending: dict = {}

    def _issue(self, space, log, info=None) -> SampleResult:
        token = self._next_token
        self._next_token += 1
        self._pending[token] = info
        return SampleResult(space, log, token)

    def _redeem(self, token):
        if self._next_token == 0:
            raise SearcherStateError("update called before any sample")
        if token not in self._pending:
            raise UnknownToken(f"token {token!r} was not issued by this searcher or was already used")
        return self._pending.pop(token)

    def _drive_fresh(self, choose: Chooser) -> tuple:
        space = self.space_fn()
        log = drive(space, choose, self.depth_cap)
        return space, log

    def sample(self) -> SampleResult:
        raise NotImplementedError

    def update(self, score: float, token) -> None:
        self._redeem(token)
