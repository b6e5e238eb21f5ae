"""Monte Carlo tree search with UCT selection over assignment prefixes."""

from __future__ import annotations

import math

from .. import rng
from ..errors import SearcherStateError
from .base import Searcher, random_chooser
from .random_search import random_stream


class Node:
    """An assignment prefix. ``hyperp`` is the hyperparameter assigned next
    from here (None for terminal or not-yet-reached prefixes)."""

    __slots__ = ("hyperp", "children", "visits", "total")

    def __init__(self):
        self.hyperp = None
        self.children: dict = {}
        self.visits = 0
        self.total = 0.0

    @property
    def mean(self) -> float:
        return self.total / self.visits if self.visits else 0.0


class MCTSSearcher(Searcher):
    """Each sample walks the tree by UCT, expands one new node and finishes
    the assignment with a random rollout. Children without visits are tried
    (uniformly at random) before any visited sibling; UCT ties go to the
    lowest value index. Scores are assumed to lie in [0, 1]."""

    name = "mcts"

    def __init__(self, space_fn, seed: int = 0, depth_cap=None, exploration: float = 0.33):
        super().__init__(space_fn, seed, depth_cap)
        self.exploration = exploration
        self.root = Node()
        self._random = random_chooser(random_stream(self.seed))
        self._rng = rng.stream(self.seed, "search", "mcts")

    def select(self, node: Node, n: int) -> tuple:
        """Value index to follow from ``node``; the flag is True if it is unvisited."""
        fresh = [i for i in range(n) if i not in node.children or node.children[i].visits == 0]
        if fresh:
            return fresh[int(self._rng.integers(len(fresh)))], True
        log_n = math.log(node.visits)
        best, best_score = 0, -math.inf
        for i in range(n):
            c = node.children[i]
            score = c.mean + self.exploration * math.sqrt(log_n / c.visits)
            if score > best_score:
                best, best_score = i, score
        return best, False

    def sample(self):
        path = [self.root]
        in_tree = True

        def choose(h, domain, k):
            nonlocal in_tree
            if not in_tree:
                return self._random(h, domain, k)
            node = path[-1]
            if node.hyperp is None:
                node.hyperp = h
            elif node.hyperp != h:
                raise SearcherStateError(f"tree node expected {node.hyperp}, traversal offered {h}")
            i, fresh = self.select(node, len(domain))
            child = node.children.get(i)
            if child is None:
                child = node.children[i] = Node()
            path.append(child)
            if fresh:
                in_tree = False
            return i

        space, log = self._drive_fresh(choose)
        return self._issue(space, log, path)

    def update(self, score, token):
        path = self._redeem(token)
        for node in path:
            node.visits += 1
            node.total += float(score)
