"""Exhaustive expansion of every reachable terminal space."""

from __future__ import annotations

from ..errors import DepthExceeded, StuckSearchSpace
from ..serialization import canonical
from ..transition import is_terminal, resolve, transition
from ..traversal import unassigned_independent


def _first(pending):
    return pending[0]


def enumerate_terminals(space_fn, depth_cap: int = 64, space=None, pick=_first) -> list:
    """All distinct terminal spaces reachable from ``space_fn()`` (or from
    ``space`` when given) as ``(assignment log, canonical serialization)``.

    Branches on every value of one hyperparameter of the unassigned
    independent iterator (the first, unless ``pick`` says otherwise), copying
    the space before each transition. Terminal spaces that are isomorphic up
    to ids are reported once.
    """
    if depth_cap < 1:
        raise ValueError("depth_cap must be at least 1")
    root = space_fn() if space is None else space.copy()
    resolve(root)
    out, seen = [], set()

    def visit(s, log, pending):
        if not pending:
            if not is_terminal(s):
                raise StuckSearchSpace("independent hyperparameters remain outside the traversal")
            key = canonical(s)
            if key not in seen:
                seen.add(key)
                out.append((list(log), key))
            return
        if len(log) >= depth_cap:
            raise DepthExceeded(f"a trajectory needs more than {depth_cap} assignments")
        h = pick(pending)
        children = []
        for v in s.hyperps[h].domain:
            child = s.copy()
            transition(child, h, v)
            children.append((v, child, unassigned_independent(child)))
        # Children with the most pending choices first, so that in an
        # unbounded space a trajectory over the cap is found on the first
        # descent instead of after every shorter terminal.
        children.sort(key=lambda c: -len(c[2]))
        for v, child, child_pending in children:
            log.append((h, v))
            visit(child, log, child_pending)
            log.pop()

    visit(root, [], unassigned_independent(root))
    return out


def count_terminals(space_fn, depth_cap: int = 64, pick=_first) -> int:
    return len(enumerate_terminals(space_fn, depth_cap, pick=pick))
