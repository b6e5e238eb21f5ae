"""Deterministic orders over modules and hyperparameters.

Local and global names are compared as plain strings, so ``"in10" < "in2"``.
"""

from __future__ import annotations

import heapq
from collections import defaultdict

from .core import Input, Output, SearchSpace
from .errors import GraphCycle, InvalidOutputNaming, UnreachableRequiredInput


def _check_output_naming(space: SearchSpace, outputs) -> dict:
    if outputs is None:
        outputs = space.outputs
    connected = set(space.incoming.values())
    for name, port in outputs.items():
        if not isinstance(port, Output):
            raise InvalidOutputNaming(f"{name!r} -> {port!r} is not an output port")
        m = space.modules.get(port.module)
        if m is None or port.name not in m.outputs:
            raise InvalidOutputNaming(f"{name!r} -> {port} does not exist")
        if port in connected:
            raise InvalidOutputNaming(f"{name!r} -> {port} is connected")
    return outputs


def ordered_modules(space: SearchSpace, outputs=None) -> list:
    """Modules reachable backwards from the named outputs, in the unique
    breadth-first order seeded by the output names."""
    outputs = _check_output_naming(space, outputs)
    order, seen = [], set()
    for name in sorted(outputs):
        mid = outputs[name].module
        if mid not in seen:
            seen.add(mid)
            order.append(mid)
    k = 0
    while k < len(order):
        m = space.modules[order[k]]
        for local in sorted(m.inputs):
            src = space.incoming.get(Input(m.id, local))
            if src is not None and src.module not in seen:
                seen.add(src.module)
                order.append(src.module)
        k += 1
    return order


def ordered_hyperps(space: SearchSpace, outputs=None) -> list:
    order, seen = [], set()
    for mid in ordered_modules(space, outputs):
        hyperps = space.modules[mid].hyperps
        for local in sorted(hyperps):
            h = hyperps[local]
            if h not in seen:
                seen.add(h)
                order.append(h)
    # the list grows while being scanned: parents of late-found dependents are included too
    k = 0
    while k < len(order):
        hp = space.hyperps[order[k]]
        if not hp.is_independent:
            for local in sorted(hp.parents):
                h = hp.parents[local]
                if h not in seen:
                    seen.add(h)
                    order.append(h)
        k += 1
    return order


def unassigned_independent(space: SearchSpace, outputs=None) -> list:
    return [
        h
        for h in ordered_hyperps(space, outputs)
        if h not in space.values and space.hyperps[h].is_independent
    ]


def module_eval_seq(space: SearchSpace, inputs=None, outputs=None) -> list:
    """Topological order of the modules needed to compute the named outputs.

    Every unconnected input of a needed module must be one of the named
    inputs. Ties are broken by module id.
    """
    if inputs is None:
        inputs = space.inputs
    needed = ordered_modules(space, outputs)
    needed_set = set(needed)
    named_inputs = set(inputs.values())
    indegree = {}
    successors = defaultdict(list)
    for mid in needed:
        m = space.modules[mid]
        count = 0
        for local in m.inputs:
            port = Input(mid, local)
            src = space.incoming.get(port)
            if src is None:
                if port not in named_inputs:
                    raise UnreachableRequiredInput(f"{port} is neither connected nor a named input")
                continue
            count += 1
            successors[src.module].append(mid)
        indegree[mid] = count
    heap = [mid for mid in needed if indegree[mid] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        mid = heapq.heappop(heap)
        order.append(mid)
        for nxt in successors[mid]:
            if nxt in needed_set:
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    heapq.heappush(heap, nxt)
    if len(order) != len(needed):
        stuck = sorted(needed_set - set(order))
        raise GraphCycle(f"module graph has a cycle through {stuck}")
    return order
