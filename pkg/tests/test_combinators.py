from __future__ import annotations

import itertools
import math

import pytest

from archspace import D, SearchSpace, make_space, transition
from archspace.combinators import (
    enas_cell,
    lstm_cell,
    maybe_one_more,
    rnn_cell,
    siso_optional,
    siso_or,
    siso_repeat,
    siso_sequential,
    siso_split_combine,
)
from archspace.core import Fragment
from archspace.errors import ArityMismatch, DomainMismatch, NonPositiveRepeat
from archspace.modules import add, avg, concat, dense, identity, relu, tanh
from archspace.registry import constructor, thunk
from archspace.search import count_terminals, enumerate_terminals
from archspace.serialization import canonical
from archspace.spaces import build_space, space_fn
from archspace.transition import is_terminal
from archspace.traversal import unassigned_independent

from conftest import type_multiset


def _space(build):
    s = SearchSpace()
    s.set_io(build(s))
    return s


def test_or_picks_branch():
    s = _space(lambda s: siso_or(s, [thunk(relu), thunk(tanh)], D([0, 1])))
    assert s.basic_ids() == set()
    transition(s, "IH-1", 0)
    assert type_multiset(s) == ["ReLU"]
    s = _space(lambda s: siso_or(s, [thunk(relu)], D([0])))
    transition(s, "IH-1", 0)
    assert type_multiset(s) == ["ReLU"]
    with pytest.raises(DomainMismatch):
        _space(lambda s: siso_or(s, [thunk(relu), thunk(tanh)], D([0, 1, 2])))


def test_optional():
    with pytest.raises(DomainMismatch):
        _space(lambda s: siso_optional(s, thunk(relu), D([0, 1, 2])))
    s = _space(lambda s: siso_optional(s, thunk(dense, units=D([8, 16])), D([0, 1])))
    n = len(s.hyperps)
    transition(s, "IH-1", 0)
    assert type_multiset(s) == ["Identity"] and len(s.hyperps) == n


def test_repeat():
    s = _space(lambda s: siso_repeat(s, thunk(dense, units=D([8, 16])), D([1, 2])))
    transition(s, "IH-1", 1)
    assert type_multiset(s) == ["Dense"]
    s = _space(lambda s: siso_repeat(s, thunk(relu), D([0, 1])))
    with pytest.raises(NonPositiveRepeat):
        transition(s, "IH-1", 0)


def test_sequential():
    s = SearchSpace()
    one = relu(s)
    assert siso_sequential(s, [one]) == one
    s = SearchSpace()
    siso_sequential(s, [relu(s), tanh(s), identity(s)])
    assert len(s.edges) == 2
    with pytest.raises(ArityMismatch):
        siso_sequential(s, [])


def test_split_combine():
    def build(domain):
        return lambda s: siso_split_combine(s, thunk(dense, units=D([8, 16])), thunk(concat), D(domain))

    s = _space(build([1]))
    transition(s, "IH-1", 1)
    assert type_multiset(s) == ["Concat", "Dense", "Identity"]
    # each branch gets its own units hyperparameter: 2 choices per branch
    assert count_terminals(lambda: _space(build([1]))) == 2
    assert count_terminals(lambda: _space(build([2]))) == 4
    with pytest.raises(NonPositiveRepeat):
        transition(_space(build([0])), "IH-1", 0)


def test_maybe_one_more_is_lazy():
    s = _space(lambda s: maybe_one_more(s, thunk(relu)))
    assert len(s.modules) == 1 and len(s.hyperps) == 1
    a = s.copy()
    transition(a, "IH-1", 0)
    assert type_multiset(a) == ["ReLU"]
    transition(s, "IH-1", 1)
    transition(s, unassigned_independent(s)[0], 0)
    assert type_multiset(s) == ["ReLU", "ReLU"] and is_terminal(s)


def test_rnn_cell():
    s = _space(lambda s: rnn_cell(s, thunk(identity), thunk(identity)))
    assert type_multiset(s) == ["Identity", "Identity"] and len(s.edges) == 1
    s = make_space("rnn_cell_example")
    assert sorted(s.inputs) == ["in0", "in1"]
    with pytest.raises(ArityMismatch):
        _space(lambda s: rnn_cell(s, thunk(concat, num_inputs=2), thunk(add, num_inputs=2)))


def test_lstm_cell_wiring():
    # gates sum their two inputs and the cell sums its four, so every node is
    # a plain pass-through combination of what it reads
    gate = thunk(add, num_inputs=2)
    s = SearchSpace()
    frag = lstm_cell(s, gate, gate, gate, gate, thunk(add, num_inputs=4), gate)
    assert len(s.edges) == 14
    assert sorted(frag.inputs) == ["cprev", "hprev", "x"]
    assert sorted(frag.outputs) == ["c", "h"]
    with pytest.raises(ArityMismatch):
        lstm_cell(SearchSpace(), *[thunk(identity)] * 6)


@constructor
def _fixed_input_node(space, units):
    a = dense(space, units)
    b = dense(space, units)
    c_in, c_out = add(space, 2)
    space.connect(a.outputs["out"], c_in["in0"])
    space.connect(b.outputs["out"], c_in["in1"])
    return Fragment({"x": a.inputs["in"], "ht": b.inputs["in"]}, c_out)


@constructor
def _fixed_node(space, units):
    return dense(space, units)


def _enas(num_nodes):
    def build(s):
        return enas_cell(s, num_nodes, D([4]), thunk(_fixed_input_node), thunk(_fixed_node), thunk(avg))

    return lambda: build_space(build)


@pytest.mark.parametrize("num_nodes", [2, 3, 4, 5])
def test_enas_connection_patterns(num_nodes):
    s = _enas(num_nodes)()
    cell = s.modules["Cell-1"]
    sizes = [len(s.hyperps[cell.hyperps[str(i)]].domain) for i in range(1, num_nodes)]
    assert sizes == list(range(1, num_nodes))
    # oracle: every pattern of the product of the connection domains gives a different graph
    patterns = set()
    for combo in itertools.product(*[range(i) for i in range(1, num_nodes)]):
        t = _enas(num_nodes)()
        transition(t, "IH-1", 4)
        for i, v in enumerate(combo, start=1):
            if not is_terminal(t):
                transition(t, cell.hyperps[str(i)], v)
        patterns.add(canonical(t))
    assert len(patterns) == math.factorial(num_nodes - 1)
    assert count_terminals(_enas(num_nodes)) == math.factorial(num_nodes - 1)


def test_enas_eight_nodes():
    s = make_space("enas_rnn_cell")
    cell = s.modules["Cell-1"]
    assert sorted(cell.hyperps, key=int) == [str(i) for i in range(1, 8)]
    assert math.prod(len(s.hyperps[h].domain) for h in cell.hyperps.values()) == 5040
    with pytest.raises(ArityMismatch):
        _space(lambda s: enas_cell(s, 1, D([4]), thunk(_fixed_input_node), thunk(_fixed_node), thunk(avg)))


def test_enas_node_operations():
    s = SearchSpace()
    from archspace.combinators import enas_input_node, enas_intermediate_node

    enas_input_node(s, D([8]))
    assert type_multiset(s) == ["Add", "Affine", "Affine", "Nonlinearity"]
    nl = [s.hyperps[m.hyperps["nonlin"]] for m in s.modules.values() if m.type_name == "Nonlinearity"][0]
    assert nl.domain == ("relu", "tanh", "sigmoid", "identity")
    s = SearchSpace()
    enas_intermediate_node(s, D([8]))
    assert type_multiset(s) == ["Affine", "Nonlinearity"]


@pytest.mark.parametrize(
    "name,count",
    [
        ("fig2_one_layer_net", 6),
        ("fig3_multi_layer_net", 6),
        ("fig3_per_layer_activation", 22),
        ("fig8_shared_filters", 27),
        ("fig9_dependent_chain", 243),
        ("appd2_space_1", 1338),
        ("appd2_space_2", 66),
        ("appd2_space_3", 18),
    ],
)
def test_bundled_counts(name, count):
    assert count_terminals(space_fn(name)) == count


def test_analytic_counts():
    # one shared activation choice for 1, 2 or 4 layers vs one choice per layer
    assert 3 * 2 == count_terminals(space_fn("fig3_multi_layer_net"))
    assert sum(2**k for k in (1, 2, 4)) == count_terminals(space_fn("fig3_per_layer_activation"))
    # branch a, b or c, k repetitions each with its own binary choice
    assert 3 * sum(2**k for k in (1, 2, 4)) == count_terminals(space_fn("appd2_space_2"))
    # the binary choice is shared by all repetitions
    assert 3 * 3 * 2 == count_terminals(space_fn("appd2_space_3"))
    # k repetitions of a 6-way choice
    assert sum(6**k for k in (1, 2, 4)) == count_terminals(space_fn("appd2_space_1"))


@pytest.mark.parametrize("name", ["fig2_one_layer_net", "fig3_multi_layer_net", "fig8_shared_filters"])
def test_count_does_not_depend_on_traversal_order(name):
    first = {c for _, c in enumerate_terminals(space_fn(name))}
    last = {c for _, c in enumerate_terminals(space_fn(name), pick=lambda p: p[-1])}
    assert first == last


@pytest.mark.parametrize("name", ["fig6_example", "fig3_multi_layer_net", "appd2_space_1", "appd2_space_4"])
def test_substitution_modules_hold_no_basic_work_before_resolution(name):
    s = make_space(name)
    assert all(m.generator is not None or m.type_name in ("Conv2D", "Concat") for m in s.modules.values())
