from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from archspace import D, SearchSpace, is_terminal, make_space, replay, transition
from archspace.core import Input, Output
from archspace.errors import (
    AlreadyAssigned,
    NonPositiveRepeat,
    NotIndependent,
    SubstitutionPortMismatch,
    UnknownHyperparameter,
    ValueNotInDomain,
)
from archspace.combinators import siso_repeat, substitution_module
from archspace.modules import dense, identity
from archspace.registry import generator, thunk
from archspace.search import RandomSearcher
from archspace.serialization import serialize
from archspace.spaces import space_fn
from archspace.transition import resolve
from archspace.traversal import unassigned_independent

from conftest import type_multiset


def test_frame_a_to_b(fig6):
    before = set(fig6.hyperps)
    r = transition(fig6, "IH-3", 1)
    assert fig6.values["DH-1"] == 2
    assert r.assigned == [("IH-3", 1), ("DH-1", 2)]
    subs = {s.removed: s.created_modules for s in r.substituted}
    assert subs == {"Repeat-1": ["Conv2D-2"], "Repeat-2": ["Conv2D-3", "Conv2D-4"]}
    # Repeat-2's two convolutions are in series
    assert fig6.incoming[Input("Conv2D-4", "in")] == Output("Conv2D-3", "out")
    # one filters hyperparameter per new convolution
    assert set(fig6.hyperps) - before == {"IH-4", "IH-5", "IH-6"}
    assert sorted(h for h in fig6.hyperps if h not in fig6.values) == ["IH-1", "IH-2", "IH-4", "IH-5", "IH-6"]


def test_frame_b_to_c(fig6):
    transition(fig6, "IH-3", 1)
    r = transition(fig6, "IH-2", 1)
    assert [(s.removed, s.created_modules, s.created_hyperps) for s in r.substituted] == [
        ("Optional-1", ["Dropout-1"], ["IH-7"])
    ]
    assert fig6.incoming[Input("Dropout-1", "in")] == Output("Conv2D-1", "out")
    assert fig6.incoming[Input("Conv2D-2", "in")] == Output("Dropout-1", "out")
    assert fig6.incoming[Input("Conv2D-3", "in")] == Output("Dropout-1", "out")
    assert "Optional-1" not in fig6.modules


def test_optional_off_creates_identity(fig6):
    transition(fig6, "IH-3", 1)
    n_hyperps = len(fig6.hyperps)
    r = transition(fig6, "IH-2", 0)
    assert r.substituted[0].created_modules == ["Identity-1"]
    assert r.substituted[0].created_hyperps == []
    assert len(fig6.hyperps) == n_hyperps


def test_frame_d_is_terminal(fig6):
    assert not is_terminal(fig6)
    transition(fig6, "IH-3", 1)
    transition(fig6, "IH-2", 1)
    for h, v in [("IH-1", 64), ("IH-4", 64), ("IH-5", 128), ("IH-6", 64), ("IH-7", 0.5)]:
        transition(fig6, h, v)
    assert is_terminal(fig6)
    assert type_multiset(fig6) == ["Concat", "Conv2D", "Conv2D", "Conv2D", "Conv2D", "Dropout"]
    assert is_terminal(SearchSpace())


def test_transition_errors(fig6):
    with pytest.raises(UnknownHyperparameter):
        transition(fig6, "IH-99", 1)
    with pytest.raises(NotIndependent):
        transition(fig6, "DH-1", 2)
    with pytest.raises(ValueNotInDomain):
        transition(fig6, "IH-3", 3)
    with pytest.raises(ValueNotInDomain):
        transition(fig6, "IH-3", 1.0)
    transition(fig6, "IH-3", 1)
    with pytest.raises(AlreadyAssigned):
        transition(fig6, "IH-3", 2)


def test_generator_errors_carry_module_id():
    s = SearchSpace()
    s.set_io(siso_repeat(s, thunk(identity), D([0, 1])))
    with pytest.raises(NonPositiveRepeat) as e:
        transition(s, "IH-1", 0)
    assert e.value.module_id == "Repeat-1" and "[Repeat-1]" in str(e.value)


@generator("test_missing_out")
def _missing_out(space, dh):
    ins, outs = identity(space)
    return ins, {"other": outs["out"]}


def test_generator_port_mismatch():
    s = SearchSpace()
    s.set_io(substitution_module(s, "Broken", {"h": D([0])}, "test_missing_out", ["in"], ["out"]))
    with pytest.raises(SubstitutionPortMismatch):
        transition(s, "IH-1", 0)


def test_rerouting_preserves_external_connections(fig6):
    transition(fig6, "IH-3", 2)
    r = transition(fig6, "IH-2", 1)
    # the Optional had one incoming and two outgoing edges; all three survive on Dropout-1
    moved = [new for old, new in r.rerouted]
    assert sorted(moved) == sorted(
        [
            (Output("Conv2D-1", "out"), Input("Dropout-1", "in")),
            (Output("Dropout-1", "out"), Input("Conv2D-2", "in")),
            (Output("Dropout-1", "out"), Input("Conv2D-4", "in")),
        ]
    )


def test_io_naming_follows_substitution():
    s = make_space("fig3_multi_layer_net")
    transition(s, unassigned_independent(s)[0], 2)
    assert set(s.inputs.values()) <= {Input(m, "in") for m in s.modules}
    assert set(s.outputs.values()) <= {Output(m, "out") for m in s.modules}


@generator("test_constant_identity")
def _constant_identity(space, dh):
    return identity(space)


def test_zero_hyperparameter_substitution_waits_for_first_transition():
    s = SearchSpace()
    a_in, a_out = substitution_module(s, "Lazy", {}, "test_constant_identity", ["in"], ["out"])
    d_in, d_out = dense(s, D([1, 2]))
    s.connect(a_out["out"], d_in["in"])
    s.set_io((a_in, d_out))
    assert "Lazy-1" in s.modules
    r = transition(s, "IH-1", 2)
    assert [x.removed for x in r.substituted] == ["Lazy-1"]
    assert type_multiset(s) == ["Dense", "Identity"]


def test_replay_reproduces_serialization():
    r = RandomSearcher(space_fn("fig6_example"), seed=5)
    for _ in range(10):
        res = r.sample()
        assert serialize(replay(make_space("fig6_example"), res.log)) == serialize(res.space)


SUBSTITUTION_FREE = ["fig2_one_layer_net", "fig8_shared_filters", "fig9_dependent_chain"]


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(SUBSTITUTION_FREE), data=st.data())
def test_substitution_free_spaces_are_stable(name, data):
    s = make_space(name)
    modules, hyperps = set(s.modules), set(s.hyperps)
    while not is_terminal(s):
        h = data.draw(st.sampled_from(unassigned_independent(s)))
        transition(s, h, data.draw(st.sampled_from(s.hyperps[h].domain)))
        assert set(s.modules) == modules and set(s.hyperps) == hyperps


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(SUBSTITUTION_FREE), data=st.data())
def test_assignment_order_does_not_matter_without_substitutions(name, data):
    s = make_space(name)
    log = [(h, data.draw(st.sampled_from(s.hyperps[h].domain))) for h in sorted(s.independent_ids())]
    perm = data.draw(st.permutations(log))
    a, b = make_space(name), make_space(name)
    for h, v in log:
        transition(a, h, v)
    for h, v in perm:
        transition(b, h, v)
    assert serialize(a) == serialize(b)


def test_resolve_is_idempotent(fig6):
    assert resolve(fig6).assigned == []
    transition(fig6, "IH-3", 1)
    assert resolve(fig6).substituted == []
