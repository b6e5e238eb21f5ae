"""Bundled example search spaces, addressable by name."""

from __future__ import annotations

from dataclasses import dataclass

from .combinators import (
    enas_cell,
    maybe_one_more,
    rnn_cell,
    sequential,
    siso_optional,
    siso_or,
    siso_repeat,
)
from .core import Fragment, SearchSpace
from .modules import affine, avg, concat, conv2d, dense, dropout, relu, tanh
from .registry import Call, D, constructor, thunk


@constructor
def one_layer_net(space):
    a_in, a_out = dropout(space, D([0.25, 0.5]))
    b_in, b_out = dense(space, D([100, 200, 300]))
    c_in, c_out = relu(space)
    space.connect(a_out["out"], b_in["in"])
    space.connect(b_out["out"], c_in["in"])
    return Fragment(a_in, c_out)


@constructor
def multi_layer_net(space):
    # h_or is created once and shared by every repetition's Or module
    h_or = space.add_independent_hyperp([0, 1])
    h_repeat = D([1, 2, 4])
    body = thunk(
        sequential,
        fns=[thunk(dense, units=D([300])), thunk(siso_or, branches=[thunk(relu), thunk(tanh)], h_or=h_or)],
    )
    return siso_repeat(space, body, h_repeat)


@constructor
def multi_layer_net_per_layer(space):
    """Like :func:`multi_layer_net` but every layer picks its own activation."""
    body = thunk(
        sequential,
        fns=[thunk(dense, units=D([300])), thunk(siso_or, branches=[thunk(relu), thunk(tanh)], h_or=D([0, 1]))],
    )
    return siso_repeat(space, body, D([1, 2, 4]))


@constructor
def fig6_example(space):
    # registration order reproduces the published naming: Conv2D-1 holds IH-1,
    # Optional-1 holds IH-2, the repeat count is IH-3 and its double is DH-1
    c_inputs, c_outputs = conv2d(space, D([64, 128]))
    o_inputs, o_outputs = siso_optional(space, thunk(dropout, rate=D([0.25, 0.5])), D([0, 1]))
    h_n = space.add_independent_hyperp([1, 2, 4])
    h_ndep = space.add_dependent_hyperp({"x": h_n}, Call("scale", {"factor": 2}))
    fn = thunk(conv2d, filters=D([64, 128]))
    r1_inputs, r1_outputs = siso_repeat(space, fn, h_n)
    r2_inputs, r2_outputs = siso_repeat(space, fn, h_ndep)
    cc_inputs, cc_outputs = concat(space, 2)

    space.connect(c_outputs["out"], o_inputs["in"])
    space.connect(o_outputs["out"], r1_inputs["in"])
    space.connect(o_outputs["out"], r2_inputs["in"])
    space.connect(r1_outputs["out"], cc_inputs["in0"])
    space.connect(r2_outputs["out"], cc_inputs["in1"])
    return Fragment(c_inputs, cc_outputs)


@constructor
def fig8_shared_filters(space):
    h_filters = space.add_independent_hyperp([32, 64, 128])
    h_stride = space.add_independent_hyperp([1])
    c1_inputs, c1_outputs = conv2d(space, h_filters, kernel=D([1, 3, 5]), stride=h_stride)
    c2_inputs, c2_outputs = conv2d(space, h_filters, kernel=D([1, 3, 5]), stride=h_stride)
    space.connect(c1_outputs["out"], c2_inputs["in"])
    return Fragment(c1_inputs, c2_outputs)


@constructor
def fig9_dependent_chain(space):
    h_filters = [space.add_independent_hyperp([32, 64, 128])]
    h_factor = space.add_independent_hyperp([1, 2, 4])
    h_stride = space.add_independent_hyperp([1])
    io = []
    for i in range(3):
        io.append(conv2d(space, h_filters[i], kernel=D([1, 3, 5]), stride=h_stride))
        if i > 0:
            space.connect(io[i - 1].outputs["out"], io[i].inputs["in"])
        if i < 2:
            h_filters.append(
                space.add_dependent_hyperp({"x": h_filters[i], "y": h_factor}, Call("product"))
            )
    return Fragment(io[0].inputs, io[-1].outputs)


# Three distinct single-input single-output fragments, each driven by one
# binary hyperparameter (mapped to a layer width through a dependent one).

def _width(space, h, options):
    return space.add_dependent_hyperp({"x": space.hyperp(h)}, Call("select", {"options": options}))


@constructor
def a_fn(space, h):
    return dense(space, _width(space, h, [32, 64]))


@constructor
def b_fn(space, h):
    a_in, a_out = affine(space, _width(space, h, [16, 48]))
    r_in, r_out = relu(space)
    space.connect(a_out["out"], r_in["in"])
    return Fragment(a_in, r_out)


@constructor
def c_fn(space, h):
    a_in, a_out = affine(space, _width(space, h, [24, 40]))
    t_in, t_out = tanh(space)
    space.connect(a_out["out"], t_in["in"])
    return Fragment(a_in, t_out)


_ABC = (a_fn, b_fn, c_fn)


@constructor
def appd2_space_1(space):
    choice = thunk(siso_or, branches=[thunk(f, h=D([0, 1])) for f in _ABC], h_or=D([0, 1, 2]))
    return siso_repeat(space, choice, D([1, 2, 4]))


@constructor
def appd2_space_2(space):
    branches = [
        thunk(siso_repeat, fn=thunk(f, h=D([0, 1])), h_num_repeats=D([1, 2, 4])) for f in _ABC
    ]
    return siso_or(space, branches, D([0, 1, 2]))


@constructor
def appd2_space_3(space):
    h = space.add_independent_hyperp([0, 1])
    branches = [thunk(siso_repeat, fn=thunk(f, h=h), h_num_repeats=D([1, 2, 4])) for f in _ABC]
    return siso_or(space, branches, D([0, 1, 2]))


@constructor
def appd2_space_4(space):
    branches = [
        thunk(siso_repeat, fn=thunk(f), h_num_repeats=D([1, 2, 4]))
        for f in (appd2_space_1, appd2_space_2, appd2_space_3)
    ]
    return siso_or(space, branches, D([0, 1, 2]))


@constructor
def maybe_one_more_example(space):
    return maybe_one_more(space, thunk(dense, units=D([32, 64])))


@constructor
def enas_rnn_cell(space):
    h_units = space.add_independent_hyperp([32, 64, 128, 256])
    return enas_cell(space, 8, h_units, thunk("enas_input_node"), thunk("enas_intermediate_node"), thunk(avg))


@constructor
def rnn_cell_example(space):
    hidden = thunk(sequential, fns=[thunk(concat, num_inputs=2), thunk(one_layer_net)])
    return rnn_cell(space, hidden, thunk(multi_layer_net))


@dataclass(frozen=True)
class SpaceEntry:
    build: object
    input_shapes: dict
    enumerable: bool = True


_DENSE_IN = {"in": (2, 8)}
_CONV_IN = {"in": (1, 4, 4, 3)}

SPACES = {
    "fig2_one_layer_net": SpaceEntry(one_layer_net, _DENSE_IN),
    "fig3_multi_layer_net": SpaceEntry(multi_layer_net, _DENSE_IN),
    "fig3_per_layer_activation": SpaceEntry(multi_layer_net_per_layer, _DENSE_IN),
    "fig6_example": SpaceEntry(fig6_example, _CONV_IN),
    "fig8_shared_filters": SpaceEntry(fig8_shared_filters, _CONV_IN),
    "fig9_dependent_chain": SpaceEntry(fig9_dependent_chain, _CONV_IN),
    "appd2_space_1": SpaceEntry(appd2_space_1, _DENSE_IN),
    "appd2_space_2": SpaceEntry(appd2_space_2, _DENSE_IN),
    "appd2_space_3": SpaceEntry(appd2_space_3, _DENSE_IN),
    "appd2_space_4": SpaceEntry(appd2_space_4, _DENSE_IN, enumerable=False),
    "maybe_one_more": SpaceEntry(maybe_one_more_example, _DENSE_IN, enumerable=False),
    "enas_rnn_cell": SpaceEntry(enas_rnn_cell, {"x": (2, 8), "ht": (2, 8)}, enumerable=False),
    "rnn_cell_example": SpaceEntry(rnn_cell_example, {"in0": (2, 4), "in1": (2, 4)}),
}


def build_space(build) -> SearchSpace:
    """Run a space function on a fresh space and name its external ports.

    Nothing is resolved here; modules that are ready from the start are
    substituted by the first transition (or an explicit ``resolve``)."""
    space = SearchSpace()
    return space.set_io(build(space))


def make_space(name: str) -> SearchSpace:
    try:
        entry = SPACES[name]
    except KeyError:
        raise KeyError(f"unknown space {name!r}; known: {', '.join(sorted(SPACES))}") from None
    return build_space(entry.build)


def space_fn(name: str):
    """Zero-argument callable producing fresh, independent copies of a
    bundled space (built once, then copied)."""
    template = make_space(name)
    return template.copy
