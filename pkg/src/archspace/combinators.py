"""Substitution modules and auxiliary search-space functions.

All combinators are registered constructors, so a :class:`~archspace.Thunk`
can defer any of them inside another combinator. Branch and body arguments are
thunks (``thunk(conv2d, filters=D([64, 128]))``); hyperparameter arguments are
either a fresh ``D(...)`` or the id of an existing hyperparameter.
"""

from __future__ import annotations

from .core import Fragment, SearchSpace
from .errors import ArityMismatch, DomainMismatch, NonPositiveRepeat
from .modules import add, affine, identity, nonlinearity
from .registry import Call, D, Thunk, constructor, generator


def _port(ports: dict, name: str, where: str):
    try:
        return ports[name]
    except KeyError:
        raise ArityMismatch(f"{where}: fragment has no port {name!r} (has {sorted(ports)})") from None


def _domain_of(space: SearchSpace, h):
    if isinstance(h, D):
        return h.values
    hp = space.hyperps.get(str(h))
    return None if hp is None else hp.domain


def _check_index_domain(space, h, n, what):
    values = _domain_of(space, h)
    if values is None:
        return
    if any(isinstance(v, bool) or not isinstance(v, int) for v in values) or set(values) != set(range(n)):
        raise DomainMismatch(f"{what}: domain {list(values)} must be exactly the indices 0..{n - 1}")


def substitution_module(space, type_name, hyperps, generator_name, input_names, output_names, **params) -> Fragment:
    return space.add_substitution_module(
        type_name, input_names, output_names, hyperps, Call(generator_name, params)
    )


def siso_sequential(space: SearchSpace, fragments) -> Fragment:
    """Chain fragments ``out -> in``; returns the first inputs and last outputs."""
    fragments = list(fragments)
    if not fragments:
        raise ArityMismatch("siso_sequential needs at least one fragment")
    for k, (prev, nxt) in enumerate(zip(fragments, fragments[1:])):
        space.connect(_port(prev.outputs, "out", f"sequential[{k}]"), _port(nxt.inputs, "in", f"sequential[{k + 1}]"))
    return Fragment(fragments[0].inputs, fragments[-1].outputs)


@constructor
def sequential(space, fns):
    return siso_sequential(space, [fn(space) for fn in fns])


# or

@generator("or")
def _or_generator(space, dh, branches):
    idx = dh["idx"]
    if not 0 <= idx < len(branches):
        raise DomainMismatch(f"Or index {idx} out of range for {len(branches)} branches")
    return branches[idx](space)


@constructor
def mimo_or(space, branches, h_or, input_names, output_names):
    branches = list(branches)
    if not branches:
        raise ArityMismatch("mimo_or needs at least one branch")
    _check_index_domain(space, h_or, len(branches), "mimo_or")
    return substitution_module(space, "Or", {"idx": h_or}, "or", input_names, output_names, branches=branches)


@constructor
def siso_or(space, branches, h_or):
    return mimo_or(space, branches, h_or, ["in"], ["out"])


# optional

@generator("optional")
def _optional_generator(space, dh, fn):
    return fn(space) if dh["opt"] == 1 else identity(space)


@constructor
def siso_optional(space, fn, h_opt):
    values = _domain_of(space, h_opt)
    if values is not None and (
        any(isinstance(v, bool) or not isinstance(v, int) for v in values) or not set(values) <= {0, 1}
    ):
        raise DomainMismatch(f"siso_optional: gate domain {list(values)} must be a subset of [0, 1]")
    return substitution_module(space, "Optional", {"opt": h_opt}, "optional", ["in"], ["out"], fn=fn)


# repeat

@generator("repeat")
def _repeat_generator(space, dh, fn):
    k = dh["num_reps"]
    if isinstance(k, bool) or not isinstance(k, int) or k <= 0:
        raise NonPositiveRepeat(f"repeat count must be a positive integer, got {k!r}")
    return siso_sequential(space, [fn(space) for _ in range(k)])


@constructor
def siso_repeat(space, fn, h_num_repeats):
    return substitution_module(space, "Repeat", {"num_reps": h_num_repeats}, "repeat", ["in"], ["out"], fn=fn)


# split / combine

@generator("split_combine")
def _split_combine_generator(space, dh, fn, combine_fn):
    k = dh["num_splits"]
    if isinstance(k, bool) or not isinstance(k, int) or k <= 0:
        raise NonPositiveRepeat(f"split count must be a positive integer, got {k!r}")
    branches = [fn(space) for _ in range(k)]
    c_inputs, c_outputs = combine_fn(space, k)
    i_inputs, i_outputs = identity(space)
    for j, (b_inputs, b_outputs) in enumerate(branches):
        space.connect(i_outputs["out"], _port(b_inputs, "in", "split branch"))
        space.connect(_port(b_outputs, "out", "split branch"), _port(c_inputs, f"in{j}", "combine"))
    return Fragment(i_inputs, c_outputs)


@constructor
def siso_split_combine(space, fn, combine_fn, h_num_splits):
    return substitution_module(
        space, "SplitCombine", {"num_splits": h_num_splits}, "split_combine", ["in"], ["out"],
        fn=fn, combine_fn=combine_fn,
    )


# recursion: the inner maybe_one_more is only built once its branch is chosen

@constructor
def _one_more(space, fn):
    return siso_sequential(space, [fn(space), maybe_one_more(space, fn)])


@constructor
def maybe_one_more(space, fn):
    return siso_or(space, [fn, Thunk("_one_more", {"fn": fn})], D([0, 1]))


# auxiliary functions

@constructor
def rnn_cell(space, hidden_fn, output_fn):
    h_inputs, h_outputs = hidden_fn(space)
    y_inputs, y_outputs = output_fn(space)
    space.connect(_port(h_outputs, "out", "rnn_cell hidden"), _port(y_inputs, "in", "rnn_cell output"))
    return Fragment(h_inputs, y_outputs)


@constructor
def lstm_cell(space, input_fn, forget_fn, gate_fn, output_fn, cell_fn, hidden_fn):
    x_inputs, x_outputs = identity(space)
    hprev_inputs, hprev_outputs = identity(space)
    cprev_inputs, cprev_outputs = identity(space)

    i_inputs, i_outputs = input_fn(space)
    f_inputs, f_outputs = forget_fn(space)
    g_inputs, g_outputs = gate_fn(space)
    o_inputs, o_outputs = output_fn(space)
    c_inputs, c_outputs = cell_fn(space)
    h_inputs, h_outputs = hidden_fn(space)

    x, hprev, cprev = x_outputs["out"], hprev_outputs["out"], cprev_outputs["out"]
    wiring = [
        (x, i_inputs, "in0", "input gate"),
        (hprev, i_inputs, "in1", "input gate"),
        (x, f_inputs, "in0", "forget gate"),
        (hprev, f_inputs, "in1", "forget gate"),
        (x, g_inputs, "in0", "gate"),
        (hprev, g_inputs, "in1", "gate"),
        (_port(f_outputs, "out", "forget gate"), c_inputs, "in0", "cell"),
        (cprev, c_inputs, "in1", "cell"),
        (_port(i_outputs, "out", "input gate"), c_inputs, "in2", "cell"),
        (_port(g_outputs, "out", "gate"), c_inputs, "in3", "cell"),
        (x, o_inputs, "in0", "output gate"),
        (hprev, o_inputs, "in1", "output gate"),
        (_port(o_outputs, "out", "output gate"), h_inputs, "in0", "hidden"),
        (_port(c_outputs, "out", "cell"), h_inputs, "in1", "hidden"),
    ]
    for src, ports, name, where in wiring:
        space.connect(src, _port(ports, name, where))
    return Fragment(
        {"x": x_inputs["in"], "hprev": hprev_inputs["in"], "cprev": cprev_inputs["in"]},
        {"c": c_outputs["out"], "h": h_outputs["out"]},
    )


# recurrent cell with searched connectivity

@generator("enas_cell")
def _enas_cell_generator(space, dh, num_nodes, units, input_node_fn, intermediate_node_fn, combine_fn):
    nodes = [input_node_fn(space, units)]
    nodes += [intermediate_node_fn(space, units) for _ in range(1, num_nodes)]
    for i in range(1, num_nodes):
        space.connect(_port(nodes[dh[str(i)]].outputs, "out", "cell node"), _port(nodes[i].inputs, "in", "cell node"))
    unused = sorted(set(range(num_nodes)) - set(dh.values()))
    c_inputs, c_outputs = combine_fn(space, len(unused))
    for j, i in enumerate(unused):
        space.connect(nodes[i].outputs["out"], _port(c_inputs, f"in{j}", "cell combine"))
    return Fragment(nodes[0].inputs, {"ht+1": c_outputs["out"]})


@constructor
def enas_cell(space, num_nodes, h_units, input_node_fn, intermediate_node_fn, combine_fn):
    """Connection hyperparameter ``str(i)`` picks which earlier node feeds node ``i``;
    nodes nobody reads from are averaged (or otherwise combined) into ``ht+1``."""
    if isinstance(num_nodes, bool) or not isinstance(num_nodes, int) or num_nodes < 2:
        raise ArityMismatch(f"enas_cell needs num_nodes >= 2, got {num_nodes!r}")
    units = space.hyperp(h_units)
    hyperps = {str(i): D(range(i)) for i in range(1, num_nodes)}
    return substitution_module(
        space, "Cell", hyperps, "enas_cell", ["x", "ht"], ["ht+1"],
        num_nodes=num_nodes, units=units, input_node_fn=input_node_fn,
        intermediate_node_fn=intermediate_node_fn, combine_fn=combine_fn,
    )


NONLINEARITY_CHOICES = ["relu", "tanh", "sigmoid", "identity"]


@constructor
def enas_input_node(space, units):
    h_inputs, h_outputs = affine(space, units)
    x_inputs, x_outputs = affine(space, units)
    a_inputs, a_outputs = add(space, 2)
    n_inputs, n_outputs = nonlinearity(space, D(NONLINEARITY_CHOICES))
    space.connect(x_outputs["out"], a_inputs["in0"])
    space.connect(h_outputs["out"], a_inputs["in1"])
    space.connect(a_outputs["out"], n_inputs["in"])
    return Fragment({"x": x_inputs["in"], "ht": h_inputs["in"]}, n_outputs)


@constructor
def enas_intermediate_node(space, units):
    a_inputs, a_outputs = affine(space, units)
    n_inputs, n_outputs = nonlinearity(space, D(NONLINEARITY_CHOICES))
    space.connect(a_outputs["out"], n_inputs["in"])
    return Fragment(a_inputs, n_outputs)
