"""Compiling terminal search spaces to numpy dataflow graphs and running them."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace

import numpy as np

from . import ops, rng
from .core import Input, Output, SearchSpace
from .errors import NotTerminal, SearchSpaceError, ShapeMismatch
from .transition import is_terminal
from .traversal import module_eval_seq

INIT_SCALE = 0.05


@dataclass(frozen=True)
class CompiledModule:
    id: str
    type_name: str
    op: str
    params: dict  # hyperparameter values and constant config, by local name
    input_names: tuple  # lexicographic
    output_names: tuple  # lexicographic
    input_shapes: tuple
    output_shapes: tuple
    weights: dict


@dataclass
class CompiledGraph:
    seq: list
    modules: dict
    inputs: dict  # external name -> Input
    outputs: dict  # external name -> Output
    sources: dict  # Input -> Output feeding it
    input_shapes: dict
    output_shapes: dict
    seed: int
    compile_counts: dict = field(default_factory=dict)


def _shape(s) -> tuple:
    shape = tuple(int(d) for d in s)
    if any(d <= 0 for d in shape):
        raise ShapeMismatch(f"shape extents must be positive, got {list(shape)}")
    return shape


def init_weights(seed: int, module_id: str, shapes: dict) -> dict:
    """Uniform[-0.05, 0.05] weights; each parameter has its own stream, so the
    values do not depend on compilation order."""
    return {
        name: rng.stream(seed, "weights", module_id, name).uniform(-INIT_SCALE, INIT_SCALE, size=shape)
        for name, shape in sorted(shapes.items())
    }


def compile(space: SearchSpace, input_shapes: dict, outputs=None, seed: int = 0, inputs=None) -> CompiledGraph:
    """Shape-check a terminal space along its evaluation order and
    instantiate every basic module's weights exactly once."""
    if not is_terminal(space) or space.substitution_ids():
        raise NotTerminal("only terminal search spaces can be compiled")
    inputs = dict(space.inputs if inputs is None else inputs)
    outputs = dict(space.outputs if outputs is None else outputs)
    seq = module_eval_seq(space, inputs, outputs)
    missing = sorted(set(inputs) - set(input_shapes))
    if missing:
        raise ShapeMismatch(f"no shape given for external inputs {missing}")

    cg = CompiledGraph(
        seq=seq,
        modules={},
        inputs=inputs,
        outputs=outputs,
        sources={},
        input_shapes={k: _shape(input_shapes[k]) for k in inputs},
        output_shapes={},
        seed=int(seed),
    )
    port_shape = {inputs[k]: cg.input_shapes[k] for k in inputs}
    consumers = defaultdict(list)
    needed = set(seq)
    for i, o in space.incoming.items():
        if i.module in needed:
            cg.sources[i] = o
            consumers[o].append(i)
    for mid in seq:
        cg.modules[mid] = _compile_module(space, mid, port_shape, cg)
        for name, shape in zip(cg.modules[mid].output_names, cg.modules[mid].output_shapes):
            for i in consumers[Output(mid, name)]:
                port_shape[i] = shape
            port_shape[Output(mid, name)] = shape
    cg.output_shapes = {k: port_shape[p] for k, p in outputs.items()}
    return cg


def _compile_module(space, mid, port_shape, cg) -> CompiledModule:
    cg.compile_counts[mid] = cg.compile_counts.get(mid, 0) + 1
    m = space.modules[mid]
    op = ops.get_op(m.op)
    params = dict(m.config)
    params.update(space.hyperp_values(mid))
    in_names = tuple(sorted(m.inputs))
    out_names = tuple(sorted(m.outputs))
    in_shapes = tuple(port_shape[Input(mid, n)] for n in in_names)
    try:
        out_shapes = tuple(tuple(s) for s in op.infer(list(in_shapes), params))
        if len(out_shapes) != len(out_names):
            raise ShapeMismatch(f"op {m.op!r} produced {len(out_shapes)} outputs for ports {list(out_names)}")
        weights = init_weights(cg.seed, mid, op.weights(list(in_shapes), params))
    except SearchSpaceError as e:
        e.module_id = mid
        raise
    return CompiledModule(mid, m.type_name, m.op, params, in_names, out_names, in_shapes, out_shapes, weights)


def forward(cg: CompiledGraph, inputs: dict, trace: list | None = None) -> dict:
    """Evaluate the graph on ``inputs`` (external name -> array).

    Modules run in the compiled order; when ``trace`` is a list, each module id
    is appended as the module completes.
    """
    missing = sorted(set(cg.inputs) - set(inputs))
    if missing:
        raise ShapeMismatch(f"missing values for external inputs {missing}")
    external = {}
    for name, port in cg.inputs.items():
        x = np.asarray(inputs[name], dtype=np.float64)
        if x.shape != cg.input_shapes[name]:
            raise ShapeMismatch(f"input {name!r} has shape {list(x.shape)}, compiled for {list(cg.input_shapes[name])}")
        external[port] = x
    values = {}
    for mid in cg.seq:
        cm = cg.modules[mid]
        xs = []
        for n in cm.input_names:
            port = Input(mid, n)
            src = cg.sources.get(port)
            xs.append(values[src] if src is not None else external[port])
        ys = ops.get_op(cm.op).apply(xs, cm.params, cm.weights)
        for n, y, shape in zip(cm.output_names, ys, cm.output_shapes):
            if y.shape != shape:
                err = ShapeMismatch(f"output {n!r} has shape {list(y.shape)}, expected {list(shape)}")
                err.module_id = mid
                raise err
            values[Output(mid, n)] = y
        if trace is not None:
            trace.append(mid)
    return {name: values[port] for name, port in cg.outputs.items()}


def param_count(cg: CompiledGraph) -> int:
    return int(sum(w.size for cm in cg.modules.values() for w in cm.weights.values()))


def with_zero_biases(cg: CompiledGraph) -> CompiledGraph:
    modules = {
        mid: replace(cm, weights={k: (np.zeros_like(w) if k == "b" else w) for k, w in cm.weights.items()})
        for mid, cm in cg.modules.items()
    }
    return replace(cg, modules=modules)


def is_homogeneous(cg: CompiledGraph) -> bool:
    """True when every op satisfies f(a*x) = a*f(x) for a > 0 once biases are zero."""
    return all(ops.get_op(cm.op).homogeneous(cm.params) for cm in cg.modules.values())


def random_inputs(cg: CompiledGraph, seed: int) -> dict:
    return {
        name: rng.stream(seed, "inputs", name).standard_normal(cg.input_shapes[name])
        for name in sorted(cg.inputs)
    }


def checksum(outputs: dict) -> float:
    return float(sum(float(np.sum(outputs[k])) for k in sorted(outputs)))


def format_checksum(x: float) -> str:
    return f"{x:.12g}"


def metadata(cg: CompiledGraph) -> dict:
    """JSON-ready description of a compiled graph (no weight values)."""
    return {
        "seed": cg.seed,
        "seq": list(cg.seq),
        "inputs": {k: [p.module, p.name, list(cg.input_shapes[k])] for k, p in sorted(cg.inputs.items())},
        "outputs": {k: [p.module, p.name, list(cg.output_shapes[k])] for k, p in sorted(cg.outputs.items())},
        "modules": {
            mid: {
                "type": cm.type_name,
                "op": cm.op,
                "params": cm.params,
                "input_shapes": [list(s) for s in cm.input_shapes],
                "output_shapes": [list(s) for s in cm.output_shapes],
                "weights": {k: list(w.shape) for k, w in cm.weights.items()},
            }
            for mid, cm in cg.modules.items()
        },
        "param_count": param_count(cg),
    }
