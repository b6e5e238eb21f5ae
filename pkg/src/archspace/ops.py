"""Numeric operations backing basic modules.

Every op works on float64 numpy arrays whose first axis is the batch. Inputs
and outputs are passed positionally in lexicographic order of the module's
local port names, and ``p`` holds the module's hyperparameter values and
constant configuration keyed by local name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ShapeMismatch, UnknownOp

Shape = tuple


@dataclass(frozen=True)
class Op:
    name: str
    infer: Callable  # (in_shapes, p) -> out_shapes
    weights: Callable  # (in_shapes, p) -> {param name: shape}
    apply: Callable  # (xs, p, w) -> ys
    homogeneous: Callable  # p -> bool; f(a*x) == a*f(x) for a > 0 once biases are zero


OPS: dict[str, Op] = {}


def register_op(op: Op) -> Op:
    OPS[op.name] = op
    return op


def get_op(name: str) -> Op:
    try:
        return OPS[name]
    except KeyError:
        raise UnknownOp(f"no op registered under {name!r}") from None


def _no_weights(in_shapes, p):
    return {}


def _one_input(in_shapes):
    if len(in_shapes) != 1:
        raise ShapeMismatch(f"expected 1 input, got {len(in_shapes)}")
    return in_shapes[0]


def _positive_int(p, key):
    v = p.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
        raise ShapeMismatch(f"{key} must be a positive integer, got {v!r}")
    return v


def _elementwise(name, fn, homogeneous):
    return register_op(
        Op(
            name,
            infer=lambda s, p: [_one_input(s)],
            weights=_no_weights,
            apply=lambda xs, p, w: [fn(xs[0])],
            homogeneous=lambda p: homogeneous,
        )
    )


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


_elementwise("identity", lambda x: x, True)
_elementwise("relu", lambda x: np.maximum(x, 0.0), True)
_elementwise("tanh", np.tanh, False)
_elementwise("sigmoid", _sigmoid, False)

# inference semantics: the rate only matters to the search space
register_op(
    Op(
        "dropout",
        infer=lambda s, p: [_one_input(s)],
        weights=_no_weights,
        apply=lambda xs, p, w: [xs[0]],
        homogeneous=lambda p: True,
    )
)

NONLINEARITIES = {
    "relu": lambda x: np.maximum(x, 0.0),
    "tanh": np.tanh,
    "sigmoid": _sigmoid,
    "identity": lambda x: x,
}


def _nonlin_infer(s, p):
    if p.get("nonlin") not in NONLINEARITIES:
        raise ShapeMismatch(f"unknown nonlinearity {p.get('nonlin')!r}")
    return [_one_input(s)]


register_op(
    Op(
        "nonlinearity",
        infer=_nonlin_infer,
        weights=_no_weights,
        apply=lambda xs, p, w: [NONLINEARITIES[p["nonlin"]](xs[0])],
        homogeneous=lambda p: p["nonlin"] in ("relu", "identity"),
    )
)


def _dense_infer(s, p):
    shape = _one_input(s)
    units = _positive_int(p, "units")
    if len(shape) < 2:
        raise ShapeMismatch(f"dense needs a batch axis and a feature axis, got {shape}")
    return [shape[:-1] + (units,)]


def _dense_weights(s, p):
    fan_in = s[0][-1]
    units = p["units"]
    return {"W": (fan_in, units), "b": (units,)}


register_op(
    Op(
        "dense",
        infer=_dense_infer,
        weights=_dense_weights,
        apply=lambda xs, p, w: [xs[0] @ w["W"] + w["b"]],
        homogeneous=lambda p: True,
    )
)


def _same_padding(size, kernel, stride):
    out = -(-size // stride)
    total = max((out - 1) * stride + kernel - size, 0)
    return out, total // 2, total - total // 2


def _conv_infer(s, p):
    shape = _one_input(s)
    if len(shape) != 4:
        raise ShapeMismatch(f"conv2d expects [N, H, W, C], got {shape}")
    filters = _positive_int(p, "filters")
    kernel = _positive_int(p, "kernel")
    stride = _positive_int(p, "stride")
    n, h, w, _ = shape
    oh = _same_padding(h, kernel, stride)[0]
    ow = _same_padding(w, kernel, stride)[0]
    return [(n, oh, ow, filters)]


def _conv_weights(s, p):
    c = s[0][3]
    k = p["kernel"]
    return {"W": (k, k, c, p["filters"]), "b": (p["filters"],)}


def _conv_apply(xs, p, w):
    x = xs[0]
    k, stride = p["kernel"], p["stride"]
    n, h, wd, c = x.shape
    oh, top, bottom = _same_padding(h, k, stride)
    ow, left, right = _same_padding(wd, k, stride)
    xp = np.pad(x, ((0, 0), (top, bottom), (left, right), (0, 0)))
    W = w["W"]
    out = np.zeros((n, oh, ow, W.shape[3]))
    for di in range(k):
        for dj in range(k):
            patch = xp[:, di : di + (oh - 1) * stride + 1 : stride, dj : dj + (ow - 1) * stride + 1 : stride, :]
            out += patch @ W[di, dj]
    return [out + w["b"]]


register_op(
    Op("conv2d", infer=_conv_infer, weights=_conv_weights, apply=_conv_apply, homogeneous=lambda p: True)
)


def _same_shapes(s, p):
    if not s:
        raise ShapeMismatch("expected at least one input")
    if any(t != s[0] for t in s):
        raise ShapeMismatch(f"inputs must share a shape, got {list(s)}")
    return [s[0]]


def _concat_infer(s, p):
    if not s:
        raise ShapeMismatch("expected at least one input")
    head = s[0][:-1]
    for t in s:
        if len(t) != len(s[0]) or t[:-1] != head:
            raise ShapeMismatch(f"concat inputs differ outside the last axis: {list(s)}")
    return [head + (sum(t[-1] for t in s),)]


register_op(
    Op("add", infer=_same_shapes, weights=_no_weights, apply=lambda xs, p, w: [sum(xs[1:], xs[0])],
       homogeneous=lambda p: True)
)
register_op(
    Op("avg", infer=_same_shapes, weights=_no_weights,
       apply=lambda xs, p, w: [sum(xs[1:], xs[0]) / len(xs)], homogeneous=lambda p: True)
)
register_op(
    Op("concat", infer=_concat_infer, weights=_no_weights,
       apply=lambda xs, p, w: [np.concatenate(xs, axis=-1)], homogeneous=lambda p: True)
)
