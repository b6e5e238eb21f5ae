"""Basic-module constructors.

Each constructor adds one basic module to ``space`` and returns its
``(inputs, outputs)`` fragment. Arguments that are :class:`~archspace.D`
templates or :class:`~archspace.HId` references become hyperparameters of the
module; anything else is stored as a constant in the module's config.
"""

from __future__ import annotations

from .core import Fragment, SearchSpace
from .registry import D, HId, constructor, normalize_scalar


def _split(args: dict):
    hyperps, config = {}, {}
    for name, v in args.items():
        if isinstance(v, (D, HId)):
            hyperps[name] = v
        else:
            config[name] = normalize_scalar(v)
    return hyperps, config


def basic(space: SearchSpace, type_name, op, args=None, inputs=("in",), outputs=("out",)) -> Fragment:
    hyperps, config = _split(args or {})
    return space.add_basic_module(type_name, inputs, outputs, hyperps, op, config)


def _in_names(num_inputs):
    if isinstance(num_inputs, bool) or not isinstance(num_inputs, int) or num_inputs < 1:
        raise ValueError(f"num_inputs must be a positive integer, got {num_inputs!r}")
    return [f"in{i}" for i in range(num_inputs)]


@constructor
def dense(space, units):
    return basic(space, "Dense", "dense", {"units": units})


@constructor
def affine(space, units):
    return basic(space, "Affine", "dense", {"units": units})


@constructor
def conv2d(space, filters, kernel=3, stride=1):
    """SAME-padded 2D convolution over ``[N, H, W, C]``."""
    return basic(space, "Conv2D", "conv2d", {"filters": filters, "kernel": kernel, "stride": stride})


@constructor
def dropout(space, rate):
    return basic(space, "Dropout", "dropout", {"rate": rate})


@constructor
def relu(space):
    return basic(space, "ReLU", "relu")


@constructor
def tanh(space):
    return basic(space, "Tanh", "tanh")


@constructor
def sigmoid(space):
    return basic(space, "Sigmoid", "sigmoid")


@constructor
def identity(space):
    return basic(space, "Identity", "identity")


@constructor
def nonlinearity(space, nonlin):
    return basic(space, "Nonlinearity", "nonlinearity", {"nonlin": nonlin})


@constructor
def add(space, num_inputs):
    return basic(space, "Add", "add", inputs=_in_names(num_inputs))


@constructor
def concat(space, num_inputs):
    return basic(space, "Concat", "concat", inputs=_in_names(num_inputs))


@constructor
def avg(space, num_inputs):
    return basic(space, "Avg", "avg", inputs=_in_names(num_inputs))
