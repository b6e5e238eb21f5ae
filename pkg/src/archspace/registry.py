"""Named-function registries and the serializable values that point into them.

Search spaces must serialize while they still contain unresolved substitution
modules and unassigned dependent hyperparameters, so every function a space
holds on to is stored as a registry key plus captured constant parameters
rather than as a Python closure.

Three kinds of registered functions exist:

* dependent functions ``fn(*parent_values, **params) -> scalar``;
* fragment constructors ``fn(space, *args, **params) -> Fragment``, referenced
  through :class:`Thunk` (the equivalent of ``lambda: conv2d(D([64, 128]))``);
* substitution generators ``fn(space, dh, **params) -> Fragment`` where ``dh``
  maps the module's hyperparameter local names to their values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Union

import numpy as np

from .errors import DuplicateDomainValue, EmptyDomain, UnknownFunction

Scalar = Union[int, float, str, bool]

DEPENDENT_FNS: dict[str, Callable] = {}
CONSTRUCTORS: dict[str, Callable] = {}
GENERATORS: dict[str, Callable] = {}


def normalize_scalar(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, str):
        return str(v)
    raise TypeError(f"hyperparameter values must be int, float, str or bool, got {v!r}")


def value_key(v):
    """Exact-equality key: ``1``, ``1.0`` and ``True`` are different values."""
    return (type(v).__name__, v)


class HId(str):
    """Id of a hyperparameter that already lives in a space (a shared reference)."""

    __slots__ = ()

    def __repr__(self):
        return f"HId({str.__repr__(self)})"


class D:
    """Template for a fresh independent hyperparameter with a finite domain.

    Each time a template is handed to a module constructor a *new*
    hyperparameter is registered; share a hyperparameter by passing the
    :class:`HId` returned from registration instead.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        vals = tuple(normalize_scalar(v) for v in values)
        if not vals:
            raise EmptyDomain("domain must contain at least one value")
        keys = [value_key(v) for v in vals]
        if len(set(keys)) != len(keys):
            raise DuplicateDomainValue(f"domain values must be distinct: {list(vals)!r}")
        self.values = vals

    def __eq__(self, other):
        return isinstance(other, D) and [value_key(v) for v in self.values] == [
            value_key(v) for v in other.values
        ]

    def __hash__(self):
        return hash(tuple(value_key(v) for v in self.values))

    def __repr__(self):
        return f"D({list(self.values)!r})"


def _normalize_param(x):
    if isinstance(x, (HId, D, Thunk)) or x is None:
        return x
    if isinstance(x, (list, tuple)):
        return [_normalize_param(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _normalize_param(v) for k, v in x.items()}
    return normalize_scalar(x)


@dataclass(frozen=True)
class Call:
    """Reference to a registered dependent function or generator."""

    fn: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", _normalize_param(dict(self.params)))


@dataclass(frozen=True)
class Thunk:
    """Deferred call of a registered fragment constructor."""

    fn: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fn not in CONSTRUCTORS:
            raise UnknownFunction(f"no fragment constructor named {self.fn!r}")
        object.__setattr__(self, "params", _normalize_param(dict(self.params)))

    def __call__(self, space, *args, **kwargs):
        return CONSTRUCTORS[self.fn](space, *args, **self.params, **kwargs)


def thunk(target, /, **params) -> Thunk:
    """``thunk(conv2d, filters=D([64, 128]))`` ~ ``lambda: conv2d(D([64, 128]))``."""
    name = target if isinstance(target, str) else getattr(target, "registry_name", None)
    if name is None:
        raise UnknownFunction(f"{target!r} is not a registered fragment constructor")
    return Thunk(name, params)


def constructor(fn=None, *, name=None):
    """Register a fragment constructor under its function name."""

    def wrap(f):
        key = name or f.__name__
        CONSTRUCTORS[key] = f
        f.registry_name = key
        return f

    return wrap(fn) if fn is not None else wrap


def generator(name):
    def wrap(f):
        GENERATORS[name] = f
        f.registry_name = name
        return f

    return wrap


def dependent_fn(name):
    def wrap(f):
        DEPENDENT_FNS[name] = f
        f.registry_name = name
        return f

    return wrap


def call_dependent(call: Call, values):
    try:
        fn = DEPENDENT_FNS[call.fn]
    except KeyError:
        raise UnknownFunction(f"no dependent function named {call.fn!r}") from None
    return normalize_scalar(fn(*values, **call.params))


def lookup_generator(call: Call):
    try:
        return GENERATORS[call.fn]
    except KeyError:
        raise UnknownFunction(f"no substitution generator named {call.fn!r}") from None


@dependent_fn("scale")
def _scale(x, factor):
    return factor * x


@dependent_fn("product")
def _product(*xs):
    out = 1
    for x in xs:
        out = out * x
    return out


@dependent_fn("select")
def _select(x, options):
    return options[x]


# JSON encoding of captured parameters

def encode_param(x) -> Any:
    if isinstance(x, HId):
        return {"$ref": str(x)}
    if isinstance(x, D):
        return {"$domain": list(x.values)}
    if isinstance(x, Thunk):
        return {"$thunk": x.fn, "params": encode_param(x.params)}
    if isinstance(x, list):
        return [encode_param(v) for v in x]
    if isinstance(x, dict):
        return {k: encode_param(v) for k, v in x.items()}
    return x


def decode_param(x) -> Any:
    if isinstance(x, dict):
        if set(x) == {"$ref"}:
            return HId(x["$ref"])
        if set(x) == {"$domain"}:
            return D(x["$domain"])
        if set(x) == {"$thunk", "params"}:
            return Thunk(x["$thunk"], decode_param(x["params"]))
        return {k: decode_param(v) for k, v in x.items()}
    if isinstance(x, list):
        return [decode_param(v) for v in x]
    return x


def map_refs(x, f):
    """Rebuild a parameter structure with every :class:`HId` replaced by ``f(id)``."""
    if isinstance(x, HId):
        return HId(f(str(x)))
    if isinstance(x, Thunk):
        return Thunk(x.fn, map_refs(x.params, f))
    if isinstance(x, list):
        return [map_refs(v, f) for v in x]
    if isinstance(x, dict):
        return {k: map_refs(v, f) for k, v in x.items()}
    return x


def iter_refs(x):
    if isinstance(x, HId):
        yield str(x)
    elif isinstance(x, Thunk):
        yield from iter_refs(x.params)
    elif isinstance(x, list):
        for v in x:
            yield from iter_refs(v)
    elif isinstance(x, dict):
        for v in x.values():
            yield from iter_refs(v)
