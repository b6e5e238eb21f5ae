"""Search-space graph: hyperparameters, modules, ports, edges and naming scope."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import ops
from .errors import (
    ArityMismatch,
    CyclicDependency,
    DirectionMismatch,
    DuplicatePortName,
    InputAlreadyConnected,
    UnknownFunction,
    UnknownHyperparameter,
    UnknownPort,
)
from .registry import (
    DEPENDENT_FNS,
    GENERATORS,
    Call,
    D,
    HId,
    call_dependent,
    iter_refs,
    value_key,
)


class Input(NamedTuple):
    module: str
    name: str

    def __str__(self):
        return f"{self.module}.{self.name}"


class Output(NamedTuple):
    module: str
    name: str

    def __str__(self):
        return f"{self.module}.{self.name}"


class Fragment(NamedTuple):
    """``(inputs, outputs)`` name-to-port maps of a (sub-)search space."""

    inputs: dict
    outputs: dict


@dataclass(frozen=True)
class Hyperparameter:
    id: str
    domain: Optional[tuple] = None
    parents: Optional[dict] = None
    fn: Optional[Call] = None

    @property
    def is_independent(self) -> bool:
        return self.domain is not None

    def contains(self, value) -> bool:
        k = value_key(value)
        return any(value_key(v) == k for v in self.domain)


@dataclass(frozen=True)
class Module:
    id: str
    type_name: str
    inputs: tuple
    outputs: tuple
    hyperps: dict
    op: Optional[str] = None
    config: dict = field(default_factory=dict)
    generator: Optional[Call] = None

    @property
    def is_basic(self) -> bool:
        return self.generator is None


class Scope:
    """Per-prefix counters producing ``<prefix>-<k>`` names."""

    def __init__(self, counters=None):
        self.counters = dict(counters or {})

    def fresh_name(self, prefix: str) -> str:
        k = self.counters.get(prefix, 0) + 1
        self.counters[prefix] = k
        return f"{prefix}-{k}"

    def copy(self) -> "Scope":
        return Scope(self.counters)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    severity: str = "error"


class SearchSpace:
    """Mutable search-space graph.

    Modules and hyperparameter definitions are immutable records; the mutable
    state is the collection dicts, the assigned values, the edge map and the
    scope, so :meth:`copy` is cheap and copies are fully independent.
    """

    def __init__(self):
        self.modules: dict[str, Module] = {}
        self.hyperps: dict[str, Hyperparameter] = {}
        self.values: dict = {}
        # input port -> the output port feeding it
        self.incoming: dict[Input, Output] = {}
        self.inputs: dict[str, Input] = {}
        self.outputs: dict[str, Output] = {}
        self.scope = Scope()

    def copy(self) -> "SearchSpace":
        other = SearchSpace.__new__(SearchSpace)
        other.modules = dict(self.modules)
        other.hyperps = dict(self.hyperps)
        other.values = dict(self.values)
        other.incoming = dict(self.incoming)
        other.inputs = dict(self.inputs)
        other.outputs = dict(self.outputs)
        other.scope = self.scope.copy()
        return other

    __copy__ = copy

    def __deepcopy__(self, memo):
        return self.copy()

    def __repr__(self):
        return (
            f"<SearchSpace modules={len(self.modules)} hyperps={len(self.hyperps)} "
            f"edges={len(self.incoming)}>"
        )

    # hyperparameters

    def add_independent_hyperp(self, domain) -> HId:
        d = domain if isinstance(domain, D) else D(domain)
        hid = self.scope.fresh_name("IH")
        self.hyperps[hid] = Hyperparameter(hid, domain=d.values)
        return HId(hid)

    def add_dependent_hyperp(self, parents: dict, fn: Call) -> HId:
        if fn.fn not in DEPENDENT_FNS:
            raise UnknownFunction(f"no dependent function named {fn.fn!r}")
        prefix = "DH"
        candidate = f"{prefix}-{self.scope.counters.get(prefix, 0) + 1}"
        resolved = {}
        for name, ref in sorted(parents.items()):
            if isinstance(ref, str) and ref == candidate:
                raise CyclicDependency(f"{candidate} cannot depend on itself")
            resolved[str(name)] = self.hyperp(ref)
        if self._depends_on(resolved.values(), candidate):
            raise CyclicDependency(f"{candidate} would be part of a dependency cycle")
        hid = self.scope.fresh_name(prefix)
        self.hyperps[hid] = Hyperparameter(hid, parents=resolved, fn=fn)
        return HId(hid)

    def _depends_on(self, roots, target) -> bool:
        stack, seen = list(roots), set()
        while stack:
            h = stack.pop()
            if h == target:
                return True
            if h in seen:
                continue
            seen.add(h)
            hp = self.hyperps.get(h)
            if hp is not None and hp.parents:
                stack.extend(hp.parents.values())
        return False

    def hyperp(self, ref) -> HId:
        """Resolve a hyperparameter argument: an existing id, or a :class:`D`
        template which registers a fresh independent hyperparameter."""
        if isinstance(ref, D):
            return self.add_independent_hyperp(ref)
        if isinstance(ref, str):
            if ref not in self.hyperps:
                raise UnknownHyperparameter(f"unknown hyperparameter {ref!r}")
            return HId(ref)
        raise TypeError(f"expected a hyperparameter id or D(...), got {ref!r}")

    def is_assigned(self, h: str) -> bool:
        return h in self.values

    def value(self, h: str):
        return self.values[h]

    def hyperp_values(self, module_id: str) -> dict:
        """Values of a module's hyperparameters keyed by local name, sorted."""
        m = self.modules[module_id]
        return {name: self.values[m.hyperps[name]] for name in sorted(m.hyperps)}

    def parent_values(self, h: str) -> list:
        hp = self.hyperps[h]
        return [self.values[hp.parents[name]] for name in sorted(hp.parents)]

    def compute_dependent(self, h: str):
        return call_dependent(self.hyperps[h].fn, self.parent_values(h))

    # modules

    def _register_module(self, type_name, inputs, outputs, hyperps, **kind) -> Fragment:
        inputs = tuple(str(n) for n in inputs)
        outputs = tuple(str(n) for n in outputs)
        if not inputs or not outputs:
            raise ArityMismatch(f"{type_name}: modules need at least one input and one output")
        for names, what in ((inputs, "input"), (outputs, "output")):
            if len(set(names)) != len(names):
                raise DuplicatePortName(f"{type_name}: duplicate {what} names in {list(names)}")
        # validate every existing reference before registering anything
        for name, ref in hyperps.items():
            if not isinstance(ref, D):
                self.hyperp(ref)
        mid = self.scope.fresh_name(type_name)
        resolved = {str(name): str(self.hyperp(hyperps[name])) for name in sorted(hyperps)}
        self.modules[mid] = Module(mid, type_name, inputs, outputs, resolved, **kind)
        return Fragment(
            {n: Input(mid, n) for n in inputs},
            {n: Output(mid, n) for n in outputs},
        )

    def add_basic_module(self, type_name, inputs, outputs, hyperps, op, config=None) -> Fragment:
        ops.get_op(op)
        return self._register_module(
            type_name, inputs, outputs, hyperps, op=op, config=dict(config or {})
        )

    def add_substitution_module(self, type_name, inputs, outputs, hyperps, generator: Call) -> Fragment:
        if generator.fn not in GENERATORS:
            raise UnknownFunction(f"no substitution generator named {generator.fn!r}")
        return self._register_module(type_name, inputs, outputs, hyperps, generator=generator)

    # ports and edges

    def _check_port(self, port):
        m = self.modules.get(port.module)
        names = () if m is None else (m.inputs if isinstance(port, Input) else m.outputs)
        if port.name not in names:
            raise UnknownPort(f"no such port {port}")

    def connect(self, src: Output, dst: Input) -> None:
        if isinstance(src, Input) and isinstance(dst, Output):
            src, dst = dst, src
        if not isinstance(src, Output) or not isinstance(dst, Input):
            raise DirectionMismatch(f"edges go from an output to an input, got {src!r} -> {dst!r}")
        self._check_port(src)
        self._check_port(dst)
        if dst in self.incoming:
            raise InputAlreadyConnected(f"{dst} is already fed by {self.incoming[dst]}")
        self.incoming[dst] = src

    @property
    def edges(self) -> list:
        return sorted((o, i) for i, o in self.incoming.items())

    def set_io(self, fragment: Fragment) -> "SearchSpace":
        """Name the space's externally visible ports (what the space function returns)."""
        ins, outs = fragment
        for p in list(ins.values()) + list(outs.values()):
            self._check_port(p)
        self.inputs = dict(ins)
        self.outputs = dict(outs)
        return self

    # partitions

    def independent_ids(self):
        return {h for h, hp in self.hyperps.items() if hp.is_independent}

    def dependent_ids(self):
        return {h for h, hp in self.hyperps.items() if not hp.is_independent}

    def assigned_ids(self):
        return set(self.values)

    def unassigned_ids(self):
        return {h for h in self.hyperps if h not in self.values}

    def basic_ids(self):
        return {m for m, mod in self.modules.items() if mod.is_basic}

    def substitution_ids(self):
        return {m for m, mod in self.modules.items() if not mod.is_basic}


def new_search_space() -> SearchSpace:
    return SearchSpace()


def validate(space: SearchSpace) -> list:
    """All structural problems of ``space``; an empty list means well-formed.

    Modules unreachable backwards from the named outputs are reported with
    severity ``"warning"``.
    """
    out = []
    for m in space.modules.values():
        for name, h in sorted(m.hyperps.items()):
            if h not in space.hyperps:
                out.append(Violation("dangling-hyperparameter", f"{m.id}.{name} refers to missing {h}"))
        if m.generator is not None:
            for h in iter_refs(m.generator.params):
                if h not in space.hyperps:
                    out.append(Violation("dangling-hyperparameter", f"generator of {m.id} refers to missing {h}"))
    for hp in space.hyperps.values():
        if hp.is_independent:
            if hp.id in space.values and not hp.contains(space.values[hp.id]):
                out.append(Violation("value-not-in-domain", f"{hp.id} = {space.values[hp.id]!r}"))
            continue
        missing = [p for p in hp.parents.values() if p not in space.hyperps]
        for p in missing:
            out.append(Violation("dangling-hyperparameter", f"{hp.id} depends on missing {p}"))
        if missing:
            continue
        if space._depends_on(hp.parents.values(), hp.id):
            out.append(Violation("cyclic-dependency", f"{hp.id} is on a dependency cycle"))
            continue
        if hp.id in space.values:
            if not all(p in space.values for p in hp.parents.values()):
                out.append(Violation("stale-dependent", f"{hp.id} assigned before its parents"))
            elif value_key(space.compute_dependent(hp.id)) != value_key(space.values[hp.id]):
                out.append(Violation("stale-dependent", f"{hp.id} disagrees with its function"))
    for h in space.values:
        if h not in space.hyperps:
            out.append(Violation("dangling-hyperparameter", f"value recorded for missing {h}"))
    for i, o in space.incoming.items():
        for port in (i, o):
            try:
                space._check_port(port)
            except UnknownPort:
                out.append(Violation("dangling-edge", f"edge {o} -> {i} references missing {port}"))
    for name, port in list(space.inputs.items()) + list(space.outputs.items()):
        try:
            space._check_port(port)
        except UnknownPort:
            out.append(Violation("dangling-io", f"external port {name!r} -> missing {port}"))
    if not any(v.severity == "error" for v in out) and space.outputs:
        from .traversal import ordered_modules

        reached = set(ordered_modules(space))
        for mid in sorted(set(space.modules) - reached):
            out.append(Violation("unreachable-module", f"{mid} does not feed any named output", "warning"))
    return out
