"""Value assignment and the dependent-value / substitution fixed point."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import SearchSpace
from .errors import (
    AlreadyAssigned,
    GeneratorError,
    InputAlreadyConnected,
    NotIndependent,
    SearchSpaceError,
    SubstitutionPortMismatch,
    UnknownHyperparameter,
    ValueNotInDomain,
)
from .registry import lookup_generator, normalize_scalar


@dataclass
class Substitution:
    removed: str
    created_modules: list
    created_hyperps: list


@dataclass
class TransitionReport:
    assigned: list = field(default_factory=list)
    substituted: list = field(default_factory=list)
    rerouted: list = field(default_factory=list)

    def extend(self, other: "TransitionReport"):
        self.assigned += other.assigned
        self.substituted += other.substituted
        self.rerouted += other.rerouted


def is_terminal(space: SearchSpace) -> bool:
    return all(h in space.values for h, hp in space.hyperps.items() if hp.is_independent)


def transition(space: SearchSpace, h: str, value) -> TransitionReport:
    """Assign ``value`` to the independent hyperparameter ``h`` in place and
    resolve everything the assignment makes ready."""
    hp = space.hyperps.get(h)
    if hp is None:
        raise UnknownHyperparameter(f"unknown hyperparameter {h!r}")
    if not hp.is_independent:
        raise NotIndependent(f"{h} is a dependent hyperparameter")
    if h in space.values:
        raise AlreadyAssigned(f"{h} already has value {space.values[h]!r}")
    try:
        value = normalize_scalar(value)
    except TypeError as e:
        raise ValueNotInDomain(str(e)) from None
    if not hp.contains(value):
        raise ValueNotInDomain(f"{value!r} is not in the domain of {h}: {list(hp.domain)}")
    space.values[h] = value
    report = TransitionReport(assigned=[(h, value)])
    report.extend(resolve(space))
    return report


def resolve(space: SearchSpace) -> TransitionReport:
    """Run the fixed point without assigning anything new.

    Ready sets are processed in id order within each round.
    """
    report = TransitionReport()
    while True:
        ready_h = sorted(
            h
            for h, hp in space.hyperps.items()
            if not hp.is_independent
            and h not in space.values
            and all(p in space.values for p in hp.parents.values())
        )
        for h in ready_h:
            v = space.compute_dependent(h)
            space.values[h] = v
            report.assigned.append((h, v))
        ready_m = sorted(
            mid
            for mid, m in space.modules.items()
            if m.generator is not None and all(h in space.values for h in m.hyperps.values())
        )
        for mid in ready_m:
            _substitute(space, mid, report)
        if not ready_h and not ready_m:
            return report


def _substitute(space: SearchSpace, mid: str, report: TransitionReport) -> None:
    m = space.modules[mid]
    dh = space.hyperp_values(mid)
    before_modules = set(space.modules)
    before_hyperps = set(space.hyperps)
    fn = lookup_generator(m.generator)
    try:
        fragment = fn(space, dh, **m.generator.params)
        ins, outs = fragment
    except SearchSpaceError as e:
        if e.module_id is None:
            e.module_id = mid
        raise
    except Exception as e:
        err = GeneratorError(f"generator {m.generator.fn!r} failed: {e!r}")
        err.module_id = mid
        raise err from e
    if set(ins) != set(m.inputs) or set(outs) != set(m.outputs):
        err = SubstitutionPortMismatch(
            f"fragment exposes inputs {sorted(ins)} / outputs {sorted(outs)}, "
            f"module has {sorted(m.inputs)} / {sorted(m.outputs)}"
        )
        err.module_id = mid
        raise err
    for port in list(ins.values()) + list(outs.values()):
        if port.module == mid or port.module not in space.modules or port.module in before_modules:
            err = SubstitutionPortMismatch(f"{port} is not a port of the generated fragment")
            err.module_id = mid
            raise err

    touching = [
        (o, i) for i, o in space.incoming.items() if i.module == mid or o.module == mid
    ]
    for o, i in touching:
        del space.incoming[i]
    for o, i in sorted(touching):
        new_o = outs[o.name] if o.module == mid else o
        new_i = ins[i.name] if i.module == mid else i
        if new_i in space.incoming:
            err = InputAlreadyConnected(f"rerouting {o} -> {i} would feed {new_i} twice")
            err.module_id = mid
            raise err
        space.incoming[new_i] = new_o
        report.rerouted.append(((o, i), (new_o, new_i)))

    for name, port in list(space.inputs.items()):
        if port.module == mid:
            space.inputs[name] = ins[port.name]
    for name, port in list(space.outputs.items()):
        if port.module == mid:
            space.outputs[name] = outs[port.name]

    del space.modules[mid]
    report.substituted.append(
        Substitution(
            mid,
            sorted(set(space.modules) - before_modules),
            sorted(set(space.hyperps) - before_hyperps),
        )
    )


def replay(space: SearchSpace, log) -> SearchSpace:
    """Apply an assignment log ``[(hyperp_id, value), ...]`` in place."""
    resolve(space)
    for h, v in log:
        transition(space, h, v)
    return space
