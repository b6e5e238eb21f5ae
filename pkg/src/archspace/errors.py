"""Exception hierarchy shared by every part of the package."""


class SearchSpaceError(Exception):
    """Base class. ``module_id`` is filled in when the failure happened while
    resolving a specific substitution module."""

    module_id = None

    def __str__(self):
        msg = super().__str__()
        if self.module_id is not None:
            return f"[{self.module_id}] {msg}"
        return msg


# construction
class EmptyDomain(SearchSpaceError):
    pass


class DuplicateDomainValue(SearchSpaceError):
    pass


class UnknownHyperparameter(SearchSpaceError):
    pass


class CyclicDependency(SearchSpaceError):
    pass


class DuplicatePortName(SearchSpaceError):
    pass


class UnknownOp(SearchSpaceError):
    pass


class UnknownFunction(SearchSpaceError):
    pass


class UnknownPort(SearchSpaceError):
    pass


class DirectionMismatch(SearchSpaceError):
    pass


class InputAlreadyConnected(SearchSpaceError):
    pass


class ArityMismatch(SearchSpaceError):
    pass


class DomainMismatch(SearchSpaceError):
    pass


# transitions
class AlreadyAssigned(SearchSpaceError):
    pass


class NotIndependent(SearchSpaceError):
    pass


class ValueNotInDomain(SearchSpaceError):
    pass


class SubstitutionPortMismatch(SearchSpaceError):
    pass


class NonPositiveRepeat(SearchSpaceError):
    pass


class GeneratorError(SearchSpaceError):
    """A substitution generator raised something that is not a SearchSpaceError."""


# traversal / compilation
class InvalidOutputNaming(SearchSpaceError):
    pass


class GraphCycle(SearchSpaceError):
    pass


class UnreachableRequiredInput(SearchSpaceError):
    pass


class NotTerminal(SearchSpaceError):
    pass


class ShapeMismatch(SearchSpaceError):
    pass


# search
class DepthExceeded(SearchSpaceError):
    pass


class UnknownToken(SearchSpaceError):
    pass


class SearcherStateError(SearchSpaceError):
    pass


class StuckSearchSpace(SearchSpaceError):
    """No unassigned independent hyperparameter is reachable, yet the space is
    not terminal (an orphaned hyperparameter)."""


class SerializationError(SearchSpaceError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
