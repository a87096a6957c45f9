"""Exception hierarchy.

The CLI maps these onto exit statuses: machine/input problems exit 2,
violated analysis preconditions exit 1, resource and generation failures
exit 3.
"""


class EmsyncError(Exception):
    """Base class for all errors raised by this package."""


class MachineError(EmsyncError):
    """A machine description is invalid."""


class MachineSyntaxError(MachineError):
    """Malformed machine text; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RowSumError(MachineError):
    """Some state's emission probabilities do not sum to 1."""


class DuplicateEdgeError(MachineError):
    """The same (state, symbol) carries two edges."""


class UnknownNameError(MachineError):
    """An edge references an undeclared state or symbol."""


class EdgeProbabilityError(MachineError):
    """An edge probability lies outside (0, 1]."""


class NotStronglyConnectedError(MachineError):
    """The transition graph is not strongly connected."""


class EquivalentStatesError(MachineError):
    """Two states generate identical word distributions."""


class InputError(EmsyncError):
    """An operation received an argument outside its domain."""


class ImpossibleWordError(InputError):
    """A word with zero probability under the given initial distribution."""


class PreconditionError(EmsyncError):
    """An analysis precondition is violated (e.g. sync rate of a non-exact
    machine); carries a human-readable witness in the message."""


class ResourceError(EmsyncError):
    """A configured budget or cap was exceeded."""


class GenerationError(ResourceError):
    """Random machine generation gave up after too many rejections."""


class NumericalError(EmsyncError):
    """Internal numerical failure that valid inputs should never trigger."""


class ConvergenceError(NumericalError):
    """Iteration cap reached before the requested accuracy; carries the best
    bracket known so far."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        self.bracket = bracket
        super().__init__(f"{message} (best bracket [{bracket[0]:.12g}, {bracket[1]:.12g}])")
