"""Exception types raised across shellkit."""


class ShellkitError(Exception):
    """Base class for all library errors."""


class PosetError(ShellkitError):
    pass


class NotBounded(PosetError):
    pass


class NotReduced(PosetError):
    pass


class Cycle(PosetError):
    pass


class NotComparable(PosetError):
    pass


class ChainNotInPoset(PosetError):
    pass


class BudgetExceeded(ShellkitError):
    """A root or element count went past the configured cap."""


class ParseError(ShellkitError):
    """Malformed input; message names the file and line."""

    def __init__(self, message, source="<input>", line=None):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


class LabelError(ShellkitError):
    pass


class MissingChain(LabelError):
    pass


class ExtraChain(LabelError):
    pass


class OrderingError(ShellkitError):
    pass


class BottomHasNoParent(OrderingError):
    pass


class PreconditionViolated(OrderingError):
    pass


class NotGRAO(OrderingError):
    pass


class NotRAO(OrderingError):
    pass


class NotSelfConsistentTopologicalCL(OrderingError):
    pass


class NotFound(OrderingError):
    """Exhaustive search found no ordering."""


class TimeBudgetExceeded(ShellkitError):
    pass


class CheckerPreconditionFailed(ShellkitError):
    pass


class NotPermutation(ShellkitError):
    pass


class NotCrossing(ShellkitError):
    pass


class InvalidLabel(ShellkitError):
    pass
