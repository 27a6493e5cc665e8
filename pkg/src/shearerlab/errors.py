"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: parse errors 2, cap violations 3,
precondition violations 4.
"""


class ShearerError(Exception):
    """Base class for every error raised by shearerlab."""


class GraphError(ShearerError, ValueError):
    """Malformed graph input (index out of range, loop edge, bad file)."""


class CapExceeded(ShearerError):
    """An exponential-size computation was requested above its cap."""


class PreconditionError(ShearerError, ValueError):
    """The arguments violate a documented precondition."""


class OutsideRegion(PreconditionError):
    """A critical function that must be positive is not.

    ``witness`` is the offending vertex subset (bitmask) when known.
    """

    def __init__(self, message, witness=None, value=None):
        super().__init__(message)
        self.witness = witness
        self.value = value


class NoEscape(PreconditionError):
    """Some component of the window has no neighbour in the exterior."""


class MinorationViolated(PreconditionError):
    """Conditional probability fell below the target in the sequential coupling."""

    def __init__(self, prefix, index, cond, target):
        super().__init__(
            f"P(Z_{index}=1 | prefix={prefix}) = {float(cond):.6g} < {float(target):.6g}"
        )
        self.prefix = prefix
        self.index = index
        self.cond = cond
        self.target = target
