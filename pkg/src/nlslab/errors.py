"""Exception types shared across the package."""


class NlsLabError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(NlsLabError, ValueError):
    """Non-finite data, empty fields, or out-of-contract arguments."""


class UnsupportedRegimeError(NlsLabError, ValueError):
    """Operation requested outside its (sub/super)critical validity range."""


class PreconditionViolationError(NlsLabError, ValueError):
    """A documented operation precondition does not hold."""


class ConvergenceFailureError(NlsLabError, RuntimeError):
    """An iterative solver ran out of iterations or lost its bracket."""


class NoGroundStateError(ConvergenceFailureError):
    """Shooting could not bracket a ground-state amplitude."""


class BoundaryLeakageError(NlsLabError, ValueError):
    """A constructed or dilated field does not fit inside the periodic box."""


class FormatError(NlsLabError, ValueError):
    """Checkpoint file is malformed; `offset` points at the offending byte."""

    def __init__(self, message, offset=None):
        super().__init__(message if offset is None else f"{message} (offset {offset})")
        self.offset = offset
