"""Exception types shared across the package."""


class SigInvertError(Exception):
    """Base class for package-specific errors."""


class InputFormatError(SigInvertError):
    """Malformed CSV/JSON input."""


class AllocationCapError(SigInvertError):
    """A requested tensor allocation exceeds the configured coefficient cap."""


class NormTooSmall(SigInvertError):
    """Signature level norm below the significance threshold.

    Raised by the slope solver when dividing by ``norm(level)**2`` would be
    meaningless; signals a degenerate or tree-like input.
    """


class AssumptionViolation(SigInvertError):
    """A path violates the angle/segment assumptions required by a check."""
