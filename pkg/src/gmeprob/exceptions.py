"""Exception hierarchy shared across the package."""


class StateError(ValueError):
    """Base class for rejected state input."""


class StateParseError(StateError):
    """The state document could not be read or has the wrong shape."""


class StateValidationError(StateError):
    """The state was parsed but violates a density-matrix invariant."""


class HermiticityError(StateValidationError):
    pass


class TraceError(StateValidationError):
    pass


class PositivityError(StateValidationError):
    pass


class CapabilityError(RuntimeError):
    """Requested work exceeds what a routine supports (size caps, exhausted inputs)."""
