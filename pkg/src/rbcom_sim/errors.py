"""Exception types shared across the simulator modules."""


class RbcomError(Exception):
    """Base class for all simulator errors."""


class BelowThreshold(RbcomError):
    """Round-trip gain cannot reach unity: no resonant beam forms.

    Signals an infeasible scenario (too much loss for the available gain),
    not a bug.
    """


class FrameTooShort(RbcomError):
    """Distance/bandwidth combination leaves no room for SS plus payload."""


class EstimationError(RbcomError):
    """Channel estimation impossible (degenerate reference sequence)."""


class ProtocolError(RbcomError):
    """Transceiver state machine used out of order."""


class ConfigError(RbcomError):
    """Experiment configuration failed to parse or validate."""
