"""Link-level simulator for resonant beam communication systems."""

__version__ = "0.1.0"

from .errors import (
    BelowThreshold,
    ConfigError,
    EstimationError,
    FrameTooShort,
    ProtocolError,
    RbcomError,
)
from .physics import CavityLink, GainMedium, OperatingPoint

__all__ = [
    "BelowThreshold",
    "CavityLink",
    "ConfigError",
    "EstimationError",
    "FrameTooShort",
    "GainMedium",
    "OperatingPoint",
    "ProtocolError",
    "RbcomError",
    "__version__",
]
