"""Identification codes over classical and quantum channels: constructions,
exact verification, Monte Carlo validators and capacity formulas."""

__version__ = "0.1.0"

from .errors import (
    DegenerateParametersError,
    IncompletePovmError,
    InvalidDimensionError,
    InvalidStateError,
    PartialResultError,
    QidError,
    ResourceLimitError,
    UndefinedRateError,
    UnsupportedError,
    VacuousBoundError,
)

__all__ = [
    "DegenerateParametersError",
    "IncompletePovmError",
    "InvalidDimensionError",
    "InvalidStateError",
    "PartialResultError",
    "QidError",
    "ResourceLimitError",
    "UndefinedRateError",
    "UnsupportedError",
    "VacuousBoundError",
    "__version__",
]
