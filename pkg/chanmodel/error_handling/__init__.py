"""Errors and diagnostics."""

from .error_manager import ErrorManager, get_error_manager
from .errors import (
    ChannelModelError,
    ConfigValidationError,
    InvalidArgumentError,
    ModelNotAvailableError,
    OutOfDomainError,
    SchemaError,
    SingularFitError,
)

__all__ = [
    "ChannelModelError",
    "ConfigValidationError",
    "ErrorManager",
    "InvalidArgumentError",
    "ModelNotAvailableError",
    "OutOfDomainError",
    "SchemaError",
    "SingularFitError",
    "get_error_manager",
]
