"""Collects non-fatal diagnostics raised while evaluating or fitting models.

Failures are exceptions (see ``errors``); everything recorded here is a
warning that lets the run finish.
"""

from typing import Any, Dict, List, Optional
import logging

logger = logging.getLogger(__name__)


class ErrorManager:
    """Keeps the diagnostics of the current run."""

    _instance: Optional["ErrorManager"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._errors = []
        return cls._instance

    def warn(self, message: str, **context: Any) -> None:
        """Record a warning and log it.

        Args:
            message: The diagnostic message
            **context: Structured values describing where it came from
        """
        self._errors.append({"message": message, "context": context})
        logger.warning(message)

    def get_errors(self) -> List[dict]:
        """Get all recorded diagnostics."""
        return self._errors

    def clear(self) -> None:
        """Forget every recorded diagnostic."""
        self._errors = []

    def has_errors(self) -> bool:
        """Check if anything has been recorded."""
        return bool(self._errors)

    def to_dicts(self) -> List[Dict[str, Any]]:
        """Serializable form used in output metadata."""
        return [
            {"severity": "warning", "message": e["message"], "context": e["context"]}
            for e in self._errors
        ]

    def get_error_summary(self) -> str:
        """Get a one-line-per-diagnostic summary."""
        if not self._errors:
            return "No diagnostics"
        return "\n".join(f"WARNING: {e['message']}" for e in self._errors)


def get_error_manager() -> ErrorManager:
    """Get the singleton error manager instance."""
    return ErrorManager()
