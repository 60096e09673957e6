"""Error classes for the channel-model toolkit.

Every error carries an optional file/line location, free-form context and a
help text. Help texts are picked from a keyword table when the caller does not
supply one, so CLI users get a hint about how to fix the input.
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


class ChannelModelError(Exception):
    """Base class for toolkit errors."""

    exit_code = EXIT_UNEXPECTED
    help_texts: Dict[str, str] = {}
    default_help: Optional[str] = None

    def __init__(
        self,
        message: str,
        file: Optional[str] = None,
        line: Optional[int] = None,
        context: Optional[str] = None,
        help_text: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        """Initialize the error with detailed information.

        Args:
            message: The error message
            file: The input file the error refers to
            line: The 1-based line number in that file
            context: Additional context about the error
            help_text: Helpful text for fixing the error
            details: Structured values attached for programmatic callers
        """
        self.message = message
        self.file = file
        self.line = line
        self.context = context
        self.details = details or {}
        self.help_text = help_text if help_text is not None else self._get_help(message)

        full_message = message
        if file:
            full_message = f"{file}: {full_message}"
        if line:
            full_message = f"{full_message} at line {line}"
        if context:
            full_message = f"{full_message}\n\n{context}"
        if self.help_text:
            full_message = f"{full_message}\n\nHelp: {self.help_text}"

        super().__init__(full_message)

    def _get_help(self, message: str) -> Optional[str]:
        for key, text in self.help_texts.items():
            if key.lower() in message.lower():
                return text
        return self.default_help


class InvalidArgumentError(ChannelModelError, ValueError):
    """An argument value is outside what a formula accepts."""

    exit_code = EXIT_VALIDATION
    help_texts = {
        "frequency": "Frequencies are given in GHz and must be positive.",
        "close-in": (
            "CI and CIF models are anchored at 1 m; use distances of at least 1 m "
            "or switch to the ABG model."
        ),
        "distance": "Distances are 2D distances in meters and must be positive.",
        "indoor": "Access points must be placed outside every building polygon.",
        "angle": "Incidence angles are degrees from the wall normal, in [0, 90).",
    }


class OutOfDomainError(InvalidArgumentError):
    """A value lies outside the domain a model is defined on."""

    help_texts = {
        "height": "The 3GPP UMa LOS model is defined for UE heights up to 23 m.",
    }


class ModelNotAvailableError(InvalidArgumentError):
    """A model has no published parameters for the requested scenario."""

    default_help = (
        "LOS scenarios only carry CI parameters; use --model ci or an NLOS scenario."
    )


class ConfigValidationError(ChannelModelError):
    """A configuration is inconsistent; raised before any sampling starts."""

    exit_code = EXIT_VALIDATION
    help_texts = {
        "map": (
            "A building map is used only with los_mode 'map'; pass --map together "
            "with los_mode: map, or drop the map."
        ),
        "scenario": "LOS and NLOS scenarios of a drop must belong to the same environment.",
        "seed": "Seeds are non-negative integers.",
    }


class SchemaError(ConfigValidationError):
    """An input file does not follow its documented schema."""

    help_texts = {
        "missing column": "Check the header line against the documented CSV schema.",
        "not a number": "Numeric columns must hold plain decimal numbers.",
        "los": "The los column holds 0 or 1.",
        "polygon": "Polygons are lists of at least three [x, y] vertices in meters.",
    }
    default_help = "See docs/file_formats.md for the expected layout."


class SingularFitError(ChannelModelError, ArithmeticError):
    """The data cannot identify the requested model parameters."""

    exit_code = EXIT_NUMERIC
    help_texts = {
        "gamma": "Fitting ABG needs samples at two or more frequencies.",
        "alpha": "Fitting needs samples at two or more distances.",
        "ple": "All samples sit at the 1 m anchor; add samples farther away.",
    }
