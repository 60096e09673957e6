"""Units, physical constants and argument checks shared by every model.

Frequencies are carried in GHz and distances in meters everywhere. Model
functions accept Python floats or numpy arrays; the checks below work on both.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import constants

from chanmodel.error_handling.error_manager import get_error_manager
from chanmodel.error_handling.errors import InvalidArgumentError

FloatOrArray = Union[float, np.ndarray]

BAND_MIN_GHZ = 0.5
BAND_MAX_GHZ = 100.0
CLOSE_IN_REFERENCE_M = 1.0
ABG_MIN_DISTANCE_M = 0.01
GHZ = 1e9


@dataclass(frozen=True)
class PhysConstants:
    """Physical constants used by the formulas."""

    c: float = constants.speed_of_light


PHYS = PhysConstants()


def unwrap(result: np.ndarray, like: ArrayLike) -> FloatOrArray:
    """Shape a computed array like the caller's input (scalar in, scalar out)."""
    if np.ndim(like) == 0 and np.ndim(result) == 0:
        return float(result)
    return np.asarray(result, dtype=float)


def check_frequency(f_ghz: ArrayLike, *, warn_out_of_band: bool = True) -> np.ndarray:
    """Validate frequencies in GHz.

    Non-positive values raise. Values outside the 0.5-100 GHz band the catalog
    parameters were derived for are accepted but recorded as a warning.
    """
    f = np.asarray(f_ghz, dtype=float)
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise InvalidArgumentError(
            f"frequency must be positive and finite, got {_describe(f)} GHz"
        )
    if warn_out_of_band:
        outside = (f < BAND_MIN_GHZ) | (f > BAND_MAX_GHZ)
        if np.any(outside):
            get_error_manager().warn(
                f"frequency {_describe(f[outside])} GHz is outside the "
                f"{BAND_MIN_GHZ}-{BAND_MAX_GHZ} GHz band of the catalog parameters",
                source="units",
                band=[BAND_MIN_GHZ, BAND_MAX_GHZ],
            )
    return f


def check_distance(d_m: ArrayLike, minimum: float = 0.0, *, what: str = "distance") -> np.ndarray:
    """Validate 2D distances in meters.

    With ``minimum == 0`` the distance must be strictly positive; otherwise it
    must be at least ``minimum``.
    """
    d = np.asarray(d_m, dtype=float)
    if not np.all(np.isfinite(d)):
        raise InvalidArgumentError(f"{what} must be finite, got {_describe(d)} m")
    bad = d <= 0 if minimum <= 0 else d < minimum
    if np.any(bad):
        if minimum >= CLOSE_IN_REFERENCE_M:
            raise InvalidArgumentError(
                f"{what} {_describe(d[bad])} m is below the 1 m close-in anchor"
            )
        limit = "positive" if minimum <= 0 else f"at least {minimum} m"
        raise InvalidArgumentError(f"{what} must be {limit}, got {_describe(d[bad])} m")
    return d


def db_to_linear(value_db: ArrayLike) -> FloatOrArray:
    """Convert a power ratio in dB to linear scale."""
    return unwrap(np.power(10.0, np.asarray(value_db, dtype=float) / 10.0), value_db)


def linear_to_db(value: ArrayLike) -> FloatOrArray:
    """Convert a linear power ratio to dB."""
    return unwrap(10.0 * np.log10(np.asarray(value, dtype=float)), value)


def _describe(values: np.ndarray) -> str:
    flat = np.ravel(values)
    if flat.size == 1:
        return f"{flat[0]:g}"
    return f"[{flat.min():g} .. {flat.max():g}] ({flat.size} values)"
