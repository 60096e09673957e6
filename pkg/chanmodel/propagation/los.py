"""LOS-probability models as functions of 2D distance.

Three models share the (d1, d2) parameterization:

- ``d1d2``: ``min(d1/d, 1) (1 - exp(-d/d2)) + exp(-d/d2)``
- ``nyu_squared``: the d1d2 value squared
- ``3gpp_uma``: d1d2 with (18, 63) times ``1 + C(d, h_UT)``, height-corrected

For indoor UEs the distance argument is the 2D distance from the AP to the
outer wall (see ``indoor_effective_distance``).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from chanmodel.error_handling.errors import InvalidArgumentError, OutOfDomainError
from chanmodel.model.scenario_model import UMA_LOS_D1D2, UMI_LOS_D1D2, Environment
from chanmodel.model.units import FloatOrArray, check_distance, unwrap

UMA_HEIGHT_MODEL_MAX_M = 23.0
UMA_HEIGHT_BRANCH_M = 13.0
DEFAULT_UE_HEIGHT_M = 1.5


class LosModel(Enum):
    """Available LOS-probability models."""

    D1D2 = "d1d2"
    NYU_SQUARED = "nyu_squared"
    GPP_UMA = "3gpp_uma"

    @classmethod
    def parse(cls, text: str) -> "LosModel":
        key = text.strip().lower().replace("-", "_")
        aliases = {"nyu": "nyu_squared", "3gpp": "3gpp_uma", "d1/d2": "d1d2"}
        key = aliases.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        choices = ", ".join(m.value for m in cls)
        raise InvalidArgumentError(f"unknown LOS model '{text}' (choose from {choices})")


@dataclass(frozen=True)
class D1D2Params:
    """Breakpoint ``d1`` and decay length ``d2`` in meters."""

    d1: float
    d2: float

    def __post_init__(self):
        if not (self.d1 > 0 and self.d2 > 0):
            raise InvalidArgumentError(
                f"LOS parameters d1 and d2 must be positive, got ({self.d1}, {self.d2})"
            )

    def to_dict(self) -> dict:
        return {"d1_m": self.d1, "d2_m": self.d2}


UMA_3GPP = D1D2Params(*UMA_LOS_D1D2)
UMI_3GPP = D1D2Params(*UMI_LOS_D1D2)


def default_params(environment: Environment) -> D1D2Params:
    """3GPP (d1, d2) pair of an environment."""
    return UMA_3GPP if environment is Environment.UMA else UMI_3GPP


def d1d2_curve(d1: ArrayLike, d2: ArrayLike, d: np.ndarray) -> np.ndarray:
    """Unchecked d1/d2 curve, broadcast over all three arguments."""
    d1 = np.asarray(d1, dtype=float)
    decay = np.exp(-d / np.asarray(d2, dtype=float))
    tail = np.minimum(d1 / d, 1.0) * (1.0 - decay) + decay
    return np.where(d <= d1, 1.0, tail)


def p_los_d1d2(params: D1D2Params, d_m: ArrayLike) -> FloatOrArray:
    """d1/d2 LOS probability; exactly 1 for ``d <= d1``."""
    d = check_distance(d_m)
    return unwrap(d1d2_curve(params.d1, params.d2, d), d_m)


def p_los_nyu_squared(params: D1D2Params, d_m: ArrayLike) -> FloatOrArray:
    """NYU squared LOS probability."""
    p = np.asarray(p_los_d1d2(params, d_m))
    return unwrap(p * p, d_m)


def _height_gain(d: np.ndarray) -> np.ndarray:
    # g(d) is zero up to and including 18 m
    return np.where(d > 18.0, 1.25e-6 * d * d * np.exp(-d / 150.0), 0.0)


def p_los_3gpp_uma(d_m: ArrayLike, h_ut: float = DEFAULT_UE_HEIGHT_M) -> FloatOrArray:
    """3GPP UMa LOS probability with UE-height correction.

    ``C = 0`` below 13 m and ``((h - 13) / 10)^1.5 g(d)`` up to 23 m. The
    product is clamped to 1 since ``1 + C`` can push it above.
    """
    if not h_ut > 0:
        raise InvalidArgumentError(f"UE height must be positive, got {h_ut} m")
    if h_ut > UMA_HEIGHT_MODEL_MAX_M:
        raise OutOfDomainError(
            f"UE height {h_ut} m is above the {UMA_HEIGHT_MODEL_MAX_M:g} m the UMa model covers"
        )
    d = check_distance(d_m)
    base = np.asarray(p_los_d1d2(UMA_3GPP, d))
    if h_ut < UMA_HEIGHT_BRANCH_M:
        correction = np.zeros_like(d)
    else:
        correction = ((h_ut - UMA_HEIGHT_BRANCH_M) / 10.0) ** 1.5 * _height_gain(d)
    return unwrap(np.minimum(base * (1.0 + correction), 1.0), d_m)


def indoor_effective_distance(d_outer_wall_m: ArrayLike) -> FloatOrArray:
    """Distance fed to the LOS models for an indoor UE: the AP to outer-wall distance."""
    return unwrap(check_distance(d_outer_wall_m), d_outer_wall_m)


def los_probability(
    model: LosModel,
    d_m: ArrayLike,
    params: Optional[D1D2Params] = None,
    h_ut: float = DEFAULT_UE_HEIGHT_M,
) -> FloatOrArray:
    """Evaluate any LOS model.

    ``params`` is required for d1d2 and nyu_squared; the UMa model always
    uses its own (18, 63) pair and ignores it.
    """
    if model is LosModel.GPP_UMA:
        return p_los_3gpp_uma(d_m, h_ut)
    if params is None:
        raise InvalidArgumentError(f"LOS model {model.value} needs (d1, d2) parameters")
    if model is LosModel.D1D2:
        return p_los_d1d2(params, d_m)
    return p_los_nyu_squared(params, d_m)
