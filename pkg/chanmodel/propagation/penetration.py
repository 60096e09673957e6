"""Outdoor-to-indoor losses.

Building penetration loss follows the parabolic fit ``10 log10(A + B f^2)``
(f in GHz) for two building classes. On top of it come a grazing-incidence
surcharge ``smax (1 - cos theta)`` and a linear per-meter indoor depth loss.
The surcharge shape and the default depth rate are modelling choices, not
measured data.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike

from chanmodel.error_handling.errors import InvalidArgumentError
from chanmodel.model.units import FloatOrArray, check_frequency, unwrap

SURCHARGE_RANGE_DB = (0.0, 20.0)
DEPTH_RATE_RANGE_DB_PER_M = (0.2, 2.0)


class BplClass(Enum):
    """Building classes with their (A, B) constants."""

    LOW_LOSS = "low"
    HIGH_LOSS = "high"

    @property
    def coefficients(self) -> tuple:
        return (5.0, 0.03) if self is BplClass.LOW_LOSS else (10.0, 5.0)


@dataclass(frozen=True)
class O2iConfig:
    """Add-on losses applied after the facade loss."""

    incidence_surcharge_max: float = 20.0
    depth_loss_per_m: float = 0.5

    def __post_init__(self):
        lo, hi = SURCHARGE_RANGE_DB
        if not lo <= self.incidence_surcharge_max <= hi:
            raise InvalidArgumentError(
                f"incidence surcharge must be within [{lo:g}, {hi:g}] dB, "
                f"got {self.incidence_surcharge_max}"
            )
        lo, hi = DEPTH_RATE_RANGE_DB_PER_M
        if not lo <= self.depth_loss_per_m <= hi:
            raise InvalidArgumentError(
                f"indoor depth loss must be within [{lo:g}, {hi:g}] dB/m, "
                f"got {self.depth_loss_per_m}"
            )

    @classmethod
    def from_dict(cls, data: dict) -> "O2iConfig":
        known = {"incidence_surcharge_max", "depth_loss_per_m"}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown o2i keys: {', '.join(sorted(unknown))}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return {
            "incidence_surcharge_max": self.incidence_surcharge_max,
            "depth_loss_per_m": self.depth_loss_per_m,
        }


def bpl(bpl_class: BplClass, f_ghz: ArrayLike) -> FloatOrArray:
    """Building penetration loss in dB."""
    f = check_frequency(f_ghz)
    a, b = bpl_class.coefficients
    return unwrap(10.0 * np.log10(a + b * f * f), f_ghz)


def o2i_loss(
    bpl_class: BplClass,
    f_ghz: ArrayLike,
    depth_m: ArrayLike,
    incidence_deg: ArrayLike = 0.0,
    cfg: O2iConfig = O2iConfig(),
) -> FloatOrArray:
    """Total outdoor-to-indoor loss in dB.

    ``incidence_deg`` is measured from the wall normal and must lie in
    [0, 90); ``depth_m`` is the indoor distance behind the outer wall.
    """
    depth = np.asarray(depth_m, dtype=float)
    angle = np.asarray(incidence_deg, dtype=float)
    if not np.all(np.isfinite(depth)) or np.any(depth < 0):
        raise InvalidArgumentError("indoor depth must be a non-negative distance")
    if not np.all(np.isfinite(angle)) or np.any((angle < 0) | (angle >= 90)):
        raise InvalidArgumentError("incidence angle must lie in [0, 90) degrees")
    surcharge = cfg.incidence_surcharge_max * (1.0 - np.cos(np.radians(angle)))
    total = np.asarray(bpl(bpl_class, f_ghz)) + surcharge + cfg.depth_loss_per_m * depth
    like = np.broadcast_arrays(np.asarray(f_ghz, dtype=float), depth, angle)[0]
    return unwrap(total, like)
