"""Ray-level multipath components."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from chanmodel.error_handling.errors import InvalidArgumentError
from chanmodel.model.units import db_to_linear


def wrap_azimuth(az_deg: float) -> float:
    """Map an azimuth to [-180, 180)."""
    return float((az_deg + 180.0) % 360.0 - 180.0)


@dataclass(frozen=True)
class RayRecord:
    """One multipath component.

    Delay in ns, angles in degrees, power linear. Azimuths are wrapped to
    [-180, 180) on construction; elevations must lie in [-90, 90].
    """

    delay_ns: float
    aod_az: float
    aod_el: float
    aoa_az: float
    aoa_el: float
    power: float
    xpr_db: Optional[float] = None
    link_id: Optional[str] = None

    def __post_init__(self):
        values = (self.delay_ns, self.aod_az, self.aod_el, self.aoa_az, self.aoa_el, self.power)
        if not all(np.isfinite(values)):
            raise InvalidArgumentError("ray fields must be finite numbers")
        if not self.power > 0:
            raise InvalidArgumentError(f"ray power must be positive, got {self.power}")
        for name in ("aod_el", "aoa_el"):
            if not -90.0 <= getattr(self, name) <= 90.0:
                raise InvalidArgumentError(
                    f"{name} must lie in [-90, 90] degrees, got {getattr(self, name)}"
                )
        if self.xpr_db is not None and not np.isfinite(self.xpr_db):
            raise InvalidArgumentError(f"XPR must be finite, got {self.xpr_db}")
        object.__setattr__(self, "aod_az", wrap_azimuth(self.aod_az))
        object.__setattr__(self, "aoa_az", wrap_azimuth(self.aoa_az))

    @classmethod
    def from_db(cls, power_db: float, **fields) -> "RayRecord":
        return cls(power=float(db_to_linear(power_db)), **fields)

    def sort_key(self) -> tuple:
        """Canonical ordering used to make clustering input-order independent."""
        xpr = -np.inf if self.xpr_db is None else self.xpr_db
        return (
            self.delay_ns,
            self.aod_az,
            self.aod_el,
            self.aoa_az,
            self.aoa_el,
            self.power,
            xpr,
            self.link_id or "",
        )


def ray_columns(rays: Sequence[RayRecord], name: str) -> np.ndarray:
    """One field of every ray as a float array."""
    return np.array([getattr(r, name) for r in rays], dtype=float)
