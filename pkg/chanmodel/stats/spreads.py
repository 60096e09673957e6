"""Power-weighted delay and angle spreads, and XPR summaries.

Powers are linear. Azimuth spreads use the circular definition: shift all
azimuths by an offset, wrap, center on the weighted mean, wrap again, take
the weighted RMS and minimize over the offset. The result is piecewise
constant in the offset, changing only when a ray crosses the wrap boundary,
so evaluating the offsets that put each ray at -180 degrees finds the exact
minimum. Spreads therefore never exceed 180 degrees. Elevations do not wrap
and use the plain weighted standard deviation.

XPR is averaged in dB.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np

from chanmodel.error_handling.errors import InvalidArgumentError
from chanmodel.model.rays import RayRecord, ray_columns
from chanmodel.model.scenario_model import LEGACY_SPREAD_RANGES

logger = logging.getLogger(__name__)


class AngleKind(Enum):
    """Which ray angle a spread is computed over."""

    AOD_AZ = "aod_az"
    AOA_AZ = "aoa_az"
    AOD_EL = "aod_el"
    AOA_EL = "aoa_el"

    @property
    def circular(self) -> bool:
        return self in (AngleKind.AOD_AZ, AngleKind.AOA_AZ)


def _weights(rays: Sequence[RayRecord]) -> np.ndarray:
    if not rays:
        raise InvalidArgumentError("spread statistics need at least one ray")
    p = ray_columns(rays, "power")
    total = p.sum()
    if not total > 0:
        raise InvalidArgumentError("total ray power must be positive")
    return p / total


def _wrap(deg: np.ndarray) -> np.ndarray:
    return np.mod(deg + 180.0, 360.0) - 180.0


def weighted_std(values: np.ndarray, w: np.ndarray) -> float:
    """Weighted standard deviation for weights summing to one."""
    mean = np.dot(w, values)
    return float(np.sqrt(np.dot(w, (values - mean) ** 2)))


def circular_spread(angles_deg: np.ndarray, w: np.ndarray) -> float:
    """Circular RMS spread in degrees for weights summing to one."""
    angles = np.asarray(angles_deg, dtype=float)
    if angles.size < 2:
        return 0.0
    offsets = -180.0 - angles
    shifted = _wrap(angles[None, :] + offsets[:, None])
    mu = shifted @ w
    centered = _wrap(shifted - mu[:, None])
    sigma = np.sqrt((centered**2) @ w)
    return float(sigma.min())


def rms_delay_spread(rays: Sequence[RayRecord]) -> float:
    """Power-weighted RMS delay spread in ns."""
    return weighted_std(ray_columns(rays, "delay_ns"), _weights(rays))


def rms_angle_spread(rays: Sequence[RayRecord], which: AngleKind) -> float:
    """Power-weighted RMS angle spread in degrees."""
    w = _weights(rays)
    angles = ray_columns(rays, which.value)
    if which.circular:
        return circular_spread(angles, w)
    return weighted_std(angles, w)


@dataclass(frozen=True)
class XprStats:
    mean_db: float
    std_db: float
    ray_count: int

    def to_dict(self) -> dict:
        return {"mean_db": self.mean_db, "std_db": self.std_db, "ray_count": self.ray_count}


def xpr_stats(rays: Sequence[RayRecord]) -> Optional[XprStats]:
    """Mean and population std of per-ray XPR in dB; None when no ray carries XPR."""
    values = np.array([r.xpr_db for r in rays if r.xpr_db is not None], dtype=float)
    if values.size == 0:
        return None
    return XprStats(float(values.mean()), float(values.std()), int(values.size))


@dataclass(frozen=True)
class SpreadSummary:
    """Spreads of one group of rays (all rays, or one cluster)."""

    ray_count: int
    total_power: float
    rms_delay_spread_ns: float
    asd_az_deg: float
    asa_az_deg: float
    asd_el_deg: float
    asa_el_deg: float
    xpr: Optional[XprStats] = None
    cluster: Optional[int] = None

    @classmethod
    def of(cls, rays: Sequence[RayRecord], cluster: Optional[int] = None) -> "SpreadSummary":
        return cls(
            ray_count=len(rays),
            total_power=float(ray_columns(rays, "power").sum()),
            rms_delay_spread_ns=rms_delay_spread(rays),
            asd_az_deg=rms_angle_spread(rays, AngleKind.AOD_AZ),
            asa_az_deg=rms_angle_spread(rays, AngleKind.AOA_AZ),
            asd_el_deg=rms_angle_spread(rays, AngleKind.AOD_EL),
            asa_el_deg=rms_angle_spread(rays, AngleKind.AOA_EL),
            xpr=xpr_stats(rays),
            cluster=cluster,
        )

    def to_dict(self) -> dict:
        result = {
            "ray_count": self.ray_count,
            "total_power": self.total_power,
            "rms_delay_spread_ns": self.rms_delay_spread_ns,
            "asd_az_deg": self.asd_az_deg,
            "asa_az_deg": self.asa_az_deg,
            "asd_el_deg": self.asd_el_deg,
            "asa_el_deg": self.asa_el_deg,
            "xpr_mean_db": self.xpr.mean_db if self.xpr else None,
            "xpr_std_db": self.xpr.std_db if self.xpr else None,
        }
        if self.cluster is not None:
            result = {"cluster": self.cluster, **result}
        return result


@dataclass(frozen=True)
class SpreadReport:
    """Spreads of the whole ray set and of each cluster."""

    overall: SpreadSummary
    clusters: List[SpreadSummary] = field(default_factory=list)

    def reference_check(self) -> Dict[str, dict]:
        """Compare overall spreads against the typical sub-6 GHz NLOS ranges."""
        observed = {
            "rms_delay_spread_ns": self.overall.rms_delay_spread_ns,
            "asd_az_deg": self.overall.asd_az_deg,
            "asa_az_deg": self.overall.asa_az_deg,
        }
        return {
            key: {
                "value": value,
                "reference_range": list(LEGACY_SPREAD_RANGES[key]),
                "within": LEGACY_SPREAD_RANGES[key][0] <= value <= LEGACY_SPREAD_RANGES[key][1],
            }
            for key, value in observed.items()
        }

    def to_dict(self) -> dict:
        return {
            "overall": self.overall.to_dict(),
            "clusters": [c.to_dict() for c in self.clusters],
            "reference": self.reference_check(),
        }


def spread_report(
    rays: Sequence[RayRecord],
    labels: Optional[Sequence[int]] = None,
    pruned: Optional[Sequence[bool]] = None,
) -> SpreadReport:
    """Overall spreads plus per-cluster spreads when labels are given.

    Pruned rays count toward the overall figures only.
    """
    overall = SpreadSummary.of(rays)
    if labels is None:
        return SpreadReport(overall)
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (len(rays),):
        raise InvalidArgumentError(
            f"got {labels.size} cluster labels for {len(rays)} rays"
        )
    kept = np.ones(len(rays), dtype=bool) if pruned is None else ~np.asarray(pruned, dtype=bool)
    clusters = []
    for cluster in np.unique(labels[kept]):
        members = [rays[i] for i in np.flatnonzero((labels == cluster) & kept)]
        clusters.append(SpreadSummary.of(members, int(cluster)))
    logger.debug("Computed spreads for %d clusters", len(clusters))
    return SpreadReport(overall, clusters)
