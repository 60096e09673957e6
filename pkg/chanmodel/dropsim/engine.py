"""Monte-Carlo drop engine.

For every UE: place it, pick the nearest AP, resolve indoor state and LOS,
then add up path loss, shadow fading and outdoor-to-indoor loss into the
coupling loss. In stochastic mode indoor UEs are drawn with
``indoor_fraction`` and their LOS test uses the distance to the outer wall,
approximated as ``max(d2d - depth, 1)``. In map mode indoor state, depth and
incidence angle come from the building map.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from chanmodel.error_handling.error_manager import get_error_manager
from chanmodel.error_handling.errors import ConfigValidationError, InvalidArgumentError
from chanmodel.fitting.los_fit import LosBins, bin_los_observations
from chanmodel.geometry.building_map import (
    MAX_INCIDENCE_DEG,
    BuildingMap,
    Position2D,
    is_los,
    outer_wall_distance,
)
from chanmodel.model.units import CLOSE_IN_REFERENCE_M
from chanmodel.propagation.los import los_probability
from chanmodel.propagation.pathloss import (
    PathLossModelKind,
    evaluate_path_loss,
    scenario_model,
    scenario_sigma,
)
from chanmodel.propagation.penetration import BplClass, o2i_loss

from .config import (
    DropConfig,
    IncidenceMode,
    LosMode,
    Placement,
    ShadowingMode,
    config_hash,
)
from .shadowing import (
    SLOT_ANGLE,
    SLOT_BPL_CLASS,
    SLOT_DEPTH,
    SLOT_INCIDENCE,
    SLOT_INDOOR,
    SLOT_LOS,
    SLOT_RADIUS,
    SLOT_SF,
    CorrelatedField,
    iid_shadowing,
    link_uniforms,
)

logger = logging.getLogger(__name__)

DEFAULT_PERCENTILES = (5.0, 10.0, 50.0, 90.0, 95.0)

LINK_COLUMNS = [
    "link",
    "ue_x_m",
    "ue_y_m",
    "ap",
    "d2d_m",
    "los_distance_m",
    "indoor",
    "los",
    "bpl_class",
    "depth_m",
    "incidence_deg",
    "pl_db",
    "sf_db",
    "o2i_db",
    "coupling_loss_db",
]


@dataclass(frozen=True, eq=False)
class DropResult:
    """Per-link table plus the run's identity."""

    links: pd.DataFrame
    config: DropConfig
    seed: int
    config_hash: str

    def __len__(self) -> int:
        return len(self.links)

    def los_by_distance(self) -> LosBins:
        return bin_los_observations(
            self.links["los_distance_m"].to_numpy(),
            self.links["los"].to_numpy(dtype=bool),
            self.config.los_bin_width_m,
        )

    def summary(self, percentiles: Sequence[float] = DEFAULT_PERCENTILES) -> Dict:
        links = self.links
        return {
            "seed": self.seed,
            "config_hash": self.config_hash,
            "link_count": len(links),
            "los_fraction": float(links["los"].mean()),
            "indoor_fraction": float(links["indoor"].mean()),
            "coupling_loss_cdf": coupling_loss_cdf(self, percentiles),
            "los_fraction_by_distance": self.los_by_distance().to_dict(),
        }


def _place_ues(cfg: DropConfig, u: np.ndarray) -> np.ndarray:
    if cfg.placement is Placement.EXPLICIT:
        return np.array(cfg.ue_positions, dtype=float)
    center = np.array(cfg.ap_positions[0], dtype=float)
    r_min2, r_max2 = cfg.min_distance_m**2, cfg.radius_m**2
    r = np.sqrt(r_min2 + u[:, SLOT_RADIUS] * (r_max2 - r_min2))
    phi = 2.0 * np.pi * u[:, SLOT_ANGLE]
    return center + np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def _validate(cfg: DropConfig, building_map: Optional[BuildingMap]) -> None:
    if building_map is not None and cfg.los_mode is not LosMode.MAP:
        raise ConfigValidationError("a building map was given but los_mode is not 'map'")
    if cfg.los_mode is LosMode.MAP:
        if building_map is None:
            raise ConfigValidationError("los_mode 'map' needs a building map")
        for x, y in cfg.ap_positions:
            if building_map.locate(x, y) is not None:
                raise ConfigValidationError(f"AP at ({x:g}, {y:g}) is inside a building")
        if cfg.indoor_fraction:
            get_error_manager().warn(
                "indoor_fraction is ignored in map mode; the map decides who is indoor",
                source="dropsim",
            )


def _resolve_stochastic(cfg: DropConfig, d2d: np.ndarray, u: np.ndarray) -> dict:
    indoor = u[:, SLOT_INDOOR] < cfg.indoor_fraction
    depth = np.where(indoor, u[:, SLOT_DEPTH] * cfg.max_indoor_depth_m, 0.0)
    if cfg.incidence is IncidenceMode.UNIFORM:
        incidence = np.where(indoor, u[:, SLOT_INCIDENCE] * MAX_INCIDENCE_DEG, 0.0)
    else:
        incidence = np.zeros_like(d2d)
    los_distance = np.where(indoor, np.maximum(d2d - depth, CLOSE_IN_REFERENCE_M), d2d)
    p = np.asarray(
        los_probability(cfg.los_model, los_distance, cfg.effective_los_params, cfg.ue_height_m)
    )
    return {
        "indoor": indoor,
        "depth": depth,
        "incidence": incidence,
        "los_distance": los_distance,
        "los": u[:, SLOT_LOS] < p,
    }


def _resolve_map(
    building_map: BuildingMap, aps: np.ndarray, ues: np.ndarray, serving: np.ndarray
) -> dict:
    n = len(ues)
    indoor = np.zeros(n, dtype=bool)
    los = np.zeros(n, dtype=bool)
    depth = np.zeros(n)
    incidence = np.zeros(n)
    los_distance = np.zeros(n)
    for i in range(n):
        ap = Position2D(*aps[serving[i]])
        ue = building_map.place(*ues[i])
        if ue.indoor:
            crossing = outer_wall_distance(building_map, ap, ue)
            indoor[i] = True
            depth[i] = crossing.depth
            incidence[i] = crossing.incidence_deg
            los_distance[i] = max(crossing.wall_distance, CLOSE_IN_REFERENCE_M)
        else:
            los[i] = is_los(building_map, ap, ue)
            los_distance[i] = ap.distance_to(ue)
    return {
        "indoor": indoor,
        "depth": depth,
        "incidence": incidence,
        "los_distance": los_distance,
        "los": los,
    }


def run_drop(
    cfg: DropConfig, building_map: Optional[BuildingMap] = None, seed: Optional[int] = None
) -> DropResult:
    """Simulate one drop; identical (cfg, map, seed) give identical results."""
    _validate(cfg, building_map)
    seed = cfg.rng_seed if seed is None else seed
    if seed is None:
        raise ConfigValidationError("a drop needs a seed (rng_seed or --seed)")
    if seed < 0:
        raise ConfigValidationError(f"seed must be non-negative, got {seed}")
    logger.info("Running drop: %d UEs, seed %d, %s LOS", cfg.ue_count, seed, cfg.los_mode.value)

    u = link_uniforms(seed, cfg.ue_count)
    ues = _place_ues(cfg, u)
    aps = np.array(cfg.ap_positions, dtype=float)
    distances = np.hypot(ues[:, None, 0] - aps[None, :, 0], ues[:, None, 1] - aps[None, :, 1])
    serving = np.argmin(distances, axis=1)
    d2d = distances[np.arange(len(ues)), serving]
    too_close = d2d < CLOSE_IN_REFERENCE_M
    if np.any(too_close):
        get_error_manager().warn(
            f"{int(too_close.sum())} UEs are closer than 1 m to their AP; "
            "their distance is raised to 1 m",
            source="dropsim",
        )
        d2d = np.maximum(d2d, CLOSE_IN_REFERENCE_M)

    if cfg.los_mode is LosMode.MAP:
        state = _resolve_map(building_map, aps, ues, serving)
    else:
        state = _resolve_stochastic(cfg, d2d, u)
    los, indoor = state["los"], state["indoor"]

    pl = np.empty(len(ues))
    sigma = np.empty(len(ues))
    for flag, scenario in ((True, cfg.los_scenario), (False, cfg.nlos_scenario)):
        mask = los == flag
        kind = cfg.pl_model if not scenario.is_los else PathLossModelKind.CI
        if np.any(mask):
            model = scenario_model(scenario, kind)
            pl[mask] = evaluate_path_loss(model, cfg.frequency_ghz, d2d[mask])
        sigma[mask] = scenario_sigma(scenario, kind)

    if cfg.sf_mode is ShadowingMode.OFF:
        sf = np.zeros(len(ues))
    elif cfg.sf_mode is ShadowingMode.IID:
        sf = iid_shadowing(u[:, SLOT_SF], sigma)
    else:
        field = CorrelatedField.draw(seed, cfg.decorrelation_distance_m)
        sf = sigma * field(ues)

    high = u[:, SLOT_BPL_CLASS] < cfg.bpl_high_fraction
    o2i = np.zeros(len(ues))
    classes = ((BplClass.HIGH_LOSS, indoor & high), (BplClass.LOW_LOSS, indoor & ~high))
    for bpl_class, mask in classes:
        if np.any(mask):
            o2i[mask] = o2i_loss(
                bpl_class,
                cfg.frequency_ghz,
                state["depth"][mask],
                state["incidence"][mask],
                cfg.o2i,
            )

    links = pd.DataFrame(
        {
            "link": np.arange(len(ues)),
            "ue_x_m": ues[:, 0],
            "ue_y_m": ues[:, 1],
            "ap": serving,
            "d2d_m": d2d,
            "los_distance_m": state["los_distance"],
            "indoor": indoor.astype(int),
            "los": los.astype(int),
            "bpl_class": np.where(
                indoor, np.where(high, BplClass.HIGH_LOSS.value, BplClass.LOW_LOSS.value), ""
            ),
            "depth_m": state["depth"],
            "incidence_deg": state["incidence"],
            "pl_db": pl,
            "sf_db": sf,
            "o2i_db": o2i,
            "coupling_loss_db": pl + sf + o2i,
        },
        columns=LINK_COLUMNS,
    )
    logger.info(
        "Drop done: LOS fraction %.3f, indoor fraction %.3f",
        links["los"].mean(),
        links["indoor"].mean(),
    )
    return DropResult(links=links, config=cfg, seed=seed, config_hash=config_hash(cfg))


def coupling_loss_cdf(
    result: DropResult, percentiles: Sequence[float] = DEFAULT_PERCENTILES
) -> Dict[str, float]:
    """Empirical coupling-loss percentiles keyed ``p<percentile>``."""
    if len(result) == 0:
        raise InvalidArgumentError("coupling-loss percentiles need a non-empty drop")
    values = result.links["coupling_loss_db"].to_numpy()
    levels = np.asarray(percentiles, dtype=float)
    if np.any((levels < 0) | (levels > 100)):
        raise InvalidArgumentError("percentiles must lie within [0, 100]")
    return {f"p{level:g}": float(v) for level, v in zip(levels, np.percentile(values, levels))}
