"""Drop configuration: parsing, validation and hashing."""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from chanmodel.error_handling.errors import ChannelModelError, ConfigValidationError
from chanmodel.model.scenario_model import Environment, ScenarioId
from chanmodel.propagation.los import (
    UMA_HEIGHT_MODEL_MAX_M,
    D1D2Params,
    LosModel,
    default_params,
)
from chanmodel.propagation.pathloss import PathLossModelKind
from chanmodel.propagation.penetration import O2iConfig


class LosMode(Enum):
    STOCHASTIC = "stochastic"
    MAP = "map"


class ShadowingMode(Enum):
    IID = "iid"
    EXP_CORRELATED = "exp_correlated"
    OFF = "off"


class Placement(Enum):
    DISC = "disc"
    EXPLICIT = "explicit"


class IncidenceMode(Enum):
    NORMAL = "normal"
    UNIFORM = "uniform"


def _enum(enum_cls, value, key: str):
    text = str(value).strip().lower()
    for candidate in (text, text.replace("-", "_"), text.replace("_", "-")):
        try:
            return enum_cls(candidate)
        except ValueError:
            continue
    choices = ", ".join(m.value for m in enum_cls)
    raise ConfigValidationError(f"{key} must be one of {choices}, got '{value}'")


@dataclass(frozen=True)
class DropConfig:
    """Everything a drop needs besides the optional building map."""

    los_scenario: ScenarioId = ScenarioId.UMI_SC_LOS
    nlos_scenario: ScenarioId = ScenarioId.UMI_SC_NLOS
    frequency_ghz: float = 28.0
    ue_count: int = 1000
    placement: Placement = Placement.DISC
    radius_m: float = 200.0
    min_distance_m: float = 10.0
    ue_positions: Tuple[Tuple[float, float], ...] = ()
    ap_positions: Tuple[Tuple[float, float], ...] = ((0.0, 0.0),)
    ue_height_m: float = 1.5
    los_mode: LosMode = LosMode.STOCHASTIC
    los_model: LosModel = LosModel.D1D2
    los_params: Optional[D1D2Params] = None
    pl_model: PathLossModelKind = PathLossModelKind.CI
    indoor_fraction: float = 0.0
    max_indoor_depth_m: float = 25.0
    bpl_high_fraction: float = 0.0
    incidence: IncidenceMode = IncidenceMode.NORMAL
    o2i: O2iConfig = field(default_factory=O2iConfig)
    sf_mode: ShadowingMode = ShadowingMode.IID
    decorrelation_distance_m: Optional[float] = None
    los_bin_width_m: float = 10.0
    rng_seed: Optional[int] = None

    def __post_init__(self):
        if self.los_scenario.environment is not self.nlos_scenario.environment:
            raise ConfigValidationError(
                f"scenario pair {self.los_scenario.value}/{self.nlos_scenario.value} "
                "mixes environments"
            )
        if not self.los_scenario.is_los or self.nlos_scenario.is_los:
            raise ConfigValidationError(
                "scenario pair must list the LOS scenario first and the NLOS scenario second"
            )
        if not self.frequency_ghz > 0:
            raise ConfigValidationError(f"frequency must be positive, got {self.frequency_ghz}")
        if self.placement is Placement.EXPLICIT:
            if not self.ue_positions:
                raise ConfigValidationError("explicit placement needs ue_positions")
            object.__setattr__(self, "ue_count", len(self.ue_positions))
        else:
            if self.ue_count < 1:
                raise ConfigValidationError(f"ue_count must be at least 1, got {self.ue_count}")
            if not 1.0 <= self.min_distance_m < self.radius_m:
                raise ConfigValidationError(
                    "disc placement needs 1 m <= min_distance_m < radius_m, got "
                    f"{self.min_distance_m} and {self.radius_m}"
                )
        if not self.ap_positions:
            raise ConfigValidationError("at least one AP position is required")
        if not 0.0 < self.ue_height_m <= UMA_HEIGHT_MODEL_MAX_M:
            raise ConfigValidationError(
                f"ue_height_m must be in (0, {UMA_HEIGHT_MODEL_MAX_M:g}], got {self.ue_height_m}"
            )
        if self.pl_model is PathLossModelKind.CIF:
            raise ConfigValidationError("drops support the ci and abg path loss models")
        if self.los_model is LosModel.GPP_UMA and self.environment is not Environment.UMA:
            raise ConfigValidationError("the 3gpp_uma LOS model needs a UMa scenario pair")
        for name in ("indoor_fraction", "bpl_high_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigValidationError(f"{name} must be within [0, 1], got {getattr(self, name)}")
        if self.max_indoor_depth_m < 0:
            raise ConfigValidationError("max_indoor_depth_m must be non-negative")
        if self.sf_mode is ShadowingMode.EXP_CORRELATED:
            if self.decorrelation_distance_m is None or not self.decorrelation_distance_m > 0:
                raise ConfigValidationError(
                    "exp_correlated shadowing needs a positive decorrelation_distance_m"
                )
        if not self.los_bin_width_m > 0:
            raise ConfigValidationError("los_bin_width_m must be positive")
        if self.rng_seed is not None and self.rng_seed < 0:
            raise ConfigValidationError(f"seed must be non-negative, got {self.rng_seed}")

    @property
    def environment(self) -> Environment:
        return self.los_scenario.environment

    @property
    def effective_los_params(self) -> D1D2Params:
        return self.los_params or default_params(self.environment)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DropConfig":
        """Build a config from parsed JSON/YAML.

        The scenario pair is given either as ``environment`` (uma, umi-sc,
        umi-os) or as ``scenarios: {los: ..., nlos: ...}``.
        """
        data = dict(data)
        kwargs: Dict[str, Any] = {}
        try:
            if "scenarios" in data:
                pair = data.pop("scenarios")
                kwargs["los_scenario"] = ScenarioId.parse(pair["los"])
                kwargs["nlos_scenario"] = ScenarioId.parse(pair["nlos"])
            if "environment" in data:
                env = _enum(Environment, data.pop("environment"), "environment").value
                if "los_scenario" in kwargs:
                    raise ConfigValidationError("give either environment or scenarios, not both")
                kwargs["los_scenario"] = ScenarioId(f"{env}-los")
                kwargs["nlos_scenario"] = ScenarioId(f"{env}-nlos")
            enums = {
                "placement": Placement,
                "los_mode": LosMode,
                "pl_model": PathLossModelKind,
                "incidence": IncidenceMode,
                "sf_mode": ShadowingMode,
            }
            for key, enum_cls in enums.items():
                if key in data:
                    kwargs[key] = _enum(enum_cls, data.pop(key), key)
            if "los_model" in data:
                kwargs["los_model"] = LosModel.parse(str(data.pop("los_model")))
            if "los_params" in data:
                params = data.pop("los_params")
                kwargs["los_params"] = (
                    None if params is None else D1D2Params(float(params["d1"]), float(params["d2"]))
                )
            if "o2i" in data:
                kwargs["o2i"] = O2iConfig.from_dict(data.pop("o2i") or {})
            for key in ("ue_positions", "ap_positions"):
                if key in data:
                    kwargs[key] = tuple((float(x), float(y)) for x, y in data.pop(key))
            floats = (
                "frequency_ghz",
                "radius_m",
                "min_distance_m",
                "ue_height_m",
                "indoor_fraction",
                "max_indoor_depth_m",
                "bpl_high_fraction",
                "decorrelation_distance_m",
                "los_bin_width_m",
            )
            for key in floats:
                if key in data and data[key] is not None:
                    kwargs[key] = float(data.pop(key))
            for key in ("ue_count", "rng_seed"):
                if key in data and data[key] is not None:
                    kwargs[key] = int(data.pop(key))
        except ConfigValidationError:
            raise
        except ChannelModelError as e:
            raise ConfigValidationError(e.message) from e
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigValidationError(f"malformed drop configuration: {e}") from e

        leftover = sorted(k for k, v in data.items() if v is not None)
        if leftover:
            raise ConfigValidationError(f"unknown drop configuration keys: {', '.join(leftover)}")
        return cls(**kwargs)

    def to_dict(self) -> Dict[str, Any]:
        """Canonical resolved form; also the input of ``config_hash``."""
        return {
            "scenarios": {"los": self.los_scenario.value, "nlos": self.nlos_scenario.value},
            "frequency_ghz": self.frequency_ghz,
            "ue_count": self.ue_count,
            "placement": self.placement.value,
            "radius_m": self.radius_m,
            "min_distance_m": self.min_distance_m,
            "ue_positions": [list(p) for p in self.ue_positions],
            "ap_positions": [list(p) for p in self.ap_positions],
            "ue_height_m": self.ue_height_m,
            "los_mode": self.los_mode.value,
            "los_model": self.los_model.value,
            "los_params": {
                "d1": self.effective_los_params.d1,
                "d2": self.effective_los_params.d2,
            },
            "pl_model": self.pl_model.value,
            "indoor_fraction": self.indoor_fraction,
            "max_indoor_depth_m": self.max_indoor_depth_m,
            "bpl_high_fraction": self.bpl_high_fraction,
            "incidence": self.incidence.value,
            "o2i": self.o2i.to_dict(),
            "sf_mode": self.sf_mode.value,
            "decorrelation_distance_m": self.decorrelation_distance_m,
            "los_bin_width_m": self.los_bin_width_m,
            "rng_seed": self.rng_seed,
        }


def config_hash(cfg: DropConfig) -> str:
    """SHA-256 of the canonical JSON form of a config."""
    canonical = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
