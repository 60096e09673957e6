"""Scenario Model Module.

Built-in scenario catalog: CI and ABG path-loss parameters with their
shadow-fading standard deviations per scenario and LOS state, and the 3GPP
LOS-probability (d1, d2) pair of each environment. Also holds the published
LOS-model comparison rows and the documented ray-tracing study setup.

This file is the single source of truth for published model constants.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from chanmodel.error_handling.errors import InvalidArgumentError


class Environment(Enum):
    """Deployment environment families."""

    UMA = "uma"
    UMI_STREET_CANYON = "umi-sc"
    UMI_OPEN_SQUARE = "umi-os"

    @property
    def is_umi(self) -> bool:
        """True for both UMi sub-scenarios."""
        return self is not Environment.UMA

    @classmethod
    def parse(cls, text: str) -> "Environment":
        """Accept ``uma``, ``umi-sc``, ``UMi_SC``, ``umistreetcanyon``..."""
        key = text.strip().lower().replace("_", "").replace("-", "").replace(".", "")
        key = key.replace("streetcanyon", "sc").replace("opensquare", "os")
        for member in cls:
            if member.value.replace("-", "") == key:
                return member
        choices = ", ".join(m.value for m in cls)
        raise InvalidArgumentError(f"unknown environment '{text}' (choose from {choices})")


class ScenarioId(Enum):
    """The six catalog scenarios."""

    UMA_LOS = "uma-los"
    UMA_NLOS = "uma-nlos"
    UMI_SC_LOS = "umi-sc-los"
    UMI_SC_NLOS = "umi-sc-nlos"
    UMI_OS_LOS = "umi-os-los"
    UMI_OS_NLOS = "umi-os-nlos"

    @property
    def is_los(self) -> bool:
        return self.value.endswith("-los")

    @property
    def environment(self) -> Environment:
        return Environment(self.value.rsplit("-", 1)[0])

    @property
    def label(self) -> str:
        """Display label, e.g. ``UMi-S.C.-NLOS``."""
        return _LABELS[self]

    def counterpart(self) -> "ScenarioId":
        """The scenario of the same environment with the other LOS state."""
        env = self.environment.value
        return ScenarioId(f"{env}-nlos" if self.is_los else f"{env}-los")

    @classmethod
    def parse(cls, text: str) -> "ScenarioId":
        """Accept ``uma-los``, ``UMaLOS``, ``UMA_LOS``, ``UMiStreetCanyonNLOS``..."""
        key = text.strip().lower().replace("_", "").replace("-", "").replace(".", "")
        key = key.replace("streetcanyon", "sc").replace("opensquare", "os")
        for member in cls:
            if member.value.replace("-", "") == key:
                return member
        choices = ", ".join(m.value for m in cls)
        raise InvalidArgumentError(f"unknown scenario '{text}' (choose from {choices})")


_LABELS = {
    ScenarioId.UMA_LOS: "UMa-LOS",
    ScenarioId.UMA_NLOS: "UMa-NLOS",
    ScenarioId.UMI_SC_LOS: "UMi-S.C.-LOS",
    ScenarioId.UMI_SC_NLOS: "UMi-S.C.-NLOS",
    ScenarioId.UMI_OS_LOS: "UMi-O.S.-LOS",
    ScenarioId.UMI_OS_NLOS: "UMi-O.S.-NLOS",
}


@dataclass(frozen=True)
class ScenarioParams:
    """Parameter bundle of one scenario and LOS state."""

    scenario: ScenarioId
    ci_n: float
    ci_sigma: float
    los_d1: float
    los_d2: float
    abg_alpha: Optional[float] = None
    abg_beta: Optional[float] = None
    abg_gamma: Optional[float] = None
    abg_sigma: Optional[float] = None

    def __post_init__(self):
        """Validate fields after initialization."""
        if self.ci_n <= 0:
            raise ValueError("ci_n must be positive")
        if self.ci_sigma <= 0:
            raise ValueError("ci_sigma must be positive")
        if self.los_d1 <= 0 or self.los_d2 <= 0:
            raise ValueError("los_d1 and los_d2 must be positive")
        abg = (self.abg_alpha, self.abg_beta, self.abg_gamma, self.abg_sigma)
        if any(v is None for v in abg) and any(v is not None for v in abg):
            raise ValueError("ABG parameters must be given all together or not at all")
        if self.abg_sigma is not None and self.abg_sigma <= 0:
            raise ValueError("abg_sigma must be positive")
        if self.scenario.is_los and self.abg_alpha is not None:
            raise ValueError("LOS scenarios carry no ABG parameters")

    @property
    def abg_available(self) -> bool:
        return self.abg_alpha is not None

    def to_dict(self) -> dict:
        """Return the nested JSON layout used by ``catalog`` exports."""
        return {
            "scenario": self.scenario.value,
            "label": self.scenario.label,
            "ci": {"n": self.ci_n, "sigma_db": self.ci_sigma},
            "abg": (
                {
                    "alpha": self.abg_alpha,
                    "beta_db": self.abg_beta,
                    "gamma": self.abg_gamma,
                    "sigma_db": self.abg_sigma,
                }
                if self.abg_available
                else None
            ),
            "los": {"d1_m": self.los_d1, "d2_m": self.los_d2},
        }


# 3GPP LOS-probability (d1, d2) pairs; one UMi pair serves both sub-scenarios.
UMA_LOS_D1D2: Tuple[float, float] = (18.0, 63.0)
UMI_LOS_D1D2: Tuple[float, float] = (18.0, 36.0)


def _row(sid, n, sigma, abg=None) -> ScenarioParams:
    d1, d2 = UMA_LOS_D1D2 if sid.environment is Environment.UMA else UMI_LOS_D1D2
    alpha, beta, gamma, abg_sigma = abg if abg else (None, None, None, None)
    return ScenarioParams(
        scenario=sid,
        ci_n=n,
        ci_sigma=sigma,
        los_d1=d1,
        los_d2=d2,
        abg_alpha=alpha,
        abg_beta=beta,
        abg_gamma=gamma,
        abg_sigma=abg_sigma,
    )


_CATALOG: Dict[ScenarioId, ScenarioParams] = {
    ScenarioId.UMA_LOS: _row(ScenarioId.UMA_LOS, 2.0, 4.1),
    ScenarioId.UMA_NLOS: _row(ScenarioId.UMA_NLOS, 3.0, 6.8, (3.4, 19.2, 2.3, 6.5)),
    ScenarioId.UMI_SC_LOS: _row(ScenarioId.UMI_SC_LOS, 1.98, 3.1),
    ScenarioId.UMI_SC_NLOS: _row(
        ScenarioId.UMI_SC_NLOS, 3.19, 8.2, (3.48, 21.02, 2.34, 7.8)
    ),
    ScenarioId.UMI_OS_LOS: _row(ScenarioId.UMI_OS_LOS, 1.85, 4.2),
    ScenarioId.UMI_OS_NLOS: _row(
        ScenarioId.UMI_OS_NLOS, 2.89, 7.1, (4.14, 3.66, 2.43, 7.0)
    ),
}


def catalog_lookup(scenario: ScenarioId) -> ScenarioParams:
    """Return the published parameters of a scenario."""
    return _CATALOG[scenario]


def scenario_catalog() -> List[ScenarioParams]:
    """All catalog rows in table order."""
    return [_CATALOG[sid] for sid in ScenarioId]


def catalog_to_dict() -> dict:
    """Serializable catalog for JSON export."""
    return {"scenarios": [row.to_dict() for row in scenario_catalog()]}


@dataclass(frozen=True)
class LosModelReference:
    """One published LOS-probability comparison row."""

    environment: str
    model: str
    d1: float
    d2: float
    mse: float

    def to_dict(self) -> dict:
        return {
            "environment": self.environment,
            "model": self.model,
            "d1_m": self.d1,
            "d2_m": self.d2,
            "mse": self.mse,
        }


LOS_MODEL_REFERENCE: Tuple[LosModelReference, ...] = (
    LosModelReference("uma", "3gpp", 18.0, 63.0, 0.020),
    LosModelReference("uma", "d1d2", 20.0, 66.0, 0.017),
    LosModelReference("uma", "nyu_squared", 20.0, 160.0, 0.015),
    LosModelReference("umi", "3gpp", 18.0, 36.0, 0.023),
    LosModelReference("umi", "d1d2", 20.0, 39.0, 0.001),
    LosModelReference("umi", "nyu_squared", 22.0, 100.0, 0.026),
)


@dataclass(frozen=True)
class RayTracingStudy:
    """Setup of the UMa ray-tracing study the clustering defaults come from."""

    ap_height_m: float = 25.0
    ue_height_m: float = 1.5
    max_rays: int = 20
    max_reflections: int = 4
    max_diffractions_above_10ghz: int = 1
    max_diffractions_up_to_10ghz: int = 2
    frequencies_ghz: Tuple[float, ...] = (5.6, 10.0, 18.0, 28.0, 39.3, 73.5)
    xpr_db_at_lowest: float = 13.87
    xpr_db_at_highest: float = 7.89

    def to_dict(self) -> dict:
        return {
            "ap_height_m": self.ap_height_m,
            "ue_height_m": self.ue_height_m,
            "max_rays": self.max_rays,
            "max_reflections": self.max_reflections,
            "max_diffractions_above_10ghz": self.max_diffractions_above_10ghz,
            "max_diffractions_up_to_10ghz": self.max_diffractions_up_to_10ghz,
            "frequencies_ghz": list(self.frequencies_ghz),
            "xpr_db": {
                "5.6": self.xpr_db_at_lowest,
                "73.5": self.xpr_db_at_highest,
            },
        }


RAY_TRACING_STUDY = RayTracingStudy()

# Typical sub-6 GHz NLOS ranges: delay spread (ns), ASD and ASA (degrees).
LEGACY_SPREAD_RANGES: Dict[str, Tuple[float, float]] = {
    "rms_delay_spread_ns": (50.0, 500.0),
    "asd_az_deg": (10.0, 30.0),
    "asa_az_deg": (50.0, 80.0),
}
