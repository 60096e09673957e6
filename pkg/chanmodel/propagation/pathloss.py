"""Multi-frequency path-loss models.

CI (close-in, anchored at the 1 m free-space loss), CIF (CI with a linearly
frequency-dependent exponent around a centroid frequency f0) and ABG
(floating intercept with separate distance and frequency slopes).

Evaluation is deterministic; shadow fading is added by the drop engine.
All functions accept scalars or numpy arrays (broadcast against each other).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from chanmodel.error_handling.errors import (
    InvalidArgumentError,
    ModelNotAvailableError,
)
from chanmodel.model.scenario_model import ScenarioId, catalog_lookup
from chanmodel.model.units import (
    ABG_MIN_DISTANCE_M,
    CLOSE_IN_REFERENCE_M,
    GHZ,
    PHYS,
    FloatOrArray,
    check_distance,
    check_frequency,
    unwrap,
)


class PathLossModelKind(Enum):
    """Model families."""

    CI = "ci"
    CIF = "cif"
    ABG = "abg"


@dataclass(frozen=True)
class CiModel:
    """Close-in reference distance model."""

    n: float

    def __post_init__(self):
        if not self.n > 0:
            raise InvalidArgumentError(f"path loss exponent must be positive, got {self.n}")

    def path_loss(self, f_ghz: ArrayLike, d_m: ArrayLike) -> FloatOrArray:
        return ci_pl(self, f_ghz, d_m)

    def to_dict(self) -> dict:
        return {"model": "ci", "n": self.n}


@dataclass(frozen=True)
class CifModel:
    """CI model with a frequency-dependent exponent ``n (1 + b (f - f0) / f0)``."""

    n: float
    b: float
    f0: float

    def __post_init__(self):
        if not self.n > 0:
            raise InvalidArgumentError(f"path loss exponent must be positive, got {self.n}")
        if not self.f0 > 0:
            raise InvalidArgumentError(f"centroid frequency f0 must be positive, got {self.f0}")

    def path_loss(self, f_ghz: ArrayLike, d_m: ArrayLike) -> FloatOrArray:
        return cif_pl(self, f_ghz, d_m)

    def to_dict(self) -> dict:
        return {"model": "cif", "n": self.n, "b": self.b, "f0_ghz": self.f0}


@dataclass(frozen=True)
class AbgModel:
    """Alpha-beta-gamma model."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not all(np.isfinite([self.alpha, self.beta, self.gamma])):
            raise InvalidArgumentError("ABG parameters must be finite")

    def path_loss(self, f_ghz: ArrayLike, d_m: ArrayLike) -> FloatOrArray:
        return abg_pl(self, f_ghz, d_m)

    def to_dict(self) -> dict:
        return {"model": "abg", "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


PathLossModel = Union[CiModel, CifModel, AbgModel]


def fspl_1m(f_ghz: ArrayLike) -> FloatOrArray:
    """Free-space path loss at 1 m in dB: ``20 log10(4 pi f / c)``."""
    f = check_frequency(f_ghz)
    return unwrap(20.0 * np.log10(4.0 * np.pi * f * GHZ / PHYS.c), f_ghz)


def ci_pl(model: CiModel, f_ghz: ArrayLike, d_m: ArrayLike) -> FloatOrArray:
    """CI path loss in dB: ``FSPL(f, 1 m) + 10 n log10(d)``."""
    d = check_distance(d_m, CLOSE_IN_REFERENCE_M)
    result = np.asarray(fspl_1m(f_ghz)) + 10.0 * model.n * np.log10(d)
    return unwrap(result, d)


def cif_pl(model: CifModel, f_ghz: ArrayLike, d_m: ArrayLike) -> FloatOrArray:
    """CIF path loss in dB: ``FSPL(f, 1 m) + 10 n (1 + b (f - f0) / f0) log10(d)``."""
    d = check_distance(d_m, CLOSE_IN_REFERENCE_M)
    f = np.asarray(f_ghz, dtype=float)
    exponent = model.n * (1.0 + model.b * (f - model.f0) / model.f0)
    result = np.asarray(fspl_1m(f)) + 10.0 * exponent * np.log10(d)
    return unwrap(result, d)


def abg_pl(model: AbgModel, f_ghz: ArrayLike, d_m: ArrayLike) -> FloatOrArray:
    """ABG path loss in dB: ``10 alpha log10(d) + beta + 10 gamma log10(f_GHz)``."""
    d = check_distance(d_m, ABG_MIN_DISTANCE_M)
    f = check_frequency(f_ghz)
    result = 10.0 * model.alpha * np.log10(d) + model.beta + 10.0 * model.gamma * np.log10(f)
    return unwrap(result, d)


def centroid_frequency(points: Iterable[Tuple[float, float]]) -> float:
    """Count-weighted mean frequency ``sum(f_k N_k) / sum(N_k)`` in GHz."""
    pairs = [(float(f), float(n)) for f, n in points]
    if not pairs:
        raise InvalidArgumentError("centroid frequency needs at least one (frequency, count) pair")
    freqs = check_frequency([f for f, _ in pairs], warn_out_of_band=False)
    counts = np.array([n for _, n in pairs])
    if np.any(counts <= 0):
        raise InvalidArgumentError("measurement counts must be positive")
    if len(pairs) == 1:
        return pairs[0][0]
    return float(np.dot(freqs, counts) / counts.sum())


def scenario_model(
    scenario: ScenarioId, kind: PathLossModelKind, f0: Optional[float] = None
) -> PathLossModel:
    """Build the model object of a catalog scenario.

    CIF uses the catalog PLE with ``b = 0``; ``f0`` must then be given.
    ABG is refused for LOS scenarios, which publish CI parameters only.
    """
    params = catalog_lookup(scenario)
    if kind is PathLossModelKind.CI:
        return CiModel(params.ci_n)
    if kind is PathLossModelKind.CIF:
        if f0 is None:
            raise InvalidArgumentError("CIF evaluation needs a centroid frequency f0")
        return CifModel(params.ci_n, 0.0, f0)
    if not params.abg_available:
        raise ModelNotAvailableError(
            f"ABG parameters for {scenario.label} are N/A (LOS scenarios publish CI only)"
        )
    return AbgModel(params.abg_alpha, params.abg_beta, params.abg_gamma)


def scenario_sigma(scenario: ScenarioId, kind: PathLossModelKind) -> float:
    """Shadow-fading standard deviation that goes with a scenario model."""
    params = catalog_lookup(scenario)
    if kind is PathLossModelKind.ABG:
        if not params.abg_available:
            raise ModelNotAvailableError(
                f"ABG parameters for {scenario.label} are N/A (LOS scenarios publish CI only)"
            )
        return params.abg_sigma
    return params.ci_sigma


def evaluate_path_loss(model: PathLossModel, f_ghz: ArrayLike, d_m: ArrayLike) -> FloatOrArray:
    """Dispatch on the model object."""
    if isinstance(model, CiModel):
        return ci_pl(model, f_ghz, d_m)
    if isinstance(model, CifModel):
        return cif_pl(model, f_ghz, d_m)
    if isinstance(model, AbgModel):
        return abg_pl(model, f_ghz, d_m)
    raise InvalidArgumentError(f"unsupported path loss model {type(model).__name__}")
