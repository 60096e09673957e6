"""Parameter estimation for the path-loss and LOS-probability models."""

from .los_fit import (
    LosBins,
    LosComparison,
    LosFitResult,
    LosSample,
    bin_los_observations,
    compare_los_models,
    fit_los_probability,
)
from .pathloss_fit import (
    FitReport,
    LosFilter,
    PathLossSample,
    fit_abg,
    fit_ci,
    fit_cif,
    fit_path_loss,
    residuals,
)

__all__ = [
    "FitReport",
    "LosBins",
    "LosComparison",
    "LosFilter",
    "LosFitResult",
    "LosSample",
    "PathLossSample",
    "bin_los_observations",
    "compare_los_models",
    "fit_abg",
    "fit_ci",
    "fit_cif",
    "fit_los_probability",
    "fit_path_loss",
    "residuals",
]
