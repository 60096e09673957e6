"""Path-loss, LOS-probability and penetration-loss models."""

from .los import (
    D1D2Params,
    LosModel,
    UMA_3GPP,
    UMI_3GPP,
    indoor_effective_distance,
    los_probability,
    p_los_3gpp_uma,
    p_los_d1d2,
    p_los_nyu_squared,
)
from .pathloss import (
    AbgModel,
    CifModel,
    CiModel,
    PathLossModelKind,
    abg_pl,
    centroid_frequency,
    ci_pl,
    cif_pl,
    evaluate_path_loss,
    fspl_1m,
    scenario_model,
)
from .penetration import BplClass, O2iConfig, bpl, o2i_loss

__all__ = [
    "AbgModel",
    "BplClass",
    "CiModel",
    "CifModel",
    "D1D2Params",
    "LosModel",
    "O2iConfig",
    "PathLossModelKind",
    "UMA_3GPP",
    "UMI_3GPP",
    "abg_pl",
    "bpl",
    "centroid_frequency",
    "ci_pl",
    "cif_pl",
    "evaluate_path_loss",
    "fspl_1m",
    "indoor_effective_distance",
    "los_probability",
    "o2i_loss",
    "p_los_3gpp_uma",
    "p_los_d1d2",
    "p_los_nyu_squared",
    "scenario_model",
]
