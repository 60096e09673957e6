"""Monte-Carlo drops composing path loss, shadow fading and O2I loss."""

from .config import DropConfig, IncidenceMode, LosMode, Placement, ShadowingMode, config_hash
from .engine import DEFAULT_PERCENTILES, LINK_COLUMNS, DropResult, coupling_loss_cdf, run_drop
from .shadowing import CorrelatedField, iid_shadowing, link_uniforms

__all__ = [
    "DropConfig",
    "IncidenceMode",
    "LosMode",
    "Placement",
    "ShadowingMode",
    "config_hash",
    "DEFAULT_PERCENTILES",
    "LINK_COLUMNS",
    "DropResult",
    "coupling_loss_cdf",
    "run_drop",
    "CorrelatedField",
    "iid_shadowing",
    "link_uniforms",
]
