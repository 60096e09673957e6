"""Delay spread, angular spread and XPR statistics."""

from .spreads import (
    AngleKind,
    SpreadReport,
    SpreadSummary,
    XprStats,
    rms_angle_spread,
    rms_delay_spread,
    spread_report,
    xpr_stats,
)

__all__ = [
    "AngleKind",
    "SpreadReport",
    "SpreadSummary",
    "XprStats",
    "rms_angle_spread",
    "rms_delay_spread",
    "spread_report",
    "xpr_stats",
]
