"""Shared domain types, constants and the scenario catalog."""

from .scenario_model import (
    Environment,
    LOS_MODEL_REFERENCE,
    RAY_TRACING_STUDY,
    ScenarioId,
    ScenarioParams,
    catalog_lookup,
    scenario_catalog,
)
from .rays import RayRecord
from .units import PHYS, PhysConstants

__all__ = [
    "Environment",
    "LOS_MODEL_REFERENCE",
    "PHYS",
    "PhysConstants",
    "RAY_TRACING_STUDY",
    "RayRecord",
    "ScenarioId",
    "ScenarioParams",
    "catalog_lookup",
    "scenario_catalog",
]
