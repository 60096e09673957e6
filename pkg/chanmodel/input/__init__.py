"""Input file readers."""

from .loaders import (
    ClusterAssignment,
    CsvTable,
    load_assignment,
    load_config,
    load_los_samples,
    load_pathloss_samples,
    load_rays,
    read_csv_table,
)

__all__ = [
    "ClusterAssignment",
    "CsvTable",
    "load_assignment",
    "load_config",
    "load_los_samples",
    "load_pathloss_samples",
    "load_rays",
    "read_csv_table",
]
