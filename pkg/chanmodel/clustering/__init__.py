"""Multipath clustering: MCD metric, K-power-means, shape pruning."""

from .kpower_means import (
    ClusterSet,
    ClusteringConfig,
    calinski_harabasz,
    cluster_multirestart,
    cluster_single_run,
    kpower_means,
    shape_prune,
)
from .mcd import embed_rays, mcd_distance, mcd_matrix

__all__ = [
    "ClusterSet",
    "ClusteringConfig",
    "calinski_harabasz",
    "cluster_multirestart",
    "cluster_single_run",
    "embed_rays",
    "kpower_means",
    "mcd_distance",
    "mcd_matrix",
    "shape_prune",
]
