"""Multipath component distance (MCD).

The distance between two rays combines their departure and arrival
directions (unit vectors on the sphere) with their delay difference:

    sqrt(|u_tx(a) - u_tx(b)|^2 / 4 + |u_rx(a) - u_rx(b)|^2 / 4
         + (zeta |tau_a - tau_b| / delay_norm)^2)

Each ray maps to the 7-vector ``[u_tx / 2, u_rx / 2, zeta tau / delay_norm]``
in which MCD is the Euclidean distance, so clustering can work on
coordinates directly.
"""

from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from chanmodel.model.rays import RayRecord, ray_columns

FEATURE_DIM = 7


def unit_vectors(az_deg: np.ndarray, el_deg: np.ndarray) -> np.ndarray:
    """Direction cosines for azimuth/elevation pairs, shape (N, 3)."""
    az = np.radians(np.asarray(az_deg, dtype=float))
    el = np.radians(np.asarray(el_deg, dtype=float))
    return np.stack([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)], axis=-1)


def _delay_scale(zeta: float, delay_norm: float) -> float:
    # A zero normalization (single delay) leaves no delay information to weigh.
    return zeta / delay_norm if delay_norm > 0 else 0.0


def embed_rays(rays: Sequence[RayRecord], zeta: float, delay_norm: float) -> np.ndarray:
    """MCD feature vectors of a ray list, shape (N, 7)."""
    tx = unit_vectors(ray_columns(rays, "aod_az"), ray_columns(rays, "aod_el"))
    rx = unit_vectors(ray_columns(rays, "aoa_az"), ray_columns(rays, "aoa_el"))
    tau = ray_columns(rays, "delay_ns") * _delay_scale(zeta, delay_norm)
    return np.column_stack([tx / 2.0, rx / 2.0, tau])


def mcd_distance(a: RayRecord, b: RayRecord, zeta: float = 1.0, delay_norm: float = 1.0) -> float:
    """MCD between two rays."""
    features = embed_rays([a, b], zeta, delay_norm)
    return float(np.linalg.norm(features[0] - features[1]))


def mcd_matrix(features: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Pairwise MCD between feature rows and centers."""
    return cdist(features, centers)
