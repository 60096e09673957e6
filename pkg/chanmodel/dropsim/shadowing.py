"""Random streams of a drop.

Link ``i`` owns the substream ``SeedSequence(seed, spawn_key=(0, i))`` and
draws a fixed block of uniforms from it, one slot per random decision, so
adding UEs never changes the draws of earlier links. The spatially
correlated shadowing field has its own substream ``spawn_key=(1,)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

# Uniform slots per link.
SLOT_RADIUS = 0
SLOT_ANGLE = 1
SLOT_INDOOR = 2
SLOT_BPL_CLASS = 3
SLOT_DEPTH = 4
SLOT_INCIDENCE = 5
SLOT_LOS = 6
SLOT_SF = 7
LINK_SLOTS = 8

FIELD_COMPONENTS = 1000
_CHUNK = 4096


def _to_unit(state: np.ndarray) -> np.ndarray:
    # 53-bit mantissa, offset half a step so 0 and 1 are never produced.
    return ((state >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def link_uniforms(seed: int, count: int) -> np.ndarray:
    """Uniforms in (0, 1), shape (count, LINK_SLOTS)."""
    out = np.empty((count, LINK_SLOTS))
    for i in range(count):
        state = np.random.SeedSequence(seed, spawn_key=(0, i)).generate_state(
            LINK_SLOTS, np.uint64
        )
        out[i] = _to_unit(state)
    return out


def iid_shadowing(u: np.ndarray, sigma_db: np.ndarray) -> np.ndarray:
    """Zero-mean normal shadowing in dB from uniforms (inverse CDF)."""
    return np.asarray(sigma_db) * norm.ppf(u)


@dataclass(frozen=True, eq=False)
class CorrelatedField:
    """Unit-variance Gaussian-like field with correlation ``exp(-|h| / L)``.

    Sum of random cosines whose wave vectors follow the 2-D Cauchy
    distribution, the spectrum of the exponential covariance.
    """

    wave_vectors: np.ndarray
    phases: np.ndarray

    @classmethod
    def draw(
        cls, seed: int, decorrelation_distance_m: float, components: int = FIELD_COMPONENTS
    ) -> "CorrelatedField":
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
        z = rng.standard_normal((components, 2))
        g = np.abs(rng.standard_normal(components))
        wave_vectors = z / (decorrelation_distance_m * g[:, None])
        phases = rng.uniform(0.0, 2.0 * np.pi, components)
        return cls(wave_vectors, phases)

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        scale = np.sqrt(2.0 / len(self.phases))
        out = np.empty(len(xy))
        for start in range(0, len(xy), _CHUNK):
            block = xy[start : start + _CHUNK]
            out[start : start + _CHUNK] = scale * np.cos(
                block @ self.wave_vectors.T + self.phases
            ).sum(axis=1)
        return out
