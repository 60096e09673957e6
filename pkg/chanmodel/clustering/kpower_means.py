"""K-power-means clustering of rays with shape pruning and multiple restarts.

Rays are clustered in the MCD feature space. The objective is the
power-weighted sum of squared MCD to the assigned centroid; centroids are
power-weighted means, so every assignment and update step can only lower
it. Initial centroids come from power-weighted D^2 seeding over the rays in
canonical order, which makes results independent of input order.

The cluster count is chosen per restart by a power-weighted
Calinski-Harabasz ratio over the configured k range. With k_min = 1 a single
cluster is kept unless the best split leaves its centroids well apart
relative to the cluster radii. Across restarts the
result with the fewest clusters wins; ties go to the lower objective, then
to the earlier restart.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from chanmodel.clustering.mcd import embed_rays, mcd_matrix
from chanmodel.error_handling.errors import ConfigValidationError, InvalidArgumentError
from chanmodel.model.rays import RayRecord, ray_columns
from chanmodel.stats.spreads import rms_delay_spread

logger = logging.getLogger(__name__)

PRUNE_TOLERANCE = 1e-9
# Centroid gap, in pooled RMS radii, below which a split is not kept when k_min = 1.
MIN_SEPARATION = 8.0


@dataclass(frozen=True)
class ClusteringConfig:
    """Settings of a multi-restart clustering run."""

    k_min: int = 2
    k_max: int = 8
    prune_p: float = 0.98
    prune_s: float = 0.95
    restarts: int = 50
    zeta: float = 1.0
    rng_seed: int = 0
    max_iter: int = 100

    def __post_init__(self):
        if self.k_min < 1 or self.k_max < self.k_min:
            raise ConfigValidationError(
                f"cluster range must satisfy 1 <= k_min <= k_max, got [{self.k_min}, {self.k_max}]"
            )
        if not 0 < self.prune_s <= self.prune_p <= 1:
            raise ConfigValidationError(
                f"pruning fractions must satisfy 0 < s <= p <= 1, got p={self.prune_p}, "
                f"s={self.prune_s}"
            )
        if self.restarts < 1:
            raise ConfigValidationError(f"restarts must be at least 1, got {self.restarts}")
        if self.zeta < 0:
            raise ConfigValidationError(f"delay weight zeta must be non-negative, got {self.zeta}")
        if self.rng_seed < 0:
            raise ConfigValidationError(f"seed must be non-negative, got {self.rng_seed}")
        if self.max_iter < 1:
            raise ConfigValidationError(f"max_iter must be at least 1, got {self.max_iter}")

    @classmethod
    def from_dict(cls, data: dict) -> "ClusteringConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigValidationError(
                f"unknown clustering keys: {', '.join(sorted(unknown))}"
            )
        return cls(**data)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


@dataclass(frozen=True, eq=False)
class ClusterSet:
    """Clustering of a ray set.

    ``rays`` are held in canonical order; ``input_index[i]`` is the position
    of ``rays[i]`` in the caller's list. Cluster 0 carries the most power.
    """

    rays: Tuple[RayRecord, ...]
    input_index: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    centroids: np.ndarray
    pruned: np.ndarray
    objective: float
    objective_trace: Tuple[float, ...] = ()
    seed: Optional[int] = None
    restart: Optional[int] = None
    restart_cluster_counts: Tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def powers(self) -> np.ndarray:
        return ray_columns(self.rays, "power")

    def members(self, cluster: int, include_pruned: bool = False) -> np.ndarray:
        mask = self.labels == cluster
        if not include_pruned:
            mask &= ~self.pruned
        return np.flatnonzero(mask)

    def cluster_rays(self, cluster: int) -> List[RayRecord]:
        return [self.rays[i] for i in self.members(cluster)]

    def cluster_powers(self, include_pruned: bool = True) -> np.ndarray:
        p = self.powers if include_pruned else np.where(self.pruned, 0.0, self.powers)
        return np.bincount(self.labels, weights=p, minlength=self.k)

    def labels_in_input_order(self) -> Tuple[np.ndarray, np.ndarray]:
        """Labels and pruned flags aligned with the caller's ray list."""
        labels = np.empty_like(self.labels)
        pruned = np.empty_like(self.pruned)
        labels[self.input_index] = self.labels
        pruned[self.input_index] = self.pruned
        return labels, pruned

    def to_rows(self) -> List[dict]:
        """One assignment row per ray, in the caller's order."""
        labels, pruned = self.labels_in_input_order()
        rays = [None] * len(self.rays)
        for pos, idx in enumerate(self.input_index):
            rays[idx] = self.rays[pos]
        return [
            {
                "ray_index": i,
                "link_id": ray.link_id or "",
                "cluster": int(labels[i]),
                "pruned": int(pruned[i]),
            }
            for i, ray in enumerate(rays)
        ]

    def summary(self) -> dict:
        return {
            "cluster_count": self.k,
            "objective": self.objective,
            "seed": self.seed,
            "restart": self.restart,
            "restart_cluster_counts": list(self.restart_cluster_counts),
            "pruned_rays": int(self.pruned.sum()),
            "cluster_powers": self.cluster_powers(include_pruned=False).tolist(),
            "cluster_sizes": [int(self.members(j).size) for j in range(self.k)],
        }


def canonical_order(rays: Sequence[RayRecord]) -> np.ndarray:
    """Permutation that sorts rays by their canonical key."""
    return np.array(sorted(range(len(rays)), key=lambda i: rays[i].sort_key()), dtype=int)


def _weighted_centroids(x: np.ndarray, w: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, w[:, None] * x)
    mass = np.bincount(labels, weights=w, minlength=k)
    return sums / mass[:, None]


def _objective(x: np.ndarray, w: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    diff = x - centroids[labels]
    return float(np.dot(w, np.einsum("ij,ij->i", diff, diff)))


def _seed_centroids(x: np.ndarray, w: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    chosen = [int(rng.choice(len(x), p=w))]
    closest = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        score = w * closest
        score[chosen] = 0.0
        if score.sum() > 0:
            pick = int(rng.choice(len(x), p=score / score.sum()))
        else:
            # Only duplicates of chosen points remain.
            pick = next(i for i in range(len(x)) if i not in chosen)
        chosen.append(pick)
        closest = np.minimum(closest, ((x - x[pick]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _assign(x: np.ndarray, w: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = mcd_matrix(x, centroids) ** 2
    labels = np.argmin(d2, axis=1)
    k = len(centroids)
    for empty in np.flatnonzero(np.bincount(labels, minlength=k) == 0):
        # Hand the empty cluster the costliest point of a cluster that can spare one.
        sizes = np.bincount(labels, minlength=k)
        cost = w * d2[np.arange(len(x)), labels]
        cost[sizes[labels] < 2] = -1.0
        donor = int(np.argmax(cost))
        labels[donor] = empty
    return labels


def _relabel_by_power(labels: np.ndarray, w: np.ndarray, k: int) -> np.ndarray:
    power = np.bincount(labels, weights=w, minlength=k)
    first = np.array([np.flatnonzero(labels == j)[0] for j in range(k)])
    order = np.lexsort((first, -power))
    mapping = np.empty(k, dtype=int)
    mapping[order] = np.arange(k)
    return mapping[labels]


def _prepare(rays: Sequence[RayRecord], zeta: float):
    if not rays:
        raise InvalidArgumentError("clustering needs at least one ray")
    order = canonical_order(rays)
    ordered = tuple(rays[i] for i in order)
    features = embed_rays(ordered, zeta, rms_delay_spread(ordered))
    w = ray_columns(ordered, "power")
    return order, ordered, features, w / w.sum()


def _lloyd(
    features: np.ndarray, w: np.ndarray, k: int, rng: np.random.Generator, max_iter: int
) -> Tuple[np.ndarray, np.ndarray, List[float]]:
    centroids = _seed_centroids(features, w, k, rng)
    labels = _assign(features, w, centroids)
    trace = []
    for _ in range(max_iter):
        centroids = _weighted_centroids(features, w, labels, k)
        trace.append(_objective(features, w, labels, centroids))
        updated = _assign(features, w, centroids)
        if np.array_equal(updated, labels):
            break
        labels = updated
    labels = _relabel_by_power(labels, w, k)
    return labels, _weighted_centroids(features, w, labels, k), trace


def kpower_means(
    rays: Sequence[RayRecord],
    k: int,
    seed: int,
    zeta: float = 1.0,
    max_iter: int = 100,
) -> ClusterSet:
    """One seeded K-power-means run with a fixed cluster count."""
    if not 1 <= k <= len(rays):
        raise InvalidArgumentError(
            f"cluster count k={k} must be between 1 and the ray count {len(rays)}"
        )
    order, ordered, features, w = _prepare(rays, zeta)
    return _run(ordered, order, features, w, k, np.random.default_rng(seed), max_iter, seed)


def _run(ordered, order, features, w, k, rng, max_iter, seed) -> ClusterSet:
    labels, centroids, trace = _lloyd(features, w, k, rng, max_iter)
    logger.debug("k=%d converged after %d iterations, objective %.6g", k, len(trace), trace[-1])
    return ClusterSet(
        rays=ordered,
        input_index=order,
        features=features,
        labels=labels,
        centroids=centroids,
        pruned=np.zeros(len(ordered), dtype=bool),
        objective=trace[-1],
        objective_trace=tuple(trace),
        seed=seed,
    )


def shape_prune(cs: ClusterSet, p: float, s: float) -> ClusterSet:
    """Mark outlying rays of every cluster as pruned.

    Per cluster, the rays farthest from the centroid are dropped one at a
    time while the rest keeps at least a fraction ``p`` of the cluster's rays
    and ``s`` of its power. A cluster always keeps one ray. Centroids and the
    objective are recomputed over the kept rays; labels do not change.
    """
    if not 0 < s <= p <= 1:
        raise InvalidArgumentError(
            f"pruning fractions must satisfy 0 < s <= p <= 1, got p={p}, s={s}"
        )
    power = cs.powers
    w = power / power.sum()
    pruned = cs.pruned.copy()
    distance = np.linalg.norm(cs.features - cs.centroids[cs.labels], axis=1)
    for j in range(cs.k):
        members = cs.members(j)
        count, total = members.size, power[members].sum()
        kept_count, kept_power = count, total
        # Farthest first; equal distances drop the later canonical ray first.
        for i in sorted(members, key=lambda m: (-distance[m], -m)):
            if kept_count - 1 < max(1.0, p * count - PRUNE_TOLERANCE):
                break
            if kept_power - power[i] < s * total * (1.0 - PRUNE_TOLERANCE):
                break
            pruned[i] = True
            kept_count -= 1
            kept_power -= power[i]

    kept_w = np.where(pruned, 0.0, w)
    centroids = _weighted_centroids(cs.features, kept_w, cs.labels, cs.k)
    return replace(
        cs,
        centroids=centroids,
        pruned=pruned,
        objective=_objective(cs.features, kept_w, cs.labels, centroids),
    )


def calinski_harabasz(features: np.ndarray, w: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Power-weighted Calinski-Harabasz ratio; infinite for zero within-cluster spread."""
    n = len(features)
    centroids = _weighted_centroids(features, w, labels, k)
    grand = w @ features / w.sum()
    mass = np.bincount(labels, weights=w, minlength=k)
    between = float(np.dot(mass, ((centroids - grand) ** 2).sum(axis=1)))
    within = _objective(features, w, labels, centroids)
    if within == 0.0:
        return np.inf
    return (between / (k - 1)) / (within / (n - k))


def cluster_separation(features: np.ndarray, w: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Closest centroid pair distance in units of the pooled RMS cluster radius.

    Infinite when every cluster is a single point and the centroids differ.
    """
    if k < 2:
        return 0.0
    centroids = _weighted_centroids(features, w, labels, k)
    gap = float(pdist(centroids).min())
    radius = np.sqrt(_objective(features, w, labels, centroids) / w.sum())
    if gap == 0.0:
        return 0.0
    return np.inf if radius == 0.0 else gap / radius


def cluster_single_run(
    rays: Sequence[RayRecord], cfg: ClusteringConfig, seed: int
) -> ClusterSet:
    """One restart: sweep k, keep the best Calinski-Harabasz score, then prune.

    With ``k_min = 1`` the best split only stands when its clusters sit at
    least ``MIN_SEPARATION`` radii apart; otherwise the rays form one cluster.
    """
    order, ordered, features, w = _prepare(rays, cfg.zeta)
    n = len(ordered)
    candidates = list(range(max(cfg.k_min, 2), min(cfg.k_max, n - 1) + 1))
    if not candidates:
        candidates = [min(cfg.k_min, n)]

    best, best_score = None, -np.inf
    for k in candidates:
        rng = np.random.default_rng([seed, k])
        run = _run(ordered, order, features, w, k, rng, cfg.max_iter, seed)
        score = calinski_harabasz(features, w, run.labels, k) if k > 1 else 0.0
        logger.debug("seed %d: k=%d score %.6g", seed, k, score)
        if best is None or score > best_score:
            best, best_score = run, score

    if cfg.k_min == 1 and best.k > 1:
        separation = cluster_separation(features, w, best.labels, best.k)
        if separation < MIN_SEPARATION:
            logger.debug(
                "seed %d: k=%d clusters only %.3g radii apart; keeping one", seed, best.k, separation
            )
            rng = np.random.default_rng([seed, 1])
            best = _run(ordered, order, features, w, 1, rng, cfg.max_iter, seed)
    return shape_prune(best, cfg.prune_p, cfg.prune_s)


def cluster_multirestart(rays: Sequence[RayRecord], cfg: ClusteringConfig) -> ClusterSet:
    """Run ``cfg.restarts`` seeded restarts and keep the one with the fewest clusters."""
    if not rays:
        raise InvalidArgumentError("clustering needs at least one ray")
    logger.info("Clustering %d rays with %d restarts", len(rays), cfg.restarts)
    results = [
        cluster_single_run(rays, cfg, cfg.rng_seed + r) for r in range(1, cfg.restarts + 1)
    ]
    counts = tuple(res.k for res in results)
    best_index = min(range(len(results)), key=lambda i: (counts[i], results[i].objective, i))
    best = results[best_index]
    logger.info(
        "Kept restart %d with %d clusters (counts seen: %s)",
        best_index + 1,
        best.k,
        sorted(set(counts)),
    )
    return replace(best, restart=best_index + 1, restart_cluster_counts=counts)
