"""Shared builders and independent oracles for the test suite."""

import os
import subprocess
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from chanmodel.fitting.los_fit import LosSample
from chanmodel.fitting.pathloss_fit import PathLossSample
from chanmodel.model.rays import RayRecord
from chanmodel.propagation.los import D1D2Params, p_los_d1d2
from chanmodel.propagation.pathloss import PathLossModel, evaluate_path_loss

REPO_ROOT = Path(__file__).resolve().parent.parent

RAY_COLUMNS_HEADER = "link_id,delay_ns,aod_az_deg,aod_el_deg,aoa_az_deg,aoa_el_deg,power_db"


def ray(
    delay_ns: float = 0.0,
    aod_az: float = 0.0,
    aoa_az: float = 0.0,
    aod_el: float = 0.0,
    aoa_el: float = 0.0,
    power: float = 1.0,
    xpr_db: Optional[float] = None,
    link_id: Optional[str] = None,
) -> RayRecord:
    """Ray with keyword defaults, to keep test bodies short."""
    return RayRecord(
        delay_ns=delay_ns,
        aod_az=aod_az,
        aod_el=aod_el,
        aoa_az=aoa_az,
        aoa_el=aoa_el,
        power=power,
        xpr_db=xpr_db,
        link_id=link_id,
    )


def ray_groups(
    centers: Sequence[Tuple[float, float, float]],
    per_group: int = 10,
    jitter_deg: float = 1.0,
    jitter_ns: float = 2.0,
    seed: int = 0,
) -> Tuple[List[RayRecord], np.ndarray]:
    """Tight ray groups around (aod_az, aoa_az, delay_ns) centers, with their true labels."""
    rng = np.random.default_rng(seed)
    rays, labels = [], []
    for label, (aod, aoa, delay) in enumerate(centers):
        for _ in range(per_group):
            rays.append(
                ray(
                    delay_ns=delay + rng.uniform(0.0, jitter_ns),
                    aod_az=aod + rng.uniform(-jitter_deg, jitter_deg),
                    aoa_az=aoa + rng.uniform(-jitter_deg, jitter_deg),
                    power=float(rng.uniform(0.5, 1.0)),
                )
            )
            labels.append(label)
    return rays, np.array(labels)


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """True when two labelings group the items identically, up to renaming."""
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


def pathloss_samples(
    model: PathLossModel,
    freqs: Iterable[float],
    dists: Iterable[float],
    los: bool = True,
    noise_db: float = 0.0,
    seed: int = 0,
) -> List[PathLossSample]:
    """Samples on the (f, d) grid generated from ``model`` plus optional Gaussian noise."""
    rng = np.random.default_rng(seed)
    f, d = np.meshgrid(np.asarray(list(freqs), float), np.asarray(list(dists), float))
    f, d = f.ravel(), d.ravel()
    pl = np.asarray(evaluate_path_loss(model, f, d)) + noise_db * rng.standard_normal(f.size)
    return [PathLossSample(float(a), float(b), float(c), los) for a, b, c in zip(f, d, pl)]


def los_bernoulli_samples(
    params: D1D2Params,
    count: int,
    seed: int,
    d_max: float = 300.0,
    squared: bool = False,
) -> List[LosSample]:
    """LOS observations at uniform distances drawn from a d1/d2 (or squared) curve."""
    rng = np.random.default_rng(seed)
    d = rng.uniform(1.0, d_max, count)
    p = np.asarray(p_los_d1d2(params, d))
    if squared:
        p = p * p
    los = rng.uniform(size=count) < p
    return [LosSample(float(a), bool(b)) for a, b in zip(d, los)]


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _within(a, b, p) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(
        a[1], b[1]
    )


def segments_intersect(p, q, a, b) -> bool:
    """Scalar closed-segment intersection test, written independently of the library."""
    d1, d2 = _orient(a, b, p), _orient(a, b, q)
    d3, d4 = _orient(p, q, a), _orient(p, q, b)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return (
        (d1 == 0 and _within(a, b, p))
        or (d2 == 0 and _within(a, b, q))
        or (d3 == 0 and _within(p, q, a))
        or (d4 == 0 and _within(p, q, b))
    )


def point_in_polygon(point, vertices) -> bool:
    """Even-odd ray casting with boundary points counted as inside."""
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        if _orient(a, b, point) == 0 and _within(a, b, point):
            return True
    inside = False
    x, y = point
    for i in range(n):
        (x1, y1), (x2, y2) = vertices[i], vertices[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            if x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
                inside = not inside
    return inside


def brute_force_los(polygons, ap, ue) -> bool:
    """LOS oracle: UE outdoor and the segment touches no edge of any polygon."""
    if any(point_in_polygon(ue, poly) for poly in polygons):
        return False
    for poly in polygons:
        n = len(poly)
        for i in range(n):
            if segments_intersect(ap, ue, poly[i], poly[(i + 1) % n]):
                return False
    return True


def write_csv(path: Path, header: str, rows: Iterable[Sequence]) -> Path:
    lines = [header] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def run_cli(args: List[str], cwd: Optional[Path] = None) -> subprocess.CompletedProcess:
    """Run the toolkit in a subprocess, the way a user would."""
    command = [sys.executable, "-m", "chanmodel.main"] + args
    env = os.environ.copy()
    env["PYTHONPATH"] = str(REPO_ROOT)
    return subprocess.run(
        command, capture_output=True, text=True, check=False, env=env, cwd=cwd
    )
