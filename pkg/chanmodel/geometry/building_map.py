"""Building map and map-based LOS determination.

A map is a set of simple, non-overlapping polygons (meters, stored
counterclockwise). A link is LOS when the closed segment between AP and UE
touches no polygon edge and the UE is outdoor. Touching a vertex or running
along an edge counts as blocked. Points on a polygon boundary are indoor.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from chanmodel.error_handling.errors import InvalidArgumentError, SchemaError

logger = logging.getLogger(__name__)

# Incidence angles are reported strictly below grazing.
MAX_INCIDENCE_DEG = float(np.nextafter(90.0, 0.0))


@dataclass(frozen=True)
class Position2D:
    """A point in the map plane; ``indoor`` is filled in by ``BuildingMap.place``."""

    x: float
    y: float
    indoor: bool = False

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other: "Position2D") -> float:
        return float(np.hypot(other.x - self.x, other.y - self.y))


class BlockageState(Enum):
    """Static blockage label of a link."""

    LOS = "los"
    GEOMETRY_BLOCKED = "geometry_blocked"


@dataclass(frozen=True)
class WallCrossing:
    """Where the AP to UE segment enters the UE's building."""

    wall_distance: float
    depth: float
    incidence_deg: float
    polygon_index: int

    @property
    def total_distance(self) -> float:
        return self.wall_distance + self.depth

    def to_dict(self) -> dict:
        return {
            "wall_distance_m": self.wall_distance,
            "depth_m": self.depth,
            "incidence_deg": self.incidence_deg,
            "polygon": self.polygon_index,
        }


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """2D cross product of (a - o) and (b - o), broadcast over leading axes."""
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (
        b[..., 0] - o[..., 0]
    )


def _on_segment(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> np.ndarray:
    """For collinear ``p``: True when it lies within the bounding box of ``ab``."""
    return (
        (np.minimum(a[..., 0], b[..., 0]) <= p[..., 0])
        & (p[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
        & (np.minimum(a[..., 1], b[..., 1]) <= p[..., 1])
        & (p[..., 1] <= np.maximum(a[..., 1], b[..., 1]))
    )


def segments_touch(p: np.ndarray, q: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Closed-segment intersection test of ``pq`` against every ``cd``.

    ``c`` and ``d`` are (E, 2) arrays of edge endpoints; the result is a
    boolean array of length E. Shared endpoints and collinear overlap count.
    """
    o1 = _cross(p, q, c)
    o2 = _cross(p, q, d)
    o3 = _cross(c, d, p)
    o4 = _cross(c, d, q)
    proper = (np.sign(o1) * np.sign(o2) < 0) & (np.sign(o3) * np.sign(o4) < 0)
    touching = (
        ((o1 == 0) & _on_segment(p, q, c))
        | ((o2 == 0) & _on_segment(p, q, d))
        | ((o3 == 0) & _on_segment(c, d, p))
        | ((o4 == 0) & _on_segment(c, d, q))
    )
    return proper | touching


def _segments_cross(p: np.ndarray, q: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Proper crossings only (interiors intersect at a single point)."""
    o1 = _cross(p, q, c)
    o2 = _cross(p, q, d)
    o3 = _cross(c, d, p)
    o4 = _cross(c, d, q)
    return (np.sign(o1) * np.sign(o2) < 0) & (np.sign(o3) * np.sign(o4) < 0)


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _edges(vertices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return vertices, np.roll(vertices, -1, axis=0)


def _interior_point(vertices: np.ndarray) -> np.ndarray:
    """A point strictly inside a simple polygon.

    The scan line sits between two vertex heights, so it meets no vertex; the
    midpoint of its first inside span is interior.
    """
    ys = np.unique(vertices[:, 1])
    mid = len(ys) // 2
    y0 = 0.5 * (ys[mid - 1] + ys[mid])
    a, b = _edges(vertices)
    spans = (a[:, 1] > y0) != (b[:, 1] > y0)
    t = (y0 - a[spans, 1]) / (b[spans, 1] - a[spans, 1])
    xs = np.sort(a[spans, 0] + t * (b[spans, 0] - a[spans, 0]))
    return np.array([0.5 * (xs[0] + xs[1]), y0])


def _collinear_same_way(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Edges ``cd`` lying along ``ab``, pointing the same way, sharing a stretch of length > 0."""
    u = b - a
    collinear = (_cross(a, b, c) == 0) & (_cross(a, b, d) == 0)
    same_way = (d - c) @ u > 0
    tc, td = (c - a) @ u, (d - a) @ u
    shared = np.minimum(np.dot(u, u), np.maximum(tc, td)) - np.maximum(0.0, np.minimum(tc, td))
    return collinear & same_way & (shared > 0)


def _validate_polygon(index: int, vertices: np.ndarray) -> None:
    n = len(vertices)
    if n < 3:
        raise InvalidArgumentError(f"polygon {index} has {n} vertices; at least 3 are needed")
    if not np.all(np.isfinite(vertices)):
        raise InvalidArgumentError(f"polygon {index} has non-finite coordinates")
    starts, ends = _edges(vertices)
    if np.any(np.all(starts == ends, axis=1)):
        raise InvalidArgumentError(f"polygon {index} repeats a vertex")
    if _signed_area(vertices) == 0.0:
        raise InvalidArgumentError(f"polygon {index} has zero area")
    for i in range(n):
        # Non-adjacent edges may not touch at all.
        others = [j for j in range(n) if j != i and j != (i + 1) % n and j != (i - 1) % n]
        if others and np.any(segments_touch(starts[i], ends[i], starts[others], ends[others])):
            raise InvalidArgumentError(f"polygon {index} is not simple (edges cross)")
        # Adjacent edges may not fold back onto each other.
        nxt = (i + 1) % n
        u, v = ends[i] - starts[i], ends[nxt] - starts[nxt]
        if u[0] * v[1] - u[1] * v[0] == 0 and np.dot(u, v) < 0:
            raise InvalidArgumentError(f"polygon {index} is not simple (edge folds back)")


@dataclass(frozen=True, eq=False)
class BuildingMap:
    """Immutable set of building polygons."""

    polygons: Tuple[np.ndarray, ...] = ()
    _starts: np.ndarray = field(init=False, repr=False, compare=False)
    _ends: np.ndarray = field(init=False, repr=False, compare=False)
    _owner: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        normalized = []
        for index, raw in enumerate(self.polygons):
            vertices = np.array(raw, dtype=float)
            if vertices.ndim != 2 or vertices.shape[1] != 2:
                raise InvalidArgumentError(f"polygon {index} must be a list of [x, y] pairs")
            if len(vertices) > 3 and np.array_equal(vertices[0], vertices[-1]):
                vertices = vertices[:-1]
            _validate_polygon(index, vertices)
            if _signed_area(vertices) < 0:
                logger.debug("Reorienting polygon %d counterclockwise", index)
                vertices = vertices[::-1].copy()
            vertices.setflags(write=False)
            normalized.append(vertices)
        object.__setattr__(self, "polygons", tuple(normalized))

        if normalized:
            starts = np.concatenate([_edges(v)[0] for v in normalized])
            ends = np.concatenate([_edges(v)[1] for v in normalized])
            owner = np.concatenate([np.full(len(v), i) for i, v in enumerate(normalized)])
        else:
            starts = ends = np.empty((0, 2))
            owner = np.empty(0, dtype=int)
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_ends", ends)
        object.__setattr__(self, "_owner", owner)
        self._check_overlaps()

    def _check_overlaps(self) -> None:
        # Polygons are counterclockwise here, so each interior lies left of its edges.
        # Collinear edges running the same way overlap; opposite ones are a shared wall.
        for i, poly in enumerate(self.polygons):
            others = self._owner != i
            if not np.any(others):
                continue
            for a, b in zip(*_edges(poly)):
                if np.any(_segments_cross(a, b, self._starts[others], self._ends[others])):
                    raise InvalidArgumentError(f"polygon {i} overlaps another polygon")
                if np.any(_collinear_same_way(a, b, self._starts[others], self._ends[others])):
                    raise InvalidArgumentError(f"polygon {i} overlaps another polygon")
            starts, ends = _edges(poly)
            points = [*poly, *(0.5 * (starts + ends)), _interior_point(poly)]
            for j, other in enumerate(self.polygons):
                if j != i and any(self._strictly_inside(p, other) for p in points):
                    raise InvalidArgumentError(f"polygon {i} overlaps polygon {j}")

    @classmethod
    def from_dict(cls, data: dict) -> "BuildingMap":
        if not isinstance(data, dict) or "polygons" not in data:
            raise InvalidArgumentError("map data needs a 'polygons' list")
        return cls(tuple(data["polygons"]))

    def to_dict(self) -> dict:
        return {"polygons": [p.tolist() for p in self.polygons]}

    @property
    def is_empty(self) -> bool:
        return not self.polygons

    @staticmethod
    def _winding_number(point: np.ndarray, vertices: np.ndarray) -> int:
        a, b = _edges(vertices)
        y = point[1]
        side = _cross(a, b, np.broadcast_to(point, a.shape))
        upward = (a[:, 1] <= y) & (b[:, 1] > y) & (side > 0)
        downward = (a[:, 1] > y) & (b[:, 1] <= y) & (side < 0)
        return int(np.count_nonzero(upward) - np.count_nonzero(downward))

    @staticmethod
    def _on_boundary(point: np.ndarray, vertices: np.ndarray) -> bool:
        a, b = _edges(vertices)
        pts = np.broadcast_to(point, a.shape)
        return bool(np.any((_cross(a, b, pts) == 0) & _on_segment(a, b, pts)))

    @classmethod
    def _strictly_inside(cls, point: np.ndarray, vertices: np.ndarray) -> bool:
        return cls._winding_number(point, vertices) != 0 and not cls._on_boundary(
            point, vertices
        )

    def locate(self, x: float, y: float) -> Optional[int]:
        """Index of the polygon containing the point (boundary included), else None."""
        point = np.array([x, y], dtype=float)
        for index, vertices in enumerate(self.polygons):
            if self._on_boundary(point, vertices) or self._winding_number(point, vertices):
                return index
        return None

    def place(self, x: float, y: float) -> Position2D:
        """Build a position with its indoor flag resolved against this map."""
        return Position2D(float(x), float(y), self.locate(x, y) is not None)

    def is_indoor(self, pos: Position2D) -> bool:
        return self.locate(pos.x, pos.y) is not None

    def blocks(self, a: Position2D, b: Position2D) -> bool:
        """True when the closed segment ``ab`` touches any edge."""
        if self.is_empty:
            return False
        p, q = sorted([(a.x, a.y), (b.x, b.y)])
        hits = segments_touch(np.array(p), np.array(q), self._starts, self._ends)
        return bool(np.any(hits))


def _require_outdoor_ap(building_map: BuildingMap, ap: Position2D) -> None:
    if building_map.is_indoor(ap):
        raise InvalidArgumentError(
            f"access point at ({ap.x:g}, {ap.y:g}) is indoor; APs must be outdoor"
        )


def is_los(building_map: BuildingMap, ap: Position2D, ue: Position2D) -> bool:
    """Map-based LOS test; indoor UEs are never LOS."""
    _require_outdoor_ap(building_map, ap)
    if building_map.is_indoor(ue):
        return False
    return not building_map.blocks(ap, ue)


def classify_blockage(building_map: BuildingMap, ap: Position2D, ue: Position2D) -> BlockageState:
    return BlockageState.LOS if is_los(building_map, ap, ue) else BlockageState.GEOMETRY_BLOCKED


def outer_wall_distance(
    building_map: BuildingMap, ap: Position2D, ue_indoor: Position2D
) -> WallCrossing:
    """Distance from the AP to where the AP-UE segment first meets the UE's building.

    Also reports the indoor depth (total distance minus wall distance) and the
    angle between the ray and the crossed wall's normal.
    """
    _require_outdoor_ap(building_map, ap)
    index = building_map.locate(ue_indoor.x, ue_indoor.y)
    if index is None:
        raise InvalidArgumentError(
            f"UE at ({ue_indoor.x:g}, {ue_indoor.y:g}) is not indoor; "
            "outer-wall distance needs an indoor UE"
        )
    p, q = ap.xy, ue_indoor.xy
    r = q - p
    total = float(np.hypot(*r))
    starts, ends = _edges(building_map.polygons[index])
    hits = segments_touch(p, q, starts, ends)

    best_t, best_angle = np.inf, 0.0
    rr = float(np.dot(r, r))
    for c, d in zip(starts[hits], ends[hits]):
        s = d - c
        denom = r[0] * s[1] - r[1] * s[0]
        if denom != 0:
            w = c - p
            t = (w[0] * s[1] - w[1] * s[0]) / denom
            cos_incidence = abs(denom) / (np.sqrt(rr) * np.hypot(*s))
            angle = float(np.degrees(np.arccos(np.clip(cos_incidence, 0.0, 1.0))))
        else:
            # Collinear overlap: the nearest overlapping point.
            t = min(np.dot(c - p, r), np.dot(d - p, r)) / rr
            angle = 90.0
        t = float(np.clip(t, 0.0, 1.0))
        if t < best_t:
            best_t, best_angle = t, angle

    wall = best_t * total
    return WallCrossing(
        wall_distance=wall,
        depth=total - wall,
        incidence_deg=min(best_angle, MAX_INCIDENCE_DEG),
        polygon_index=index,
    )


def load_building_map(path: Union[str, Path]) -> BuildingMap:
    """Read a ``{"polygons": [[[x, y], ...], ...]}`` JSON map."""
    path = Path(path)
    logger.info("Loading building map %s", path)
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e.msg}", file=str(path), line=e.lineno) from e
    try:
        building_map = BuildingMap.from_dict(data)
    except InvalidArgumentError as e:
        raise SchemaError(e.message, file=str(path)) from e
    except (TypeError, ValueError) as e:
        raise SchemaError(f"malformed polygon data: {e}", file=str(path)) from e
    logger.debug("Loaded %d polygons", len(building_map.polygons))
    return building_map


def rectangles(boxes: Iterable[Sequence[float]]) -> BuildingMap:
    """Map of axis-aligned rectangles given as ``(xmin, ymin, xmax, ymax)``."""
    polys = [
        [[x0, y0], [x1, y0], [x1, y1], [x0, y1]] for x0, y0, x1, y1 in boxes
    ]
    return BuildingMap(tuple(polys))
