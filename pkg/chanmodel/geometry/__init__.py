"""2D building maps and map-based LOS determination."""

from .building_map import (
    BlockageState,
    BuildingMap,
    Position2D,
    WallCrossing,
    classify_blockage,
    is_los,
    load_building_map,
    outer_wall_distance,
    rectangles,
    segments_touch,
)

__all__ = [
    "BlockageState",
    "BuildingMap",
    "Position2D",
    "WallCrossing",
    "classify_blockage",
    "is_los",
    "load_building_map",
    "outer_wall_distance",
    "rectangles",
    "segments_touch",
]
