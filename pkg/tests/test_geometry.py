"""Tests for building maps, map-based LOS and outer-wall distances."""

import json

import numpy as np
import pytest

from chanmodel.error_handling.errors import InvalidArgumentError, SchemaError
from chanmodel.geometry.building_map import (
    BlockageState,
    BuildingMap,
    Position2D,
    classify_blockage,
    is_los,
    load_building_map,
    outer_wall_distance,
    rectangles,
)
from tests.utils import brute_force_los


@pytest.fixture
def square_map():
    """A single 10 m square building."""
    return rectangles([(10, 10, 20, 20)])


def test_blocked_through_building(square_map):
    assert not is_los(square_map, Position2D(0, 15), Position2D(30, 15))
    assert classify_blockage(square_map, Position2D(0, 15), Position2D(30, 15)) is (
        BlockageState.GEOMETRY_BLOCKED
    )


def test_clear_path_is_los(square_map):
    assert is_los(square_map, Position2D(0, 0), Position2D(0, 30))
    assert classify_blockage(square_map, Position2D(0, 0), Position2D(0, 30)) is BlockageState.LOS


def test_touching_a_vertex_blocks(square_map):
    """The segment only grazes the corner (10, 10)."""
    assert not is_los(square_map, Position2D(0, 20), Position2D(20, 0))


def test_running_along_an_edge_blocks(square_map):
    assert not is_los(square_map, Position2D(0, 10), Position2D(30, 10))


def test_empty_map_is_always_los():
    empty = BuildingMap(())
    assert empty.is_empty
    assert is_los(empty, Position2D(0, 0), Position2D(100, 100))


def test_indoor_ue_is_never_los(square_map):
    ue = square_map.place(15, 15)
    assert ue.indoor
    assert not is_los(square_map, Position2D(15, 0), ue)


def test_boundary_counts_as_indoor(square_map):
    assert square_map.locate(10, 15) == 0
    assert square_map.locate(10, 10) == 0
    assert square_map.locate(9.999, 15) is None


def test_indoor_ap_is_rejected(square_map):
    with pytest.raises(InvalidArgumentError, match="indoor"):
        is_los(square_map, Position2D(15, 15), Position2D(0, 0))


def test_outer_wall_distance_examples(square_map):
    ap = Position2D(0, 15)
    crossing = outer_wall_distance(square_map, ap, square_map.place(15, 15))
    assert crossing.wall_distance == pytest.approx(10.0)
    assert crossing.depth == pytest.approx(5.0)
    assert crossing.incidence_deg == pytest.approx(0.0)
    assert crossing.polygon_index == 0

    deeper = outer_wall_distance(square_map, ap, square_map.place(19, 15))
    assert (deeper.wall_distance, deeper.depth) == (pytest.approx(10.0), pytest.approx(9.0))


def test_outer_wall_incidence_angle(square_map):
    """A 45 degree ray hits the west wall 45 degrees off its normal."""
    crossing = outer_wall_distance(square_map, Position2D(0, 5), square_map.place(14, 19))
    assert crossing.incidence_deg == pytest.approx(45.0, abs=1e-9)
    assert crossing.wall_distance == pytest.approx(np.hypot(10, 10))
    assert crossing.depth == pytest.approx(np.hypot(4, 4))


def test_outer_wall_needs_indoor_ue(square_map):
    with pytest.raises(InvalidArgumentError, match="not indoor"):
        outer_wall_distance(square_map, Position2D(0, 0), Position2D(0, 5))


def test_wall_plus_depth_is_total_distance():
    """Randomized indoor UEs: the split is exact."""
    rng = np.random.default_rng(7)
    building_map = rectangles([(10, 10, 30, 25), (50, -20, 70, 0)])
    for _ in range(2000):
        ap = Position2D(*rng.uniform(-40, 0, 2))
        box = building_map.polygons[int(rng.integers(2))]
        lo, hi = box.min(axis=0), box.max(axis=0)
        ue = building_map.place(*rng.uniform(lo, hi))
        crossing = outer_wall_distance(building_map, ap, ue)
        assert crossing.total_distance == pytest.approx(ap.distance_to(ue), abs=1e-9)
        assert crossing.depth >= 0
        assert 0.0 <= crossing.incidence_deg < 90.0


def test_polygon_orientation_is_normalized():
    clockwise = BuildingMap(([[0, 0], [0, 10], [10, 10], [10, 0]],))
    x, y = clockwise.polygons[0][:, 0], clockwise.polygons[0][:, 1]
    area = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    assert area > 0


def test_closing_vertex_is_dropped():
    closed = BuildingMap(([[0, 0], [10, 0], [10, 10], [0, 10], [0, 0]],))
    assert len(closed.polygons[0]) == 4


@pytest.mark.parametrize(
    "polygon,message",
    [
        ([[0, 0], [1, 1]], "at least 3"),
        ([[0, 0], [1, 0], [2, 0]], "zero area"),
        ([[0, 0], [10, 10], [10, 0], [0, 5]], "not simple"),
        ([[0, 0], [1, 0], [1, 0], [0, 1]], "repeats"),
    ],
)
def test_invalid_polygons(polygon, message):
    with pytest.raises(InvalidArgumentError, match=message):
        BuildingMap((polygon,))


def test_overlapping_polygons_are_rejected():
    with pytest.raises(InvalidArgumentError, match="overlaps"):
        rectangles([(0, 0, 10, 10), (5, 5, 15, 15)])
    with pytest.raises(InvalidArgumentError, match="overlaps"):
        rectangles([(0, 0, 10, 10), (2, 2, 4, 4)])


@pytest.mark.parametrize(
    "second",
    [
        [[0, 0], [10, 0], [10, 10], [0, 10]],
        [[0, 0], [10, 0], [10, 5], [0, 5]],
        [[0, 10], [10, 10], [10, 0], [0, 0]],
        [[0, 5], [10, 5], [10, 15], [0, 15]],
    ],
    ids=["identical", "nested-sharing-edges", "identical-clockwise", "stacked-sharing-sides"],
)
def test_overlaps_along_shared_edges_are_rejected(second):
    square = [[0, 0], [10, 0], [10, 10], [0, 10]]
    with pytest.raises(InvalidArgumentError, match="overlaps"):
        BuildingMap((square, second))


def test_buildings_may_share_a_wall():
    building_map = rectangles([(0, 0, 10, 10), (10, 0, 20, 10)])
    assert building_map.locate(5, 5) == 0
    assert building_map.locate(15, 5) == 1
    assert not is_los(building_map, Position2D(-5, 5), Position2D(25, 5))


def test_map_round_trips_through_dict(square_map):
    rebuilt = BuildingMap.from_dict(square_map.to_dict())
    np.testing.assert_array_equal(rebuilt.polygons[0], square_map.polygons[0])
    with pytest.raises(InvalidArgumentError, match="polygons"):
        BuildingMap.from_dict({"buildings": []})


def test_load_building_map(tmp_path):
    path = tmp_path / "map.json"
    path.write_text(json.dumps({"polygons": [[[0, 0], [5, 0], [5, 5], [0, 5]]]}))
    loaded = load_building_map(path)
    assert len(loaded.polygons) == 1


def test_load_building_map_errors(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"polygons": [\n')
    with pytest.raises(SchemaError) as excinfo:
        load_building_map(broken)
    assert excinfo.value.line is not None

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"polygons": [[[0, 0], [1, 1]]]}))
    with pytest.raises(SchemaError, match="at least 3"):
        load_building_map(bad)


def _random_map(rng, count):
    boxes = []
    for _ in range(count * 4):
        x, y = rng.uniform(-80, 80, 2)
        w, h = rng.uniform(4, 25, 2)
        box = (x, y, x + w, y + h)
        if all(box[2] < b[0] or box[0] > b[2] or box[3] < b[1] or box[1] > b[3] for b in boxes):
            boxes.append(box)
        if len(boxes) == count:
            break
    return rectangles(boxes)


def test_is_los_matches_brute_force_oracle():
    """Random maps and links agree with an all-edges intersection oracle."""
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 10_000:
        building_map = _random_map(rng, int(rng.integers(1, 6)))
        polygons = [p.tolist() for p in building_map.polygons]
        for _ in range(50):
            ap = rng.uniform(-100, 100, 2)
            if building_map.locate(*ap) is not None:
                continue
            ue = rng.uniform(-100, 100, 2)
            expected = brute_force_los(polygons, tuple(ap), tuple(ue))
            assert is_los(building_map, Position2D(*ap), Position2D(*ue)) == expected
            checked += 1


def test_is_los_matches_oracle_on_grid_aligned_cases():
    """Integer coordinates exercise vertex touches and collinear edges."""
    building_map = rectangles([(0, 0, 4, 4), (6, 2, 8, 6)])
    polygons = [p.tolist() for p in building_map.polygons]
    coords = range(-2, 11)
    for ax in coords:
        for ay in (-2, 5, 8):
            if building_map.locate(ax, ay) is not None:
                continue
            for ux in coords:
                for uy in range(-2, 9):
                    expected = brute_force_los(polygons, (ax, ay), (ux, uy))
                    actual = is_los(building_map, Position2D(ax, ay), Position2D(ux, uy))
                    assert actual == expected, (ax, ay, ux, uy)
