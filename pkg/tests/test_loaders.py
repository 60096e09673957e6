"""Tests for the CSV and configuration readers."""

import pytest

from chanmodel.error_handling.errors import SchemaError
from chanmodel.input.loaders import (
    load_assignment,
    load_config,
    load_los_samples,
    load_pathloss_samples,
    load_rays,
    read_csv_table,
)
from tests.utils import RAY_COLUMNS_HEADER, write_csv


def test_pathloss_samples(tmp_path):
    path = write_csv(
        tmp_path / "pl.csv",
        "freq_ghz,dist_m,pl_db,los",
        [(28, 10, 81.5, 1), (73.5, 120, 130.25, 0)],
    )
    samples = load_pathloss_samples(path)
    assert len(samples) == 2
    assert samples[0].f_ghz == 28.0
    assert samples[0].los is True
    assert samples[1].los is False
    assert samples[1].weight == 1.0


def test_pathloss_weights_and_blank_cells(tmp_path):
    path = write_csv(
        tmp_path / "pl.csv",
        "freq_ghz,dist_m,pl_db,los,weight",
        [(28, 10, 81.5, 1, 2.5), (28, 20, 90.0, 0, "")],
    )
    samples = load_pathloss_samples(path)
    assert [s.weight for s in samples] == [2.5, 1.0]


def test_comments_and_blank_lines_keep_line_numbers(tmp_path):
    path = tmp_path / "pl.csv"
    path.write_text(
        "# measured at 28 GHz\n"
        "freq_ghz,dist_m,pl_db,los\n"
        "\n"
        "28,10,80,1\n"
        "# second street\n"
        "28,abc,90,0\n"
    )
    with pytest.raises(SchemaError) as info:
        load_pathloss_samples(path)
    assert info.value.line == 6
    assert "column 'dist_m' value 'abc' is not a number" in info.value.message
    assert str(path) in str(info.value)


def test_missing_columns(tmp_path):
    path = write_csv(tmp_path / "pl.csv", "freq_ghz,dist_m,pl_db", [(28, 10, 80)])
    with pytest.raises(SchemaError, match="missing column\\(s\\) los") as info:
        load_pathloss_samples(path)
    assert info.value.line == 1
    assert "documented CSV schema" in info.value.help_text


def test_bad_los_flag(tmp_path):
    path = write_csv(tmp_path / "los.csv", "dist_m,los", [(10, 1), (20, 2)])
    with pytest.raises(SchemaError, match="must be 0 or 1") as info:
        load_los_samples(path)
    assert info.value.line == 3


def test_los_flag_spellings(tmp_path):
    path = write_csv(tmp_path / "los.csv", "dist_m,los", [(10, "true"), (20, "No"), (30, 1)])
    assert [s.los for s in load_los_samples(path)] == [True, False, True]


def test_ragged_row(tmp_path):
    path = write_csv(tmp_path / "los.csv", "dist_m,los", [(10, 1), (20, 0, 5)])
    with pytest.raises(SchemaError, match="row has 3 fields, header has 2") as info:
        read_csv_table(path, ("dist_m", "los"))
    assert info.value.line == 3


def test_non_positive_distance(tmp_path):
    path = write_csv(tmp_path / "los.csv", "dist_m,los", [(10, 1), (0, 0)])
    with pytest.raises(SchemaError, match="'dist_m' must be positive"):
        load_los_samples(path)


def test_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("# only a comment\n\n")
    with pytest.raises(SchemaError, match="no header"):
        load_los_samples(path)


def test_missing_file(tmp_path):
    with pytest.raises(SchemaError, match="cannot read input file"):
        load_los_samples(tmp_path / "nope.csv")


def test_unknown_columns_are_ignored(tmp_path, caplog):
    path = write_csv(tmp_path / "los.csv", "dist_m,los,site", [(10, 1, "A")])
    assert len(load_los_samples(path)) == 1
    assert "ignoring unknown column(s) site" in caplog.text


def test_rays(tmp_path):
    path = write_csv(
        tmp_path / "rays.csv",
        RAY_COLUMNS_HEADER + ",xpr_db",
        [("tx1", 12.5, 190.0, 5, -30, -2, -10, 13.87), ("tx1", 40, 10, 0, 20, 0, 0, "")],
    )
    rays = load_rays(path)
    assert rays[0].aod_az == pytest.approx(-170.0)
    assert rays[0].power == pytest.approx(0.1)
    assert rays[0].xpr_db == 13.87
    assert rays[0].link_id == "tx1"
    assert rays[1].xpr_db is None
    assert rays[1].power == pytest.approx(1.0)


def test_ray_validation_reports_line(tmp_path):
    path = write_csv(tmp_path / "rays.csv", RAY_COLUMNS_HEADER, [("", 1, 0, 95, 0, 0, 0)])
    with pytest.raises(SchemaError, match="aod_el") as info:
        load_rays(path)
    assert info.value.line == 2


def test_assignment(tmp_path):
    path = write_csv(
        tmp_path / "clusters.csv",
        "ray_index,link_id,cluster,pruned",
        [(1, "", 0, 0), (0, "", 1, 1), (2, "", 0, 0)],
    )
    assignment = load_assignment(path, 3)
    assert assignment.labels.tolist() == [1, 0, 0]
    assert assignment.pruned.tolist() == [True, False, False]


def test_assignment_without_pruned_column(tmp_path):
    path = write_csv(tmp_path / "a.csv", "ray_index,cluster", [(0, 0), (1, 0)])
    assert not load_assignment(path, 2).pruned.any()


@pytest.mark.parametrize(
    "rows,message",
    [
        ([(0, 0), (0, 1)], "out of range or repeated"),
        ([(0, 0), (5, 1)], "out of range or repeated"),
        ([(0, 0)], "no cluster assignment for ray_index 1"),
        ([(0, 0), (1, -1)], "non-negative integer"),
    ],
)
def test_assignment_errors(tmp_path, rows, message):
    path = write_csv(tmp_path / "a.csv", "ray_index,cluster", rows)
    with pytest.raises(SchemaError, match=message):
        load_assignment(path, 2)


def test_yaml_and_json_config(tmp_path):
    yaml_path = tmp_path / "run.yaml"
    yaml_path.write_text("drop:\n  ue_count: 5\n  environment: uma\n")
    assert load_config(yaml_path) == {"drop": {"ue_count": 5, "environment": "uma"}}
    json_path = tmp_path / "run.json"
    json_path.write_text('{"cluster": {"k_max": 4}}')
    assert load_config(json_path) == {"cluster": {"k_max": 4}}
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_config(empty) == {}


def test_config_errors(tmp_path):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text('{\n  "drop": [1,\n}')
    with pytest.raises(SchemaError, match="invalid JSON") as info:
        load_config(bad_json)
    assert info.value.line == 3

    bad_yaml = tmp_path / "bad.yaml"
    bad_yaml.write_text("drop: [1, 2\n")
    with pytest.raises(SchemaError, match="invalid YAML"):
        load_config(bad_yaml)

    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(SchemaError, match="must be a mapping"):
        load_config(scalar)
