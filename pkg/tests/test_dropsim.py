"""Tests for the Monte-Carlo drop engine, its configuration and random streams."""

import numpy as np
import pytest

from chanmodel.dropsim.config import (
    DropConfig,
    IncidenceMode,
    LosMode,
    Placement,
    ShadowingMode,
    config_hash,
)
from chanmodel.dropsim.engine import LINK_COLUMNS, coupling_loss_cdf, run_drop
from chanmodel.dropsim.shadowing import LINK_SLOTS, CorrelatedField, link_uniforms
from chanmodel.error_handling.error_manager import get_error_manager
from chanmodel.error_handling.errors import ConfigValidationError, InvalidArgumentError
from chanmodel.geometry.building_map import rectangles
from chanmodel.model.scenario_model import ScenarioId
from chanmodel.propagation.los import LosModel, default_params, p_los_d1d2
from chanmodel.propagation.pathloss import CiModel, PathLossModelKind, ci_pl
from chanmodel.propagation.penetration import BplClass, o2i_loss
from tests.utils import brute_force_los


def test_link_uniforms_are_prefix_stable():
    """Adding links never changes the draws of earlier links."""
    short = link_uniforms(11, 5)
    long = link_uniforms(11, 50)
    assert short.shape == (5, LINK_SLOTS)
    np.testing.assert_array_equal(long[:5], short)
    assert np.all((long > 0) & (long < 1))
    assert not np.array_equal(link_uniforms(12, 5), short)


def test_correlated_field_statistics():
    field = CorrelatedField.draw(seed=3, decorrelation_distance_m=20.0)
    xy = np.random.default_rng(0).uniform(-5000, 5000, (20000, 2))
    values = field(xy)
    assert abs(values.mean()) < 0.1
    assert values.std() == pytest.approx(1.0, abs=0.1)


def test_correlated_field_is_correlated_at_short_range():
    field = CorrelatedField.draw(seed=4, decorrelation_distance_m=50.0)
    base = np.random.default_rng(1).uniform(-2000, 2000, (5000, 2))
    near = field(base + [1.0, 0.0])
    far = field(base + [1000.0, 0.0])
    values = field(base)
    assert np.corrcoef(values, near)[0, 1] > 0.9
    assert abs(np.corrcoef(values, far)[0, 1]) < 0.1


@pytest.mark.slow
def test_correlated_field_decays_exponentially():
    """Averaged over realizations, the correlation at L is 1/e and at 2L is 1/e^2."""
    length = 10.0
    base = np.random.default_rng(2).uniform(-2000, 2000, (5000, 2))
    at_length, at_twice = [], []
    for seed in range(10):
        field = CorrelatedField.draw(seed=seed, decorrelation_distance_m=length)
        values = field(base)
        at_length.append(np.corrcoef(values, field(base + [length, 0.0]))[0, 1])
        at_twice.append(np.corrcoef(values, field(base + [0.0, 2.0 * length]))[0, 1])
    assert np.mean(at_length) == pytest.approx(np.exp(-1.0), abs=0.03)
    assert np.mean(at_twice) == pytest.approx(np.exp(-2.0), abs=0.03)


def test_stochastic_los_fraction_follows_model():
    """Per-bin LOS fractions stay within 4 binomial sigma of the model."""
    cfg = DropConfig(ue_count=20000, radius_m=300.0, sf_mode=ShadowingMode.OFF)
    result = run_drop(cfg, seed=5)
    bins = result.los_by_distance()
    params = cfg.effective_los_params
    for center, count, fraction in zip(bins.centers, bins.counts, bins.p_hat):
        lo, hi = center - 5.0, center + 5.0
        d = result.links["los_distance_m"].to_numpy()
        in_bin = (d >= lo) & (d < hi)
        expected = float(np.mean(p_los_d1d2(params, d[in_bin])))
        sigma = np.sqrt(max(expected * (1 - expected), 1e-12) / count)
        assert abs(fraction - expected) <= 4 * sigma + 1e-12


@pytest.mark.slow
def test_shadowing_std_matches_sigma():
    """Shadowing normalised by its state's sigma is standard normal."""
    cfg = DropConfig(ue_count=100_000, indoor_fraction=0.0)
    links = run_drop(cfg, seed=21).links
    sigma = np.where(links["los"] == 1, 3.1, 8.2)
    z = links["sf_db"].to_numpy() / sigma
    assert z.std() == pytest.approx(1.0, abs=0.01)
    assert abs(z.mean()) < 0.02
    nlos = links.loc[links["los"] == 0, "sf_db"]
    assert nlos.std() == pytest.approx(8.2, rel=0.02)


def test_shadowing_off_gives_pure_path_loss():
    cfg = DropConfig(ue_count=200, sf_mode=ShadowingMode.OFF)
    links = run_drop(cfg, seed=1).links
    assert (links["sf_db"] == 0).all()
    los = links[links["los"] == 1]
    expected = ci_pl(CiModel(1.98), 28.0, los["d2d_m"].to_numpy())
    np.testing.assert_allclose(los["pl_db"], expected, atol=1e-9)


def test_coupling_loss_is_the_sum_of_its_parts():
    cfg = DropConfig(ue_count=500, indoor_fraction=0.5, bpl_high_fraction=0.3)
    links = run_drop(cfg, seed=8).links
    total = links["pl_db"] + links["sf_db"] + links["o2i_db"]
    np.testing.assert_allclose(links["coupling_loss_db"], total, atol=1e-12)
    assert list(links.columns) == LINK_COLUMNS


def test_indoor_links_carry_o2i_loss():
    cfg = DropConfig(
        ue_count=2000,
        indoor_fraction=0.4,
        bpl_high_fraction=0.5,
        incidence=IncidenceMode.UNIFORM,
        max_indoor_depth_m=20.0,
    )
    links = run_drop(cfg, seed=2).links
    indoor = links[links["indoor"] == 1]
    outdoor = links[links["indoor"] == 0]
    assert 0.35 < len(indoor) / len(links) < 0.45
    assert (outdoor["o2i_db"] == 0).all()
    assert (outdoor["bpl_class"] == "").all()
    assert set(indoor["bpl_class"]) == {"low", "high"}
    assert (indoor["depth_m"] <= 20.0).all()
    assert ((indoor["incidence_deg"] >= 0) & (indoor["incidence_deg"] < 90)).all()
    row = indoor.iloc[0]
    expected = o2i_loss(
        BplClass(row["bpl_class"]), 28.0, row["depth_m"], row["incidence_deg"], cfg.o2i
    )
    assert row["o2i_db"] == pytest.approx(expected)
    # Indoor LOS is judged at the outer wall.
    np.testing.assert_allclose(
        indoor["los_distance_m"], np.maximum(indoor["d2d_m"] - indoor["depth_m"], 1.0)
    )


def test_reruns_are_byte_identical():
    cfg = DropConfig(ue_count=300, indoor_fraction=0.2, sf_mode=ShadowingMode.IID)
    first = run_drop(cfg, seed=99).links.to_csv(float_format="%.17g")
    second = run_drop(cfg, seed=99).links.to_csv(float_format="%.17g")
    assert first == second
    third = run_drop(cfg, seed=100).links.to_csv(float_format="%.17g")
    assert first != third


def test_adding_ues_keeps_earlier_links():
    small = run_drop(DropConfig(ue_count=50), seed=4).links
    large = run_drop(DropConfig(ue_count=80), seed=4).links
    columns = [c for c in LINK_COLUMNS if c != "link"]
    assert small[columns].equals(large[columns].iloc[:50].reset_index(drop=True))


def test_correlated_shadowing_is_reproducible():
    cfg = DropConfig(
        ue_count=300, sf_mode=ShadowingMode.EXP_CORRELATED, decorrelation_distance_m=10.0
    )
    a = run_drop(cfg, seed=6).links["sf_db"]
    b = run_drop(cfg, seed=6).links["sf_db"]
    assert a.equals(b)
    assert a.std() > 0


def test_disc_placement_respects_radii():
    cfg = DropConfig(ue_count=3000, radius_m=150.0, min_distance_m=20.0, ap_positions=((5.0, -5.0),))
    d = run_drop(cfg, seed=3).links["d2d_m"]
    assert d.min() >= 20.0 - 1e-9
    assert d.max() <= 150.0 + 1e-9


def test_nearest_ap_serves_each_ue():
    cfg = DropConfig(
        placement=Placement.EXPLICIT,
        ue_positions=((10.0, 0.0), (90.0, 0.0), (0.3, 0.0)),
        ap_positions=((0.0, 0.0), (100.0, 0.0)),
    )
    links = run_drop(cfg, seed=0).links
    assert links["ap"].tolist() == [0, 1, 0]
    assert links["d2d_m"].tolist() == pytest.approx([10.0, 10.0, 1.0])
    assert any("closer than 1 m" in e["message"] for e in get_error_manager().get_errors())


def test_abg_drop_uses_abg_for_nlos_only():
    cfg = DropConfig(
        los_scenario=ScenarioId.UMA_LOS,
        nlos_scenario=ScenarioId.UMA_NLOS,
        pl_model=PathLossModelKind.ABG,
        sf_mode=ShadowingMode.OFF,
        ue_count=400,
    )
    links = run_drop(cfg, seed=12).links
    nlos = links[links["los"] == 0].iloc[0]
    expected = 34.0 * np.log10(nlos["d2d_m"]) + 19.2 + 23.0 * np.log10(28.0)
    assert nlos["pl_db"] == pytest.approx(expected)
    los = links[links["los"] == 1].iloc[0]
    assert los["pl_db"] == pytest.approx(ci_pl(CiModel(2.0), 28.0, los["d2d_m"]))


def test_3gpp_uma_los_model_in_drop():
    cfg = DropConfig(
        los_scenario=ScenarioId.UMA_LOS,
        nlos_scenario=ScenarioId.UMA_NLOS,
        los_model=LosModel.GPP_UMA,
        ue_height_m=20.0,
        ue_count=500,
    )
    result = run_drop(cfg, seed=1)
    assert 0.0 < result.summary()["los_fraction"] < 1.0


def _random_boxes(rng, count):
    boxes = []
    while len(boxes) < count:
        x, y = rng.uniform(-150, 150, 2)
        w, h = rng.uniform(5, 40, 2)
        box = (x, y, x + w, y + h)
        touches_ap = box[0] <= 0 <= box[2] and box[1] <= 0 <= box[3]
        if touches_ap:
            continue
        if all(box[2] < b[0] or box[0] > b[2] or box[3] < b[1] or box[1] > b[3] for b in boxes):
            boxes.append(box)
    return boxes


@pytest.mark.slow
def test_map_mode_matches_brute_force_oracle():
    """Map-mode LOS flags agree with an independent all-edges check."""
    rng = np.random.default_rng(17)
    checked = 0
    for trial in range(20):
        building_map = rectangles(_random_boxes(rng, int(rng.integers(1, 8))))
        polygons = [p.tolist() for p in building_map.polygons]
        cfg = DropConfig(los_mode=LosMode.MAP, ue_count=50, radius_m=180.0, min_distance_m=1.0)
        links = run_drop(cfg, building_map, seed=trial).links
        for row in links.itertuples():
            ue = (row.ue_x_m, row.ue_y_m)
            assert bool(row.los) == brute_force_los(polygons, (0.0, 0.0), ue)
            checked += 1
    assert checked == 1000


def test_map_mode_indoor_geometry():
    building_map = rectangles([(10, 10, 20, 20)])
    cfg = DropConfig(
        los_mode=LosMode.MAP,
        placement=Placement.EXPLICIT,
        ue_positions=((15.0, 15.0), (0.0, 30.0), (30.0, 20.0)),
        ap_positions=((0.0, 15.0),),
        sf_mode=ShadowingMode.OFF,
    )
    links = run_drop(cfg, building_map, seed=0).links
    indoor = links.iloc[0]
    assert indoor["indoor"] == 1 and indoor["los"] == 0
    assert indoor["los_distance_m"] == pytest.approx(10.0)
    assert indoor["depth_m"] == pytest.approx(5.0)
    assert links.iloc[1]["los"] == 1
    assert links.iloc[2]["los"] == 0


def test_map_mode_validation():
    building_map = rectangles([(10, 10, 20, 20)])
    with pytest.raises(ConfigValidationError, match="los_mode is not 'map'"):
        run_drop(DropConfig(ue_count=5), building_map, seed=0)
    with pytest.raises(ConfigValidationError, match="needs a building map"):
        run_drop(DropConfig(ue_count=5, los_mode=LosMode.MAP), seed=0)
    with pytest.raises(ConfigValidationError, match="inside a building"):
        run_drop(
            DropConfig(ue_count=5, los_mode=LosMode.MAP, ap_positions=((15.0, 15.0),)),
            building_map,
            seed=0,
        )


def test_map_mode_ignores_indoor_fraction_with_warning():
    building_map = rectangles([(50, 50, 60, 60)])
    cfg = DropConfig(ue_count=20, los_mode=LosMode.MAP, indoor_fraction=0.5)
    run_drop(cfg, building_map, seed=0)
    assert any("ignored in map mode" in e["message"] for e in get_error_manager().get_errors())


def test_seed_is_required():
    with pytest.raises(ConfigValidationError, match="needs a seed"):
        run_drop(DropConfig(ue_count=5))
    with pytest.raises(ConfigValidationError, match="non-negative"):
        run_drop(DropConfig(ue_count=5), seed=-1)
    assert run_drop(DropConfig(ue_count=5, rng_seed=3)).seed == 3


def test_coupling_loss_cdf():
    result = run_drop(DropConfig(ue_count=1000), seed=2)
    cdf = coupling_loss_cdf(result, [5, 50, 95])
    assert list(cdf) == ["p5", "p50", "p95"]
    assert cdf["p5"] <= cdf["p50"] <= cdf["p95"]
    assert cdf["p50"] == pytest.approx(float(np.median(result.links["coupling_loss_db"])))
    with pytest.raises(InvalidArgumentError, match="percentiles"):
        coupling_loss_cdf(result, [101])


def test_summary_layout():
    result = run_drop(DropConfig(ue_count=100, indoor_fraction=0.3), seed=7)
    summary = result.summary()
    assert summary["seed"] == 7
    assert summary["link_count"] == 100
    assert summary["config_hash"] == config_hash(result.config)
    assert set(summary["coupling_loss_cdf"]) == {"p5", "p10", "p50", "p90", "p95"}
    assert summary["los_fraction_by_distance"]["bin_width_m"] == 10.0


@pytest.mark.parametrize(
    "kwargs,message",
    [
        ({"los_scenario": ScenarioId.UMA_LOS}, "mixes environments"),
        (
            {"los_scenario": ScenarioId.UMI_SC_NLOS, "nlos_scenario": ScenarioId.UMI_SC_LOS},
            "LOS scenario first",
        ),
        ({"frequency_ghz": 0.0}, "frequency"),
        ({"placement": Placement.EXPLICIT}, "ue_positions"),
        ({"ue_count": 0}, "ue_count"),
        ({"min_distance_m": 300.0}, "min_distance_m"),
        ({"ap_positions": ()}, "AP position"),
        ({"ue_height_m": 30.0}, "ue_height_m"),
        ({"pl_model": PathLossModelKind.CIF}, "ci and abg"),
        ({"los_model": LosModel.GPP_UMA}, "UMa scenario pair"),
        ({"indoor_fraction": 1.5}, "indoor_fraction"),
        ({"sf_mode": ShadowingMode.EXP_CORRELATED}, "decorrelation_distance_m"),
        ({"rng_seed": -4}, "seed"),
    ],
)
def test_config_validation(kwargs, message):
    with pytest.raises(ConfigValidationError, match=message):
        DropConfig(**kwargs)


def test_config_from_dict():
    cfg = DropConfig.from_dict(
        {
            "environment": "uma",
            "frequency_ghz": 73,
            "ue_count": 10,
            "los_model": "nyu",
            "los_params": {"d1": 20, "d2": 160},
            "o2i": {"depth_loss_per_m": 1.0},
            "sf_mode": "exp-correlated",
            "decorrelation_distance_m": 13,
        }
    )
    assert cfg.los_scenario is ScenarioId.UMA_LOS
    assert cfg.los_model is LosModel.NYU_SQUARED
    assert cfg.effective_los_params.d2 == 160.0
    assert cfg.o2i.depth_loss_per_m == 1.0
    assert cfg.sf_mode is ShadowingMode.EXP_CORRELATED


def test_config_from_dict_errors():
    with pytest.raises(ConfigValidationError, match="unknown drop configuration keys"):
        DropConfig.from_dict({"ue_cnt": 5})
    with pytest.raises(ConfigValidationError, match="sf_mode must be one of"):
        DropConfig.from_dict({"sf_mode": "lognormal"})
    with pytest.raises(ConfigValidationError, match="unknown scenario"):
        DropConfig.from_dict({"scenarios": {"los": "rma-los", "nlos": "rma-nlos"}})
    with pytest.raises(ConfigValidationError, match="either environment or scenarios"):
        DropConfig.from_dict(
            {"environment": "uma", "scenarios": {"los": "uma-los", "nlos": "uma-nlos"}}
        )
    with pytest.raises(ConfigValidationError, match="unknown o2i keys"):
        DropConfig.from_dict({"o2i": {"wall_db": 3}})


def test_config_hash_tracks_content():
    a = DropConfig(ue_count=10)
    b = DropConfig.from_dict(a.to_dict())
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(DropConfig(ue_count=11))
    assert default_params(a.environment) == a.effective_los_params
