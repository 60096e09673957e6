"""Tests for the CI, CIF and ABG path loss models and the scenario catalog."""

import numpy as np
import pytest

from chanmodel.error_handling.error_manager import get_error_manager
from chanmodel.error_handling.errors import InvalidArgumentError, ModelNotAvailableError
from chanmodel.model.scenario_model import (
    Environment,
    ScenarioId,
    catalog_lookup,
    catalog_to_dict,
    scenario_catalog,
)
from chanmodel.model.units import check_distance, check_frequency, db_to_linear, linear_to_db
from chanmodel.propagation.pathloss import (
    AbgModel,
    CifModel,
    CiModel,
    PathLossModelKind,
    abg_pl,
    centroid_frequency,
    ci_pl,
    cif_pl,
    evaluate_path_loss,
    fspl_1m,
    scenario_model,
    scenario_sigma,
)


def test_fspl_golden_values():
    """Free-space loss at 1 m matches hand-derived values."""
    assert fspl_1m(28.0) == pytest.approx(61.391, abs=0.01)
    assert fspl_1m(1.0) == pytest.approx(32.448, abs=0.01)


def test_ci_golden_values():
    """CI adds 10 n dB per decade on top of the 1 m anchor."""
    assert ci_pl(CiModel(2.0), 28.0, 100.0) == pytest.approx(101.391, abs=0.01)
    assert ci_pl(CiModel(3.19), 28.0, 100.0) == pytest.approx(125.191, abs=0.01)


def test_abg_golden_values():
    """ABG evaluated with catalog NLOS parameters."""
    uma = scenario_model(ScenarioId.UMA_NLOS, PathLossModelKind.ABG)
    umi = scenario_model(ScenarioId.UMI_SC_NLOS, PathLossModelKind.ABG)
    assert abg_pl(uma, 28.0, 100.0) == pytest.approx(120.485, abs=0.01)
    assert abg_pl(umi, 28.0, 100.0) == pytest.approx(124.483, abs=0.01)


def test_cif_golden_value():
    """CIF with a positive slope grows the exponent above f0."""
    model = CifModel(n=2.0, b=0.1, f0=50.0)
    assert cif_pl(model, 75.0, 100.0) == pytest.approx(111.946, abs=0.01)


def test_ci_at_one_meter_is_free_space():
    """At the anchor distance every exponent gives FSPL."""
    for n in (1.5, 2.0, 3.5):
        assert ci_pl(CiModel(n), 28.0, 1.0) == pytest.approx(fspl_1m(28.0), abs=1e-12)


def test_cif_with_zero_slope_equals_ci():
    """CIF(b=0) is CI on a full (f, d) grid."""
    f, d = np.meshgrid(np.linspace(2.0, 80.0, 10), np.geomspace(1.0, 1000.0, 10))
    ci = ci_pl(CiModel(2.7), f.ravel(), d.ravel())
    cif = cif_pl(CifModel(2.7, 0.0, 30.0), f.ravel(), d.ravel())
    np.testing.assert_allclose(cif, ci, rtol=0, atol=1e-9)


def test_cif_at_centroid_equals_ci():
    """At f = f0 the slope term vanishes whatever b is."""
    ci = ci_pl(CiModel(2.4), 28.0, np.geomspace(1, 500, 20))
    cif = cif_pl(CifModel(2.4, 0.3, 28.0), 28.0, np.geomspace(1, 500, 20))
    np.testing.assert_allclose(cif, ci, rtol=0, atol=1e-9)


def test_abg_matches_ci_under_parameter_substitution():
    """alpha = n, beta = 20 log10(4 pi 1e9 / c), gamma = 2 reproduces CI."""
    n = 3.1
    beta = float(fspl_1m(1.0))
    abg = AbgModel(alpha=n, beta=beta, gamma=2.0)
    f, d = np.meshgrid(np.linspace(1.0, 90.0, 10), np.geomspace(1.0, 800.0, 10))
    np.testing.assert_allclose(
        abg_pl(abg, f.ravel(), d.ravel()), ci_pl(CiModel(n), f.ravel(), d.ravel()), atol=1e-9
    )


def test_scalar_in_scalar_out():
    """Scalars give Python floats, arrays give arrays."""
    assert isinstance(ci_pl(CiModel(2.0), 28.0, 10.0), float)
    out = ci_pl(CiModel(2.0), 28.0, [10.0, 20.0])
    assert isinstance(out, np.ndarray)
    assert out.shape == (2,)


def test_ci_refuses_distances_below_anchor():
    """CI and CIF are undefined below 1 m."""
    with pytest.raises(InvalidArgumentError, match="below the 1 m close-in anchor"):
        ci_pl(CiModel(2.0), 28.0, 0.5)
    with pytest.raises(InvalidArgumentError, match="close-in"):
        cif_pl(CifModel(2.0, 0.1, 28.0), 28.0, [10.0, 0.9])


def test_abg_accepts_sub_meter_distances():
    """ABG has a floating intercept and no 1 m anchor."""
    model = AbgModel(3.4, 19.2, 2.3)
    assert np.isfinite(abg_pl(model, 28.0, 0.5))


@pytest.mark.parametrize("freq", [0.0, -3.0, float("nan")])
def test_bad_frequency_raises(freq):
    """Non-positive or non-finite frequencies are rejected."""
    with pytest.raises(InvalidArgumentError, match="frequency"):
        fspl_1m(freq)


def test_out_of_band_frequency_warns():
    """Frequencies outside 0.5-100 GHz evaluate but leave a diagnostic."""
    value = fspl_1m(150.0)
    assert np.isfinite(value)
    messages = [e["message"] for e in get_error_manager().get_errors()]
    assert any("outside" in m for m in messages)


def test_in_band_frequency_does_not_warn():
    fspl_1m([0.5, 28.0, 100.0])
    assert not get_error_manager().has_errors()


def test_model_parameter_validation():
    with pytest.raises(InvalidArgumentError):
        CiModel(0.0)
    with pytest.raises(InvalidArgumentError):
        CifModel(2.0, 0.1, 0.0)
    with pytest.raises(InvalidArgumentError):
        AbgModel(float("inf"), 1.0, 2.0)


def test_evaluate_dispatches_on_model_type():
    model = CiModel(2.0)
    assert evaluate_path_loss(model, 28.0, 100.0) == ci_pl(model, 28.0, 100.0)
    with pytest.raises(InvalidArgumentError, match="unsupported"):
        evaluate_path_loss(object(), 28.0, 100.0)


def test_centroid_frequency():
    """Count-weighted mean frequency."""
    assert centroid_frequency([(28.0, 10), (73.5, 30)]) == pytest.approx(62.125)
    assert centroid_frequency([(28.0, 5), (73.5, 5)]) == pytest.approx(50.75)
    assert centroid_frequency([(38.0, 7)]) == 38.0


def test_centroid_frequency_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        centroid_frequency([])
    with pytest.raises(InvalidArgumentError, match="counts"):
        centroid_frequency([(28.0, 0)])


def test_abg_not_available_for_los_scenarios():
    """LOS rows publish CI only."""
    with pytest.raises(ModelNotAvailableError):
        scenario_model(ScenarioId.UMA_LOS, PathLossModelKind.ABG)
    with pytest.raises(ModelNotAvailableError):
        scenario_sigma(ScenarioId.UMI_OS_LOS, PathLossModelKind.ABG)


def test_scenario_cif_needs_f0():
    with pytest.raises(InvalidArgumentError, match="f0"):
        scenario_model(ScenarioId.UMA_NLOS, PathLossModelKind.CIF)
    model = scenario_model(ScenarioId.UMA_NLOS, PathLossModelKind.CIF, f0=28.0)
    assert model == CifModel(3.0, 0.0, 28.0)


def test_scenario_sigma_per_model():
    assert scenario_sigma(ScenarioId.UMA_NLOS, PathLossModelKind.CI) == 6.8
    assert scenario_sigma(ScenarioId.UMA_NLOS, PathLossModelKind.ABG) == 6.5
    assert scenario_sigma(ScenarioId.UMI_SC_LOS, PathLossModelKind.CI) == 3.1


def test_catalog_has_six_rows_in_order():
    rows = scenario_catalog()
    assert [r.scenario for r in rows] == list(ScenarioId)
    for row in rows:
        assert row.abg_available == (not row.scenario.is_los)


def test_catalog_los_pairs():
    uma = catalog_lookup(ScenarioId.UMA_NLOS)
    assert (uma.los_d1, uma.los_d2) == (18.0, 63.0)
    assert catalog_lookup(ScenarioId.UMI_OS_LOS).los_d2 == 36.0


def test_catalog_export_marks_missing_abg():
    exported = catalog_to_dict()["scenarios"]
    assert exported[0]["abg"] is None
    assert exported[1]["abg"]["alpha"] == 3.4


@pytest.mark.parametrize(
    "text,expected",
    [
        ("uma-los", ScenarioId.UMA_LOS),
        ("UMa_NLOS", ScenarioId.UMA_NLOS),
        ("UMi-S.C.-NLOS", ScenarioId.UMI_SC_NLOS),
        ("umistreetcanyonlos", ScenarioId.UMI_SC_LOS),
        ("UMi_OpenSquare_NLOS", ScenarioId.UMI_OS_NLOS),
    ],
)
def test_scenario_parse_aliases(text, expected):
    assert ScenarioId.parse(text) is expected


def test_scenario_parse_unknown():
    with pytest.raises(InvalidArgumentError, match="unknown scenario"):
        ScenarioId.parse("rma-los")


def test_scenario_counterpart_and_environment():
    assert ScenarioId.UMI_OS_LOS.counterpart() is ScenarioId.UMI_OS_NLOS
    assert ScenarioId.UMA_NLOS.environment is Environment.UMA
    assert Environment.parse("UMi_Street_Canyon") is Environment.UMI_STREET_CANYON
    with pytest.raises(InvalidArgumentError, match="unknown environment"):
        Environment.parse("suburban")


def test_unit_helpers():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert linear_to_db(100.0) == pytest.approx(20.0)
    np.testing.assert_array_equal(check_frequency([1.0, 2.0]), [1.0, 2.0])
    with pytest.raises(InvalidArgumentError, match="positive"):
        check_distance([1.0, 0.0])
    with pytest.raises(InvalidArgumentError, match="at least 0.01"):
        check_distance(0.001, 0.01)
