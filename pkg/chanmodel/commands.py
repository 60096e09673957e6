"""Subcommand implementations.

Each command resolves its settings (defaults, then the ``--config`` file,
then flags), does its work through the library modules and returns a
``CommandOutput``. The resolved settings are recorded on the context so the
writer can echo them into the output metadata.
"""

import argparse
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from chanmodel.clustering.kpower_means import ClusteringConfig, cluster_multirestart
from chanmodel.dropsim.config import DropConfig
from chanmodel.dropsim.engine import DEFAULT_PERCENTILES, run_drop
from chanmodel.error_handling.errors import ConfigValidationError, InvalidArgumentError
from chanmodel.fitting.los_fit import (
    DEFAULT_BIN_WIDTH_M,
    compare_los_models,
    fit_los_probability,
)
from chanmodel.fitting.pathloss_fit import LosFilter, fit_path_loss, residuals, select_samples
from chanmodel.geometry.building_map import load_building_map
from chanmodel.input.loaders import (
    load_assignment,
    load_los_samples,
    load_pathloss_samples,
    load_rays,
)
from chanmodel.model.rays import RayRecord
from chanmodel.model.scenario_model import (
    LEGACY_SPREAD_RANGES,
    LOS_MODEL_REFERENCE,
    RAY_TRACING_STUDY,
    Environment,
    ScenarioId,
    catalog_to_dict,
    scenario_catalog,
)
from chanmodel.output.file_writer import CommandOutput
from chanmodel.propagation.los import (
    DEFAULT_UE_HEIGHT_M,
    D1D2Params,
    LosModel,
    default_params,
    los_probability,
)
from chanmodel.propagation.pathloss import (
    AbgModel,
    CiModel,
    CifModel,
    PathLossModelKind,
    centroid_frequency,
    evaluate_path_loss,
    scenario_model,
    scenario_sigma,
)
from chanmodel.propagation.penetration import BplClass, O2iConfig, bpl, o2i_loss
from chanmodel.stats.spreads import spread_report

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """State shared by a single CLI invocation."""

    command: str
    args: argparse.Namespace
    file_config: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    resolved: Dict[str, Any] = field(default_factory=dict)

    def settings(self, defaults: Dict[str, Any]) -> Dict[str, Any]:
        """Merge defaults, the config file and explicit flags, in that order."""
        unknown = sorted(set(self.file_config) - set(defaults))
        if unknown:
            raise ConfigValidationError(
                f"unknown {self.command} configuration keys: {', '.join(unknown)}"
            )
        merged = dict(defaults)
        merged.update(self.file_config)
        for key in defaults:
            value = getattr(self.args, key, None)
            if value is not None:
                merged[key] = value
        self.resolved.update(merged)
        return merged

    def need_seed(self) -> int:
        if self.seed is None:
            raise ConfigValidationError(f"the {self.command} command needs a seed")
        return self.seed


def _choice(enum_cls, value: Any, key: str):
    try:
        return enum_cls(str(value).strip().lower())
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigValidationError(f"{key} must be one of {choices}, got '{value}'") from None


def _float_list(value: Any, what: str) -> np.ndarray:
    values = np.atleast_1d(np.asarray(value, dtype=float))
    if values.size == 0:
        raise InvalidArgumentError(f"{what} list is empty")
    return values


def _distances(cfg: Dict[str, Any]) -> np.ndarray:
    if cfg["dist"] is not None and cfg["dist_range"] is not None:
        raise InvalidArgumentError("give either --dist or --dist-range, not both")
    if cfg["dist"] is not None:
        return _float_list(cfg["dist"], "distance")
    if cfg["dist_range"] is None:
        raise InvalidArgumentError("a distance is required: pass --dist or --dist-range")
    start, stop, count = cfg["dist_range"]
    if count != int(count) or count < 1:
        raise InvalidArgumentError(f"distance range count must be a positive integer, got {count}")
    if not 0 < start <= stop:
        raise InvalidArgumentError(
            f"distance range must satisfy 0 < START <= STOP, got {start} and {stop}"
        )
    space = np.linspace if cfg["linear"] else np.geomspace
    return space(start, stop, int(count))


def _require_path(cfg: Dict[str, Any], key: str, flag: str) -> Path:
    if cfg[key] is None:
        raise InvalidArgumentError(f"missing input file: pass {flag}")
    return Path(cfg[key])


def _filter_link(rays: List[RayRecord], link: Optional[str]) -> List[RayRecord]:
    if link is None:
        return rays
    selected = [r for r in rays if r.link_id == str(link)]
    if not selected:
        raise InvalidArgumentError(f"no rays belong to link_id '{link}'")
    return selected


def run_eval(ctx: RunContext) -> CommandOutput:
    cfg = ctx.settings(
        {
            "model": "ci",
            "scenario": None,
            "n": None,
            "b": None,
            "f0": None,
            "alpha": None,
            "beta": None,
            "gamma": None,
            "freq": None,
            "dist": None,
            "dist_range": None,
            "linear": False,
        }
    )
    kind = _choice(PathLossModelKind, cfg["model"], "model")
    if cfg["freq"] is None:
        raise InvalidArgumentError("a frequency is required: pass --freq")
    freqs = _float_list(cfg["freq"], "frequency")
    dists = _distances(cfg)
    explicit = {k: cfg[k] for k in ("n", "b", "alpha", "beta", "gamma") if cfg[k] is not None}

    summary: Dict[str, Any] = {}
    if cfg["scenario"] is not None:
        if explicit:
            raise InvalidArgumentError(
                "give either --scenario or explicit model parameters, not both"
            )
        scenario = ScenarioId.parse(str(cfg["scenario"]))
        f0 = cfg["f0"]
        if kind is PathLossModelKind.CIF and f0 is None:
            f0 = centroid_frequency([(f, 1) for f in freqs])
            logger.info("Using the centroid of the requested frequencies, %g GHz, as f0", f0)
        model = scenario_model(scenario, kind, f0)
        summary["scenario"] = scenario.value
        summary["sf_sigma_db"] = scenario_sigma(scenario, kind)
    else:
        model = _explicit_model(kind, cfg)
    summary["model"] = model.to_dict()

    f_grid, d_grid = np.meshgrid(freqs, dists, indexing="ij")
    pl = np.asarray(evaluate_path_loss(model, f_grid.ravel(), d_grid.ravel()))
    table = pd.DataFrame({"freq_ghz": f_grid.ravel(), "dist_m": d_grid.ravel(), "pl_db": pl})
    return CommandOutput("eval", table, summary)


def _explicit_model(kind: PathLossModelKind, cfg: Dict[str, Any]):
    needed = {
        PathLossModelKind.CI: ("n",),
        PathLossModelKind.CIF: ("n", "b", "f0"),
        PathLossModelKind.ABG: ("alpha", "beta", "gamma"),
    }[kind]
    missing = [name for name in needed if cfg[name] is None]
    if missing:
        raise InvalidArgumentError(
            f"{kind.value} needs --scenario or the parameters "
            + ", ".join(f"--{name}" for name in missing)
        )
    if kind is PathLossModelKind.CI:
        return CiModel(float(cfg["n"]))
    if kind is PathLossModelKind.CIF:
        return CifModel(float(cfg["n"]), float(cfg["b"]), float(cfg["f0"]))
    return AbgModel(float(cfg["alpha"]), float(cfg["beta"]), float(cfg["gamma"]))


def run_losprob(ctx: RunContext) -> CommandOutput:
    cfg = ctx.settings(
        {
            "model": LosModel.D1D2.value,
            "environment": Environment.UMI_STREET_CANYON.value,
            "d1": None,
            "d2": None,
            "h_ut": DEFAULT_UE_HEIGHT_M,
            "dist": None,
            "dist_range": None,
            "linear": False,
        }
    )
    model = LosModel.parse(str(cfg["model"]))
    environment = Environment.parse(str(cfg["environment"]))
    if (cfg["d1"] is None) != (cfg["d2"] is None):
        raise InvalidArgumentError("give both --d1 and --d2, or neither")
    if cfg["d1"] is not None:
        params = D1D2Params(float(cfg["d1"]), float(cfg["d2"]))
    else:
        params = default_params(environment)
    dists = _distances(cfg)
    p = np.asarray(los_probability(model, dists, params, float(cfg["h_ut"])), dtype=float)
    summary: Dict[str, Any] = {"model": model.value, "h_ut_m": float(cfg["h_ut"])}
    if model is not LosModel.GPP_UMA:
        summary["params"] = params.to_dict()
    table = pd.DataFrame({"dist_m": dists, "p_los": np.broadcast_to(p, dists.shape)})
    return CommandOutput("losprob", table, summary)


def run_bpl(ctx: RunContext) -> CommandOutput:
    cfg = ctx.settings(
        {"bpl_class": "both", "freq": None, "depth": 0.0, "angle": 0.0, "o2i": {}}
    )
    if cfg["freq"] is None:
        raise InvalidArgumentError("a frequency is required: pass --freq")
    freqs = _float_list(cfg["freq"], "frequency")
    if str(cfg["bpl_class"]).strip().lower() == "both":
        classes = list(BplClass)
    else:
        classes = [_choice(BplClass, cfg["bpl_class"], "bpl_class")]
    o2i_cfg = O2iConfig.from_dict(cfg["o2i"] or {})
    ctx.resolved["o2i"] = o2i_cfg.to_dict()
    rows = []
    for cls in classes:
        base = np.asarray(bpl(cls, freqs))
        total = np.asarray(
            o2i_loss(cls, freqs, float(cfg["depth"]), float(cfg["angle"]), o2i_cfg)
        )
        for f, b, t in zip(freqs, base, total):
            rows.append(
                {
                    "freq_ghz": float(f),
                    "bpl_class": cls.value,
                    "depth_m": float(cfg["depth"]),
                    "incidence_deg": float(cfg["angle"]),
                    "bpl_db": float(b),
                    "o2i_db": float(t),
                }
            )
    return CommandOutput("bpl", pd.DataFrame(rows), {"o2i": o2i_cfg.to_dict()})


def run_fit(ctx: RunContext) -> CommandOutput:
    cfg = ctx.settings({"input": None, "model": "ci", "los_filter": LosFilter.ALL.value})
    path = _require_path(cfg, "input", "--input")
    kind = _choice(PathLossModelKind, cfg["model"], "model")
    los_filter = _choice(LosFilter, cfg["los_filter"], "los_filter")
    samples = select_samples(load_pathloss_samples(path), los_filter)
    logger.info("Fitting %s to %d samples (%s)", kind.value.upper(), len(samples), los_filter.value)
    report = fit_path_loss(samples, kind)

    pl = np.array([s.pl_db for s in samples], dtype=float)
    r = residuals(report.model, samples)
    table = pd.DataFrame(
        {
            "freq_ghz": [s.f_ghz for s in samples],
            "dist_m": [s.d_m for s in samples],
            "los": [int(s.los) for s in samples],
            "weight": [s.weight for s in samples],
            "pl_db": pl,
            "predicted_db": pl - r,
            "residual_db": r,
        }
    )
    summary = {"input": str(path), "los_filter": los_filter.value, **report.to_dict()}
    return CommandOutput("fit", table, summary)


def run_fit_los(ctx: RunContext) -> CommandOutput:
    cfg = ctx.settings(
        {
            "input": None,
            "model": LosModel.D1D2.value,
            "bin_width": DEFAULT_BIN_WIDTH_M,
            "compare": False,
            "environment": Environment.UMA.value,
        }
    )
    path = _require_path(cfg, "input", "--input")
    samples = load_los_samples(path)
    bin_width = float(cfg["bin_width"])

    if cfg["compare"]:
        environment = Environment.parse(str(cfg["environment"]))
        comparison = compare_los_models(samples, bin_width, environment)
        table = pd.DataFrame([row.to_dict() for row in comparison.rows])
        summary = {"input": str(path), **comparison.to_dict()}
        return CommandOutput("fit-los", table, summary)

    result = fit_los_probability(samples, LosModel.parse(str(cfg["model"])), bin_width)
    bins = result.bins
    model_p = los_probability(result.model, bins.centers, result.params)
    table = pd.DataFrame(
        {
            "center_m": bins.centers,
            "count": bins.counts,
            "los_count": bins.los_counts.astype(int),
            "los_fraction": bins.p_hat,
            "model_p_los": model_p,
        }
    )
    summary = {"input": str(path), **result.to_dict()}
    return CommandOutput("fit-los", table, summary)


def run_cluster(ctx: RunContext) -> CommandOutput:
    defaults = {"rays": None, "link": None}
    defaults.update({k: v for k, v in ClusteringConfig().to_dict().items() if k != "rng_seed"})
    cfg = ctx.settings(defaults)
    path = _require_path(cfg, "rays", "--rays")
    rays = _filter_link(load_rays(path), cfg["link"])
    clustering = ClusteringConfig.from_dict(
        {
            **{k: cfg[k] for k in defaults if k not in ("rays", "link")},
            "rng_seed": ctx.need_seed(),
        }
    )
    ctx.resolved["rng_seed"] = clustering.rng_seed
    result = cluster_multirestart(rays, clustering)

    labels, pruned = result.labels_in_input_order()
    table = pd.DataFrame(result.to_rows())
    summary = {
        "input": str(path),
        "clustering": result.summary(),
        "spreads": spread_report(rays, labels, pruned).to_dict(),
    }
    return CommandOutput("cluster", table, summary)


def run_stats(ctx: RunContext) -> CommandOutput:
    cfg = ctx.settings({"rays": None, "clusters": None, "link": None})
    path = _require_path(cfg, "rays", "--rays")
    rays = _filter_link(load_rays(path), cfg["link"])
    if cfg["clusters"] is not None:
        assignment = load_assignment(cfg["clusters"], len(rays))
        report = spread_report(rays, assignment.labels, assignment.pruned)
    else:
        report = spread_report(rays)
    rows = [{"group": "all", **report.overall.to_dict()}]
    for summary in report.clusters:
        row = summary.to_dict()
        rows.append({"group": f"cluster {row.pop('cluster')}", **row})
    return CommandOutput("stats", pd.DataFrame(rows), {"input": str(path), **report.to_dict()})


def run_drop_command(ctx: RunContext) -> CommandOutput:
    data = dict(ctx.file_config)
    percentiles = data.pop("percentiles", None)
    map_path = data.pop("map", None)
    if ctx.args.percentiles is not None:
        percentiles = ctx.args.percentiles
    if ctx.args.map is not None:
        map_path = ctx.args.map
    if ctx.args.ue_count is not None:
        data["ue_count"] = ctx.args.ue_count
    data["rng_seed"] = ctx.need_seed()
    cfg = DropConfig.from_dict(data)
    percentiles = list(DEFAULT_PERCENTILES if percentiles is None else percentiles)

    ctx.resolved.update(cfg.to_dict())
    ctx.resolved["percentiles"] = percentiles
    ctx.resolved["map"] = None if map_path is None else str(map_path)
    building_map = load_building_map(map_path) if map_path is not None else None
    result = run_drop(cfg, building_map)
    return CommandOutput("drop", result.links, result.summary(percentiles))


def run_catalog(ctx: RunContext) -> CommandOutput:
    cfg = ctx.settings({"los_models": False})
    summary = {
        "ray_tracing_study": RAY_TRACING_STUDY.to_dict(),
        "legacy_spread_ranges": {k: list(v) for k, v in LEGACY_SPREAD_RANGES.items()},
    }
    if cfg["los_models"]:
        table = pd.DataFrame([row.to_dict() for row in LOS_MODEL_REFERENCE])
        return CommandOutput("catalog", table, summary)
    rows = []
    for params in scenario_catalog():
        rows.append(
            {
                "scenario": params.scenario.value,
                "label": params.scenario.label,
                "ci_n": params.ci_n,
                "ci_sigma_db": params.ci_sigma,
                "abg_alpha": params.abg_alpha,
                "abg_beta_db": params.abg_beta,
                "abg_gamma": params.abg_gamma,
                "abg_sigma_db": params.abg_sigma,
                "los_d1_m": params.los_d1,
                "los_d2_m": params.los_d2,
            }
        )
    return CommandOutput("catalog", pd.DataFrame(rows), summary, json_body=catalog_to_dict())


COMMANDS: Dict[str, Callable[[RunContext], CommandOutput]] = {
    "eval": run_eval,
    "losprob": run_losprob,
    "bpl": run_bpl,
    "fit": run_fit,
    "fit-los": run_fit_los,
    "cluster": run_cluster,
    "stats": run_stats,
    "drop": run_drop_command,
    "catalog": run_catalog,
}

# Commands that draw random numbers and therefore always report a seed.
RANDOMIZED = {"cluster", "drop"}
