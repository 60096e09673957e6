"""Least-squares fitting of the CI, CIF and ABG path-loss models.

All fitters minimize the weighted sum of squared residuals
``pl_i - model(f_i, d_i)``; a sample weight of 2 is the same as listing the
sample twice. ``sf_sigma`` is the weighted RMS of the residuals, i.e. the
standard deviation of the zero-mean shadow-fading term the fit assumes.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from chanmodel.error_handling.error_manager import get_error_manager
from chanmodel.error_handling.errors import InvalidArgumentError, SingularFitError
from chanmodel.model.units import CLOSE_IN_REFERENCE_M, check_distance, check_frequency
from chanmodel.propagation.pathloss import (
    AbgModel,
    CifModel,
    CiModel,
    PathLossModel,
    PathLossModelKind,
    centroid_frequency,
    evaluate_path_loss,
    fspl_1m,
)

logger = logging.getLogger(__name__)


class LosFilter(Enum):
    """Which samples a fit uses."""

    LOS = "los"
    NLOS = "nlos"
    ALL = "all"


@dataclass(frozen=True)
class PathLossSample:
    """One measured or ray-traced path-loss observation."""

    f_ghz: float
    d_m: float
    pl_db: float
    los: bool
    weight: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.pl_db):
            raise InvalidArgumentError(f"path loss must be finite, got {self.pl_db}")
        if not self.weight > 0:
            raise InvalidArgumentError(f"sample weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class FitReport:
    """Result of one fit."""

    kind: PathLossModelKind
    model: PathLossModel
    sf_sigma: float
    residual_mean: float
    sample_count: int
    total_weight: float
    fallback: Optional[str] = None

    @property
    def mse(self) -> float:
        return self.sf_sigma**2

    @property
    def rmse(self) -> float:
        return self.sf_sigma

    def to_dict(self) -> dict:
        result = {
            "model": self.kind.value,
            "parameters": {k: v for k, v in self.model.to_dict().items() if k != "model"},
            "sf_sigma_db": self.sf_sigma,
            "residual_mean_db": self.residual_mean,
            "mse_db2": self.mse,
            "sample_count": self.sample_count,
            "total_weight": self.total_weight,
        }
        if self.fallback:
            result["fallback"] = self.fallback
        return result


def select_samples(
    samples: Sequence[PathLossSample], los_filter: LosFilter = LosFilter.ALL
) -> List[PathLossSample]:
    """Keep the samples of one LOS state (or all of them)."""
    if los_filter is LosFilter.ALL:
        return list(samples)
    want = los_filter is LosFilter.LOS
    return [s for s in samples if s.los == want]


def _columns(
    samples: Sequence[PathLossSample], minimum_count: int, anchored: bool
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    if len(samples) < minimum_count:
        raise InvalidArgumentError(
            f"fitting needs at least {minimum_count} samples, got {len(samples)}"
        )
    f = check_frequency([s.f_ghz for s in samples])
    d = check_distance(
        [s.d_m for s in samples], CLOSE_IN_REFERENCE_M if anchored else 0.0
    )
    pl = np.array([s.pl_db for s in samples], dtype=float)
    w = np.array([s.weight for s in samples], dtype=float)
    return f, d, pl, w


def _report(
    kind: PathLossModelKind,
    model: PathLossModel,
    samples: Sequence[PathLossSample],
    fallback: Optional[str] = None,
) -> FitReport:
    f = np.array([s.f_ghz for s in samples], dtype=float)
    d = np.array([s.d_m for s in samples], dtype=float)
    pl = np.array([s.pl_db for s in samples], dtype=float)
    w = np.array([s.weight for s in samples], dtype=float)
    r = pl - np.asarray(evaluate_path_loss(model, f, d))
    total = float(w.sum())
    report = FitReport(
        kind=kind,
        model=model,
        sf_sigma=float(np.sqrt(np.dot(w, r * r) / total)),
        residual_mean=float(np.dot(w, r) / total),
        sample_count=len(samples),
        total_weight=total,
        fallback=fallback,
    )
    logger.debug("%s fit: %s, sigma %.4f dB", kind.value.upper(), model, report.sf_sigma)
    return report


def residuals(model: PathLossModel, samples: Sequence[PathLossSample]) -> np.ndarray:
    """Measured minus predicted path loss, per sample."""
    f = np.array([s.f_ghz for s in samples], dtype=float)
    d = np.array([s.d_m for s in samples], dtype=float)
    pl = np.array([s.pl_db for s in samples], dtype=float)
    return pl - np.asarray(evaluate_path_loss(model, f, d))


def _ci_exponent(f, d, pl, w) -> float:
    a = pl - np.asarray(fspl_1m(f))
    b = 10.0 * np.log10(d)
    denominator = float(np.dot(w, b * b))
    if denominator == 0.0:
        raise SingularFitError("PLE is unidentifiable: every sample sits at the 1 m anchor")
    n = float(np.dot(w, a * b)) / denominator
    if not n > 0:
        raise SingularFitError(f"fitted PLE {n:.6g} is not positive; check the input data")
    return n


def fit_ci(samples: Sequence[PathLossSample]) -> FitReport:
    """Closed-form CI fit ``n = sum(w a b) / sum(w b^2)``."""
    logger.info("Fitting CI model to %d samples", len(samples))
    f, d, pl, w = _columns(samples, 2, anchored=True)
    return _report(PathLossModelKind.CI, CiModel(_ci_exponent(f, d, pl, w)), samples)


def sample_centroid_frequency(samples: Sequence[PathLossSample]) -> float:
    """Centroid frequency with each frequency counted by its summed sample weight."""
    totals = {}
    for s in samples:
        totals[s.f_ghz] = totals.get(s.f_ghz, 0.0) + s.weight
    return centroid_frequency(sorted(totals.items()))


def fit_cif(samples: Sequence[PathLossSample]) -> FitReport:
    """Joint (n, b) fit with f0 fixed at the sample centroid frequency.

    With a single frequency, b is unidentifiable; the result is the CI fit
    expressed as a CIF model with ``b = 0``.
    """
    logger.info("Fitting CIF model to %d samples", len(samples))
    f, d, pl, w = _columns(samples, 2, anchored=True)
    f0 = sample_centroid_frequency(samples)

    if np.unique(f).size < 2:
        get_error_manager().warn(
            "CIF fit on single-frequency data reverts to the CI model (b = 0)",
            source="fitting",
            frequency_ghz=float(f[0]),
        )
        model = CifModel(_ci_exponent(f, d, pl, w), 0.0, f0)
        return _report(PathLossModelKind.CIF, model, samples, fallback="ci")

    a = pl - np.asarray(fspl_1m(f))
    x1 = 10.0 * np.log10(d)
    x2 = x1 * (f - f0) / f0
    normal = np.array(
        [
            [np.dot(w, x1 * x1), np.dot(w, x1 * x2)],
            [np.dot(w, x1 * x2), np.dot(w, x2 * x2)],
        ]
    )
    rhs = np.array([np.dot(w, a * x1), np.dot(w, a * x2)])
    try:
        c1, c2 = np.linalg.solve(normal, rhs)
    except np.linalg.LinAlgError as e:
        if not np.any(x1):
            raise SingularFitError(
                "PLE is unidentifiable: every sample sits at the 1 m anchor"
            ) from e
        raise SingularFitError("CIF normal equations are singular") from e
    if not c1 > 0:
        raise SingularFitError(f"fitted PLE {c1:.6g} is not positive; check the input data")
    return _report(PathLossModelKind.CIF, CifModel(float(c1), float(c2 / c1), f0), samples)


def fit_abg(samples: Sequence[PathLossSample]) -> FitReport:
    """Weighted least squares on the regressors ``(10 log10 d, 1, 10 log10 f)``."""
    logger.info("Fitting ABG model to %d samples", len(samples))
    f, d, pl, w = _columns(samples, 3, anchored=False)
    if np.unique(d).size < 2:
        raise SingularFitError("alpha is unidentifiable: samples span a single distance")
    if np.unique(f).size < 2:
        raise SingularFitError("gamma is unidentifiable: samples span a single frequency")

    design = np.column_stack([10.0 * np.log10(d), np.ones_like(d), 10.0 * np.log10(f)])
    root_w = np.sqrt(w)
    coef, _, rank, _ = np.linalg.lstsq(design * root_w[:, None], pl * root_w, rcond=None)
    if rank < 3:
        raise SingularFitError(
            "alpha and gamma are not separable: log-distance and log-frequency are collinear"
        )
    alpha, beta, gamma = (float(c) for c in coef)
    return _report(PathLossModelKind.ABG, AbgModel(alpha, beta, gamma), samples)


_FITTERS = {
    PathLossModelKind.CI: fit_ci,
    PathLossModelKind.CIF: fit_cif,
    PathLossModelKind.ABG: fit_abg,
}


def fit_path_loss(samples: Sequence[PathLossSample], kind: PathLossModelKind) -> FitReport:
    """Dispatch to the fitter of a model family."""
    return _FITTERS[kind](samples)
