"""Fitting (d1, d2) of the LOS-probability models to binned LOS observations.

Samples are binned by 2D distance (``floor(d / bin_width)``) and each bin's
empirical LOS fraction is compared with the model at the bin center. The
mean squared error over bins is minimized by exhaustive search over the
integer grid d1 = 1..100 m, d2 = 1..300 m; ties go to the smaller d1, then
the smaller d2.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from chanmodel.error_handling.error_manager import get_error_manager
from chanmodel.error_handling.errors import InvalidArgumentError
from chanmodel.model.scenario_model import Environment
from chanmodel.model.units import check_distance
from chanmodel.propagation.los import D1D2Params, LosModel, d1d2_curve, default_params

logger = logging.getLogger(__name__)

DEFAULT_BIN_WIDTH_M = 10.0
D1_GRID_M = np.arange(1.0, 101.0)
D2_GRID_M = np.arange(1.0, 301.0)

COMPARISON_LABELS = {
    "3gpp": "3GPP",
    LosModel.D1D2: "d1/d2",
    LosModel.NYU_SQUARED: "NYU (squared)",
}


@dataclass(frozen=True)
class LosSample:
    """One LOS/NLOS observation at a 2D distance."""

    d_m: float
    los: bool

    def __post_init__(self):
        if not (np.isfinite(self.d_m) and self.d_m > 0):
            raise InvalidArgumentError(f"distance must be positive, got {self.d_m} m")


@dataclass(frozen=True, eq=False)
class LosBins:
    """Distance-binned empirical LOS probability."""

    bin_width: float
    centers: np.ndarray
    counts: np.ndarray
    los_counts: np.ndarray

    @property
    def p_hat(self) -> np.ndarray:
        return self.los_counts / self.counts

    def __len__(self) -> int:
        return len(self.centers)

    def to_dict(self) -> dict:
        return {
            "bin_width_m": self.bin_width,
            "bins": [
                {"center_m": float(c), "count": int(n), "los_fraction": float(p)}
                for c, n, p in zip(self.centers, self.counts, self.p_hat)
            ],
        }


def bin_los_observations(
    d_m: np.ndarray, los: np.ndarray, bin_width: float = DEFAULT_BIN_WIDTH_M
) -> LosBins:
    """Bin distances and LOS flags; only non-empty bins are kept."""
    if not bin_width > 0:
        raise InvalidArgumentError(f"bin width must be positive, got {bin_width} m")
    d = check_distance(d_m)
    flags = np.asarray(los, dtype=bool)
    index = np.floor(d / bin_width).astype(np.int64)
    keys, inverse = np.unique(index, return_inverse=True)
    counts = np.bincount(inverse, minlength=keys.size)
    los_counts = np.bincount(inverse, weights=flags.astype(float), minlength=keys.size)
    return LosBins(
        bin_width=float(bin_width),
        centers=(keys + 0.5) * bin_width,
        counts=counts,
        los_counts=los_counts,
    )


def bin_los_samples(samples: Sequence[LosSample], bin_width: float) -> LosBins:
    d = np.array([s.d_m for s in samples], dtype=float)
    los = np.array([s.los for s in samples], dtype=bool)
    return bin_los_observations(d, los, bin_width)


def _model_curve(model: LosModel, d1, d2, centers: np.ndarray) -> np.ndarray:
    p = d1d2_curve(d1, d2, centers)
    return p * p if model is LosModel.NYU_SQUARED else p


def binned_mse(model: LosModel, params: D1D2Params, bins: LosBins) -> float:
    """Mean squared error between a model curve and the binned LOS fractions."""
    p = _model_curve(model, params.d1, params.d2, bins.centers)
    return float(np.mean((p - bins.p_hat) ** 2))


@dataclass(frozen=True)
class LosFitResult:
    """Fitted (d1, d2) with the binning it was computed on."""

    model: LosModel
    params: D1D2Params
    mse: float
    bins: LosBins
    sample_count: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            **self.params.to_dict(),
            "mse": self.mse,
            "sample_count": self.sample_count,
            "degenerate": self.degenerate,
            "binning": self.bins.to_dict(),
        }


def _grid_search(model: LosModel, bins: LosBins) -> Tuple[float, float, float]:
    # One (d2, bins) slab per d1 row keeps memory flat for fine binnings.
    mse = np.empty((D1_GRID_M.size, D2_GRID_M.size))
    target = bins.p_hat[None, :]
    for row, d1 in enumerate(D1_GRID_M):
        curve = _model_curve(model, d1, D2_GRID_M[:, None], bins.centers[None, :])
        mse[row] = np.mean((curve - target) ** 2, axis=1)
    # argmin on the C-ordered grid returns the smallest d1, then the smallest d2.
    i, j = np.unravel_index(np.argmin(mse), mse.shape)
    return float(D1_GRID_M[i]), float(D2_GRID_M[j]), float(mse[i, j])


def _all_los_d1(bins: LosBins) -> float:
    # The d1 grid is extended in whole meters until it covers the farthest bin center.
    return float(max(D1_GRID_M[-1], np.ceil(bins.centers[-1])))


def fit_los_probability(
    samples: Sequence[LosSample],
    model: LosModel = LosModel.D1D2,
    bin_width: float = DEFAULT_BIN_WIDTH_M,
) -> LosFitResult:
    """Grid-search (d1, d2) minimizing the binned MSE.

    Data with every sample LOS is flagged degenerate: any d1 at or beyond the
    farthest bin center fits with zero error, so d1 is the grid maximum, or
    the farthest bin center rounded up to a whole meter when that lies beyond
    the grid, and d2 is the grid minimum. Data with no LOS sample is flagged
    too; the search then settles on the grid minimum.
    """
    if model is LosModel.GPP_UMA:
        raise InvalidArgumentError("the 3GPP UMa model has fixed parameters and cannot be fitted")
    bins = bin_los_samples(samples, bin_width)
    if len(bins) < 2:
        raise InvalidArgumentError(
            f"LOS fitting needs at least 2 non-empty distance bins, got {len(bins)}"
        )
    logger.info(
        "Fitting %s LOS model to %d samples in %d bins of %g m",
        model.value,
        len(samples),
        len(bins),
        bin_width,
    )

    degenerate = False
    if np.all(bins.los_counts == bins.counts):
        d1, d2 = _all_los_d1(bins), float(D2_GRID_M[0])
        mse = binned_mse(model, D1D2Params(d1, d2), bins)
        degenerate = True
        get_error_manager().warn(
            "all samples are LOS; d1 is set to the grid edge covering the farthest bin",
            source="los_fit",
            d1_m=d1,
        )
    else:
        d1, d2, mse = _grid_search(model, bins)
        if not np.any(bins.los_counts):
            degenerate = True
            get_error_manager().warn(
                "no LOS samples; fitted (d1, d2) sit at the grid minimum", source="los_fit"
            )
    logger.debug("LOS grid optimum d1=%g d2=%g mse=%.6g", d1, d2, mse)
    return LosFitResult(
        model=model,
        params=D1D2Params(d1, d2),
        mse=mse,
        bins=bins,
        sample_count=len(samples),
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class LosComparisonRow:
    label: str
    d1: float
    d2: float
    mse: float

    def to_dict(self) -> dict:
        return {"model": self.label, "d1_m": self.d1, "d2_m": self.d2, "mse": self.mse}


@dataclass(frozen=True)
class LosComparison:
    """Three-row model comparison: 3GPP defaults, fitted d1/d2, fitted NYU squared."""

    environment: Environment
    rows: List[LosComparisonRow] = field(default_factory=list)
    bins: Optional[LosBins] = None

    def row(self, label: str) -> LosComparisonRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "environment": self.environment.value,
            "rows": [r.to_dict() for r in self.rows],
            "binning": self.bins.to_dict() if self.bins is not None else None,
        }


def compare_los_models(
    samples: Sequence[LosSample],
    bin_width: float = DEFAULT_BIN_WIDTH_M,
    environment: Environment = Environment.UMA,
) -> LosComparison:
    """Fit both free models and score the environment's 3GPP defaults on the same bins."""
    d1d2 = fit_los_probability(samples, LosModel.D1D2, bin_width)
    nyu = fit_los_probability(samples, LosModel.NYU_SQUARED, bin_width)
    reference = default_params(environment)
    rows = [
        LosComparisonRow(
            COMPARISON_LABELS["3gpp"],
            reference.d1,
            reference.d2,
            binned_mse(LosModel.D1D2, reference, d1d2.bins),
        ),
        LosComparisonRow(COMPARISON_LABELS[LosModel.D1D2], d1d2.params.d1, d1d2.params.d2, d1d2.mse),
        LosComparisonRow(
            COMPARISON_LABELS[LosModel.NYU_SQUARED], nyu.params.d1, nyu.params.d2, nyu.mse
        ),
    ]
    return LosComparison(environment=environment, rows=rows, bins=d1d2.bins)
