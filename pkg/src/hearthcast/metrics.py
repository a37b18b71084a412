"""Error metrics and gap views for model comparison.

A gap is prediction - target in kWh, so overestimation is positive. For a
gap series g of length n:

    MSD  = (1/n) * sum(g_i^2)
    RMSD = sqrt(MSD)
    MAE  = (1/n) * sum(|g_i|)
    MAD  = median(|g_i - median(g)|)

Medians of even-length series are the mean of the two central order
statistics; the same rule drives every quantile here (linear interpolation
between closest ranks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError


@dataclass(frozen=True)
class MetricsReport:
    msd: float
    rmsd: float
    mad: float
    mae: float
    n: int

    def to_dict(self) -> dict:
        return {"msd": self.msd, "rmsd": self.rmsd, "mad": self.mad, "mae": self.mae, "n": self.n}


@dataclass(frozen=True)
class PriceConfig:
    """Unit electricity price used to translate kWh gaps into euros."""

    unit_price_eur_per_kwh: float = 0.2516

    def __post_init__(self):
        if not (self.unit_price_eur_per_kwh > 0):
            raise ConfigError("unit price must be positive")


@dataclass(frozen=True)
class GapViews:
    absolute_kwh: tuple[float, ...]
    relative: tuple[float, ...]
    monetary_eur: tuple[float, ...]


@dataclass(frozen=True)
class DistributionSummary:
    n: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    deciles: tuple[float, ...]  # 10%..90%

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
            "deciles": list(self.deciles),
        }


def _as_finite_array(values: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DataError(f"{what} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{what} must contain only finite values")
    return arr


def _median(arr: np.ndarray) -> float:
    # mean of the two central order statistics for even n
    return float(np.median(arr))


def compute_metrics(gaps: Sequence[float]) -> MetricsReport:
    """All comparison metrics for one gap series."""
    g = _as_finite_array(gaps, "gap series")
    msd = float(np.mean(g * g))
    med = _median(g)
    return MetricsReport(
        msd=msd,
        rmsd=math.sqrt(msd),
        mad=_median(np.abs(g - med)),
        mae=float(np.mean(np.abs(g))),
        n=int(g.size),
    )


def rmsd_delta(rmsd_filtered: float, rmsd_baseline: float) -> float:
    """Percentage change of a filtered-training RMSD against its baseline."""
    if rmsd_baseline <= 0:
        raise DataError("baseline RMSD must be positive")
    return 100.0 * (rmsd_filtered - rmsd_baseline) / rmsd_baseline


def gaps_from(targets: Sequence[float], predictions: Sequence[float]) -> list[float]:
    """Gap series prediction - target, validating matched lengths."""
    t = _as_finite_array(targets, "targets")
    p = _as_finite_array(predictions, "predictions")
    if t.size != p.size:
        raise DataError(f"length mismatch: {t.size} targets vs {p.size} predictions")
    return list(p - t)


def gap_views(
    targets: Sequence[float],
    predictions: Sequence[float],
    price: PriceConfig = PriceConfig(),
) -> GapViews:
    """Gaps in kWh, as a fraction of the target, and in euros."""
    t = _as_finite_array(targets, "targets")
    p = _as_finite_array(predictions, "predictions")
    if t.size != p.size:
        raise DataError(f"length mismatch: {t.size} targets vs {p.size} predictions")
    if np.any(t <= 0):
        raise DataError("relative gaps require all targets > 0")
    absolute = p - t
    return GapViews(
        absolute_kwh=tuple(float(x) for x in absolute),
        relative=tuple(float(x) for x in absolute / t),
        monetary_eur=tuple(float(x) for x in absolute * price.unit_price_eur_per_kwh),
    )


def distribution_summary(values: Sequence[float]) -> DistributionSummary:
    """Order-statistic summary backing box plots and histograms."""
    arr = _as_finite_array(values, "values")
    q = np.quantile(arr, [0.25, 0.5, 0.75], method="linear")
    deciles = np.quantile(arr, [i / 10 for i in range(1, 10)], method="linear")
    return DistributionSummary(
        n=int(arr.size),
        minimum=float(arr.min()),
        q1=float(q[0]),
        median=float(q[1]),
        q3=float(q[2]),
        maximum=float(arr.max()),
        deciles=tuple(float(d) for d in deciles),
    )
