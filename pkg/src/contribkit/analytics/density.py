"""Gaussian KDE curves and violin-plot statistics for similarity distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import NoValuesError

GRID_POINTS = 200
MIN_BANDWIDTH = 1e-3


def silverman_bandwidth(values: Sequence[float]) -> float:
    """``0.9 * min(std, IQR / 1.34) * n ** -0.2`` with a floor of 1e-3.

    When one spread measure is zero (e.g. more than half the sample is tied)
    the other one is used alone.
    """
    x = np.asarray(values, dtype=np.float64)
    n = len(x)
    if n == 0:
        raise NoValuesError("no values")
    if n == 1:
        return MIN_BANDWIDTH
    std = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    iqr = float(q75 - q25) / 1.34
    spreads = [s for s in (std, iqr) if s > 0]
    a = min(spreads) if spreads else 0.0
    return max(0.9 * a * n ** -0.2, MIN_BANDWIDTH)


@dataclass
class DistributionData:
    series_name: str
    sample_values: list[float]
    bandwidth: float
    kde_x: list[float] = field(default_factory=list)
    kde_density: list[float] = field(default_factory=list)
    q1: float = 0.0
    median: float = 0.0
    q3: float = 0.0
    min: float = 0.0
    max: float = 0.0

    @property
    def kde_curve(self) -> list[tuple[float, float]]:
        return list(zip(self.kde_x, self.kde_density))


def gaussian_kde(values: Sequence[float], grid: np.ndarray, bandwidth: float) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64)
    z = (grid[:, None] - x[None, :]) / bandwidth
    return np.exp(-0.5 * z * z).sum(axis=1) / (len(x) * bandwidth * math.sqrt(2.0 * math.pi))


def kde(values: Sequence[float], bandwidth: float | None = None, series_name: str = "", points: int = GRID_POINTS) -> DistributionData:
    """Density on ``points`` evenly spaced positions over [min - 3h, max + 3h], plus quartiles."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise NoValuesError(f"{series_name or 'series'}: no values")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    lo, hi = float(x.min()), float(x.max())
    grid = np.linspace(lo - 3 * h, hi + 3 * h, points)
    dens = gaussian_kde(x, grid, h)
    q1, med, q3 = (float(v) for v in np.percentile(x, [25, 50, 75]))
    return DistributionData(
        series_name=series_name,
        sample_values=[float(v) for v in x],
        bandwidth=h,
        kde_x=[float(v) for v in grid],
        kde_density=[float(v) for v in dens],
        q1=q1,
        median=med,
        q3=q3,
        min=lo,
        max=hi,
    )
