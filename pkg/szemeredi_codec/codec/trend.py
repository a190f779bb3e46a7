"""Empirical unweighting rule: the optimal threshold as a smooth function of density."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
import statsmodels.api as sm
from numpy.typing import ArrayLike
from seaborn._stats.base import Stat

from .errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def _lowess(x, y, xvals, frac: float, delta: float, it: int) -> np.ndarray:
    result = sm.nonparametric.lowess(
        endog=y, exog=x, frac=frac, delta=delta, it=it, xvals=xvals
    )
    if result.ndim > 1:
        result = result[:, 1]
    return np.clip(result, 0.0, 1.0)


@dataclass
class ThresholdTrend(Stat):
    """
    LOWESS trend of the optimal threshold ``t*`` against graph density.

    Like any smoother in ``seaborn.objects`` it is used as
    ``so.Plot(results, x="density", y="threshold").add(so.Line(), ThresholdTrend())``.
    Thresholds live in ``[0, 1]`` so the curve and its band are clipped there.

    Parameters
    ----------
    frac : float, 0.5
        The fraction of data used when estimating each y-value.
    gridsize : int, 100
        Number of evaluation points between the smallest and largest density.
    delta : float, 0.0
        Distance within which to use linear-interpolation instead of weighted regression.
    it : int, 0
        Robustifying iterations of the LOWESS fit.
    num_bootstrap : int, optional
        Bootstrap resamples for a ``ymin``/``ymax`` band.
    alpha : float, 0.05
        Significance level of the band.
    seed : int, optional
        Seed of the bootstrap resampling.

    Returns
    -------
    DataFrame
        Columns "x", "y" (smoothed) and, if bootstrapped, "ymin"/"ymax".
    """

    frac: float = 0.5
    gridsize: int = 100
    delta: float = 0.0
    it: int = 0
    num_bootstrap: Optional[int] = None
    alpha: float = 0.05
    seed: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.frac, float) or not (0 < self.frac <= 1):
            raise InvalidArgumentError("frac must be a float between 0 and 1.")
        if not isinstance(self.gridsize, int) or self.gridsize <= 0:
            raise InvalidArgumentError("gridsize must be a positive integer.")
        if self.num_bootstrap is not None and (
            not isinstance(self.num_bootstrap, int) or self.num_bootstrap <= 0
        ):
            raise InvalidArgumentError("num_bootstrap must be a positive integer or None.")
        if not isinstance(self.alpha, float) or not (0 < self.alpha < 1):
            raise InvalidArgumentError("alpha must be a float between 0 and 1.")
        if not isinstance(self.it, int) or self.it < 0:
            raise InvalidArgumentError("it must be a non-negative integer.")
        if not isinstance(self.delta, float) or self.delta < 0:
            raise InvalidArgumentError("delta must be a non-negative float.")
        if self.num_bootstrap is None and not self.alpha == 0.05:
            self.num_bootstrap = 200

    def _grid(self, data: pd.DataFrame) -> np.ndarray:
        return np.linspace(data["x"].min(), data["x"].max(), self.gridsize)

    def _fit_predict(self, data: pd.DataFrame) -> pd.DataFrame:
        xx = self._grid(data)
        yy = _lowess(data["x"], data["y"], xx, self.frac, self.delta, self.it)
        return pd.DataFrame(dict(x=xx, y=yy))

    def _bootstrap(self, data: pd.DataFrame) -> pd.DataFrame:
        xx = self._grid(data)
        rng = np.random.default_rng(self.seed)
        estimates = np.empty((self.num_bootstrap, xx.size))
        for i in range(self.num_bootstrap):
            sample = data.sample(frac=1, replace=True, random_state=rng)
            estimates[i] = _lowess(
                sample["x"], sample["y"], xx, self.frac, self.delta, self.it
            )
        return pd.DataFrame(
            {
                "ymin": np.nanpercentile(estimates, self.alpha / 2 * 100, axis=0),
                "ymax": np.nanpercentile(estimates, (1 - self.alpha / 2) * 100, axis=0),
            }
        )

    def __call__(self, data: pd.DataFrame, groupby, orient, scales) -> pd.DataFrame:
        if orient == "x":
            xvar, yvar = data.columns[0], data.columns[1]
        else:
            xvar, yvar = data.columns[1], data.columns[0]
        df = data.rename(columns={xvar: "x", yvar: "y"}).dropna(subset=["x", "y"])

        distinct = np.unique(df["x"]).size
        if self.frac < 2 / distinct:
            raise InvalidArgumentError(
                f"`frac={self.frac:.3f}` is too small for only {distinct} distinct densities; "
                f"use `frac` >= {2 / distinct:.3f}."
            )

        grouping_vars = [str(v) for v in data if v in groupby.order]
        if not grouping_vars:
            smoothed = self._fit_predict(df)
        else:
            smoothed = groupby.apply(df, self._fit_predict)

        if not self.num_bootstrap:
            return smoothed
        if not grouping_vars:
            band = self._bootstrap(df)
        else:
            band = groupby.apply(df, self._bootstrap)
        return smoothed.join(band[["ymin", "ymax"]])


@dataclass
class ThresholdRule:
    """
    Predict an unweighting threshold from density alone.

    Fitted on experiment rows (``density`` and ``threshold`` columns), it
    lets graphs without a ground truth be binarized.
    """

    frac: float = 0.5
    gridsize: int = 100
    densities: np.ndarray = field(default_factory=lambda: np.empty(0))
    thresholds: np.ndarray = field(default_factory=lambda: np.empty(0))

    def fit(self, results: pd.DataFrame) -> "ThresholdRule":
        missing = {"density", "threshold"} - set(results.columns)
        if missing:
            raise InvalidArgumentError(f"results lack column(s) {sorted(missing)}.")
        data = results[["density", "threshold"]].dropna()
        if data.empty:
            raise InvalidArgumentError("no run with both density and threshold to fit.")
        x, y = data["density"].to_numpy(), data["threshold"].to_numpy()
        if np.unique(x).size < 3:
            self.densities = np.array([x.mean()])
            self.thresholds = np.array([float(np.clip(y.mean(), 0.0, 1.0))])
        else:
            self.densities = np.linspace(x.min(), x.max(), self.gridsize)
            self.thresholds = _lowess(x, y, self.densities, self.frac, 0.0, 0)
            if not np.isfinite(self.thresholds).all():
                logger.warning(
                    "LOWESS fit undefined on %d runs with frac=%.2f; using the mean threshold",
                    len(data),
                    self.frac,
                )
                self.densities = np.array([x.mean()])
                self.thresholds = np.array([float(np.clip(y.mean(), 0.0, 1.0))])
        logger.info(
            "threshold rule fitted on %d runs over densities %.3f..%.3f",
            len(data),
            x.min(),
            x.max(),
        )
        return self

    def rule(self, density: float | ArrayLike) -> float | np.ndarray:
        if self.densities.size == 0:
            raise InvalidArgumentError("the rule must be fitted first.")
        predicted = np.clip(np.interp(density, self.densities, self.thresholds), 0.0, 1.0)
        return float(predicted) if np.ndim(predicted) == 0 else predicted


__all__ = ["ThresholdTrend", "ThresholdRule"]
