"""Scalar time-series container, delay embedding, and autocorrelation tools.

The estimators in this package all start from the same two objects: a
:class:`TimeSeries` holding a uniformly sampled scalar signal, and the
:class:`DelayVectors` produced by :func:`delay_embed`. Delay vectors are
built the usual way: point ``k`` of an ``(m, t)`` embedding is

    (x[k], x[k + t], ..., x[k + (m - 1) t])

which leaves ``N - (m - 1) t`` points from ``N`` samples.

The autocorrelation here is the biased estimator (normalised by ``N``,
not ``N - k``), which keeps the sequence positive semi-definite and the
values inside ``[-1, 1]``. Its first non-positive lag doubles as the
temporal exclusion window handed to the neighbour searches downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateSeriesError, ShortSeriesError

__all__ = [
    "TimeSeries",
    "EmbeddingParams",
    "DelayVectors",
    "LagResult",
    "delay_embed",
    "autocorrelation",
    "theiler_window",
]


def _as_samples(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ConfigError(f"samples must be one-dimensional, got shape {arr.shape}")
    if arr.size < 2:
        raise ShortSeriesError(f"a time series needs at least 2 samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateSeriesError("samples contain NaN or infinite values")
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled scalar signal.

    Parameters
    ----------
    samples : array_like
        One-dimensional sequence of finite values. Stored as float64
        regardless of the input container width.
    sample_rate_hz : float
        Sampling rate in Hz, strictly positive.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        arr = _as_samples(self.samples)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        rate = float(self.sample_rate_hz)
        if not (np.isfinite(rate) and rate > 0):
            raise ConfigError(f"sample_rate_hz must be positive and finite, got {rate!r}")
        object.__setattr__(self, "sample_rate_hz", rate)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        """Signal duration in seconds."""
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class EmbeddingParams:
    """Delay-embedding parameters: dimension, lag, and temporal exclusion.

    ``theiler_w`` is carried along for the neighbour-based estimators;
    it does not change the embedding itself.
    """

    dimension_m: int
    lag_t: int
    theiler_w: int = 0

    def __post_init__(self):
        if int(self.dimension_m) != self.dimension_m or self.dimension_m < 1:
            raise ConfigError(f"dimension_m must be an integer >= 1, got {self.dimension_m!r}")
        if int(self.lag_t) != self.lag_t or self.lag_t < 1:
            raise ConfigError(f"lag_t must be an integer >= 1, got {self.lag_t!r}")
        if int(self.theiler_w) != self.theiler_w or self.theiler_w < 0:
            raise ConfigError(f"theiler_w must be an integer >= 0, got {self.theiler_w!r}")
        object.__setattr__(self, "dimension_m", int(self.dimension_m))
        object.__setattr__(self, "lag_t", int(self.lag_t))
        object.__setattr__(self, "theiler_w", int(self.theiler_w))


@dataclass(frozen=True)
class DelayVectors:
    """Points of a delay embedding, row ``k`` starting at sample ``k``.

    ``points`` has shape ``(n_points, dimension_m)`` and
    ``origin_index[k]`` is the sample index the row starts at (always
    ``k`` for vectors built by :func:`delay_embed`).
    """

    points: np.ndarray
    params: EmbeddingParams
    origin_index: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.params.dimension_m:
            raise ConfigError(
                f"points must have shape (n, {self.params.dimension_m}), got {pts.shape}"
            )
        origin = np.asarray(self.origin_index, dtype=np.intp)
        if origin.shape != (pts.shape[0],):
            raise ConfigError("origin_index must have one entry per point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "origin_index", origin)

    def __len__(self) -> int:
        return int(self.points.shape[0])


def delay_embed(series: TimeSeries, params: EmbeddingParams) -> DelayVectors:
    """Embed a scalar series into delay vectors.

    Raises
    ------
    ShortSeriesError
        If fewer than one point would result, i.e. the series has fewer
        than ``(m - 1) t + 1`` samples.
    """
    x = series.samples
    m, t = params.dimension_m, params.lag_t
    n_points = x.size - (m - 1) * t
    if n_points < 1:
        raise ShortSeriesError(
            f"embedding with m={m}, t={t} needs at least {(m - 1) * t + 1} samples, got {x.size}"
        )
    idx = np.arange(n_points)[:, None] + np.arange(m)[None, :] * t
    return DelayVectors(points=x[idx], params=params, origin_index=np.arange(n_points))


def autocorrelation(series: TimeSeries, max_lag: int) -> np.ndarray:
    """Normalised autocorrelation at lags ``0..max_lag``.

    Uses the biased estimator: the lag-k covariance is divided by ``N``,
    then the whole sequence is normalised by the lag-0 value. The result
    is 1 at lag 0 and stays within ``[-1, 1]``.

    Raises
    ------
    DegenerateSeriesError
        If the series has zero variance.
    ConfigError
        If ``max_lag`` is negative or not below the series length.
    """
    x = series.samples
    n = x.size
    if int(max_lag) != max_lag or not 0 <= max_lag < n:
        raise ConfigError(f"max_lag must be an integer in [0, {n - 1}], got {max_lag!r}")
    max_lag = int(max_lag)
    xc = x - x.mean()
    c0 = float(np.dot(xc, xc)) / n
    if c0 == 0.0:
        raise DegenerateSeriesError("autocorrelation of a zero-variance series is undefined")
    acf = np.empty(max_lag + 1, dtype=np.float64)
    acf[0] = 1.0
    for k in range(1, max_lag + 1):
        acf[k] = float(np.dot(xc[:-k], xc[k:])) / n / c0
    return acf


class LagResult(NamedTuple):
    """An integer lag plus a flag marking that the scan hit its cap."""

    lag: int
    saturated: bool


def theiler_window(series: TimeSeries, max_lag: int) -> LagResult:
    """Temporal exclusion window: the first lag with autocorrelation <= 0.

    Scans lags ``1..max_lag``; if the autocorrelation never crosses zero
    the window is capped at ``max_lag`` and the result is flagged as
    saturated.
    """
    if max_lag < 1:
        raise ConfigError(f"max_lag must be >= 1, got {max_lag!r}")
    acf = autocorrelation(series, max_lag)
    nonpos = np.nonzero(acf[1:] <= 0.0)[0]
    if nonpos.size:
        return LagResult(int(nonpos[0]) + 1, False)
    return LagResult(int(max_lag), True)
