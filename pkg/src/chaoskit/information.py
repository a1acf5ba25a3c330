"""Histogram entropies, mutual information, and delay selection.

All quantities are plug-in estimates over equal-width histograms and are
reported in bits (log base 2). One binning rule is used everywhere: the
range ``[min, max]`` of each sequence is split into ``bins`` equal
cells, the top edge is inclusive, and a constant sequence gets a single
synthetic cell around its value. Marginals are always derived from the
joint histogram, so the two textbook routes to mutual information

    I = H(X) + H(Y) - H(X, Y)
    I = sum_ij p_ij log2( p_ij / (p_i q_j) )

agree to rounding on identical data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .series import LagResult, TimeSeries

__all__ = [
    "DiscreteDistribution",
    "JointDistribution",
    "equal_width_edges",
    "bin_indices",
    "marginal_distribution",
    "joint_distribution",
    "entropy",
    "mutual_information",
    "mi_from_joint",
    "auto_mutual_information",
    "first_local_minimum",
    "select_lag_first_minimum",
]

_PROB_TOL = 1e-9


def _check_probabilities(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0):
        raise ConfigError("probabilities must be non-negative")
    if abs(float(p.sum()) - 1.0) > _PROB_TOL:
        raise ConfigError(f"probabilities must sum to 1, got {float(p.sum())!r}")
    return p


@dataclass(frozen=True)
class DiscreteDistribution:
    """Histogram probabilities over equal-width cells."""

    probabilities: np.ndarray
    bin_edges: np.ndarray

    def __post_init__(self):
        p = _check_probabilities(self.probabilities)
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        if p.ndim != 1 or edges.ndim != 1 or edges.size != p.size + 1:
            raise ConfigError("need one-dimensional probabilities with len(edges) == len(p) + 1")
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "bin_edges", edges)


@dataclass(frozen=True)
class JointDistribution:
    """Two-dimensional histogram probabilities; rows index x, columns y."""

    probabilities: np.ndarray
    x_edges: np.ndarray
    y_edges: np.ndarray

    def __post_init__(self):
        p = _check_probabilities(self.probabilities)
        if p.ndim != 2:
            raise ConfigError("joint probabilities must be a 2-d array")
        xe = np.asarray(self.x_edges, dtype=np.float64)
        ye = np.asarray(self.y_edges, dtype=np.float64)
        if xe.size != p.shape[0] + 1 or ye.size != p.shape[1] + 1:
            raise ConfigError("edge arrays must match the joint histogram shape")
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "x_edges", xe)
        object.__setattr__(self, "y_edges", ye)

    def marginal_x(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.probabilities.sum(axis=1), self.x_edges)

    def marginal_y(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.probabilities.sum(axis=0), self.y_edges)


def equal_width_edges(values: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width edges over ``[min, max]``; a constant sequence gets
    one unit-wide cell centred on its value."""
    lo = float(np.min(values))
    hi = float(np.max(values))
    if lo == hi:
        lo -= 0.5
        hi += 0.5
    return np.linspace(lo, hi, bins + 1)


def bin_indices(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Cell index of each value for the given equal-width edges.

    Interior cells are half-open on the right; the top edge is folded
    into the last cell so the maximum never spills over.
    """
    lo, hi = float(edges[0]), float(edges[-1])
    bins = edges.size - 1
    scaled = (values - lo) * (bins / (hi - lo))
    idx = scaled.astype(np.intp)
    return np.minimum(np.maximum(idx, 0), bins - 1)


def _as_finite_1d(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigError(f"{name} must be a non-empty one-dimensional sequence")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must contain only finite values")
    return arr


def marginal_distribution(values, bins: int) -> DiscreteDistribution:
    """Equal-width histogram of a sequence as a probability distribution."""
    arr = _as_finite_1d(values, "values")
    if bins < 1:
        raise ConfigError(f"bins must be >= 1, got {bins!r}")
    edges = equal_width_edges(arr, bins)
    counts = np.bincount(bin_indices(arr, edges), minlength=bins)
    return DiscreteDistribution(counts / arr.size, edges)


def joint_distribution(x, y, bins: int) -> JointDistribution:
    """Joint equal-width histogram of two equally long sequences."""
    xa = _as_finite_1d(x, "x")
    ya = _as_finite_1d(y, "y")
    if xa.size != ya.size:
        raise ConfigError(f"x and y must have equal length, got {xa.size} and {ya.size}")
    if bins < 2:
        raise ConfigError(f"bins must be >= 2, got {bins!r}")
    if xa.size < bins:
        raise ConfigError(f"need at least {bins} paired samples, got {xa.size}")
    x_edges = equal_width_edges(xa, bins)
    y_edges = equal_width_edges(ya, bins)
    ix = bin_indices(xa, x_edges)
    iy = bin_indices(ya, y_edges)
    counts = np.bincount(ix * bins + iy, minlength=bins * bins).reshape(bins, bins)
    return JointDistribution(counts / xa.size, x_edges, y_edges)


def entropy(dist: DiscreteDistribution | JointDistribution) -> float:
    """Shannon entropy in bits; empty cells contribute nothing."""
    return _entropy_bits(dist.probabilities)


def _entropy_bits(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def mi_from_joint(joint: JointDistribution, route: str = "entropy") -> float:
    """Mutual information in bits from a joint histogram.

    ``route="entropy"`` computes H(X) + H(Y) - H(X, Y); ``route="ratio"``
    computes the double sum over p log2(p / (p_x p_y)). Marginals come
    from the joint's own row and column sums either way.
    """
    p = joint.probabilities
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    if route == "entropy":
        return _entropy_bits(px) + _entropy_bits(py) - _entropy_bits(p)
    if route == "ratio":
        mask = p > 0
        num = p[mask]
        den = np.outer(px, py)[mask]
        return float((num * np.log2(num / den)).sum())
    raise ConfigError(f"unknown route {route!r}, expected 'entropy' or 'ratio'")


def mutual_information(x, y, bins: int = 16) -> float:
    """Plug-in mutual information of two sequences, in bits."""
    return mi_from_joint(joint_distribution(x, y, bins), route="entropy")


def auto_mutual_information(series: TimeSeries, lag: int, bins: int = 16) -> float:
    """Mutual information between the series and itself ``lag`` samples later.

    ``lag=0`` degenerates to the entropy of the series' own histogram.
    """
    x = series.samples
    if int(lag) != lag or lag < 0 or lag > x.size - 2:
        raise ConfigError(f"lag must be an integer in [0, {x.size - 2}], got {lag!r}")
    lag = int(lag)
    if lag == 0:
        return mutual_information(x, x, bins)
    return mutual_information(x[:-lag], x[lag:], bins)


def first_local_minimum(values) -> LagResult:
    """Index of the first local minimum of a sequence, scanning from 1.

    Position ``L`` qualifies when ``v[L] < v[L-1]`` and ``v[L] <= v[L+1]``.
    If no interior position qualifies, the last index is returned with
    the saturated flag set.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 3:
        raise ConfigError("need a one-dimensional sequence of at least 3 values")
    for lag in range(1, v.size - 1):
        if v[lag] < v[lag - 1] and v[lag] <= v[lag + 1]:
            return LagResult(lag, False)
    return LagResult(int(v.size - 1), True)


def select_lag_first_minimum(series: TimeSeries, max_lag: int, bins: int = 16) -> LagResult:
    """Embedding delay from the first minimum of auto mutual information.

    Computes autoMI at lags ``0..max_lag`` and returns the first local
    minimum; if autoMI decreases through the whole scan the cap is
    returned with the saturated flag set.
    """
    if int(max_lag) != max_lag or max_lag < 2:
        raise ConfigError(f"max_lag must be an integer >= 2, got {max_lag!r}")
    ami = [auto_mutual_information(series, lag, bins) for lag in range(int(max_lag) + 1)]
    return first_local_minimum(ami)
