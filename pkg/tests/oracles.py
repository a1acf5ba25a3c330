"""Independent reference implementations used only by the tests.

Everything here is written the slow, obvious way: full O(N^2) pair
scans, plain loops, library quadrature. The production code must agree
with these, not the other way around, so nothing below may import from
the estimator modules.
"""

import math

import numpy as np
from scipy.integrate import quad


def brute_pair_count(points: np.ndarray, radius: float, theiler_w: int) -> tuple[int, int]:
    """(pairs within radius, admissible pairs) by direct enumeration."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    r_sq = radius * radius
    inside = 0
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            if j - i <= theiler_w:
                continue
            total += 1
            d_sq = float(((pts[i] - pts[j]) ** 2).sum())
            if d_sq <= r_sq:
                inside += 1
    return inside, total


def brute_correlation_sum(points: np.ndarray, radius: float, theiler_w: int = 0) -> float:
    inside, total = brute_pair_count(points, radius, theiler_w)
    return inside / total


def brute_restricted_points(x: np.ndarray, m: int, t: int) -> np.ndarray:
    """First N - m*t delay vectors of dimension m at lag t."""
    n_pts = x.size - m * t
    return np.stack([x[j * t : j * t + n_pts] for j in range(m)], axis=1)


def brute_cao_terms(x: np.ndarray, m: int, t: int) -> tuple[float, float, np.ndarray]:
    """E(m), E*(m), and the neighbour index per point, by full scan.

    Nearest neighbour under the maximum norm at strictly positive
    distance, ties to the lowest index; identical tie policy to the
    production search so equality can be asserted bit for bit.
    """
    x = np.asarray(x, dtype=np.float64)
    pts = brute_restricted_points(x, m, t)
    n_pts = pts.shape[0]
    neighbours = np.empty(n_pts, dtype=np.int64)
    ratios = np.empty(n_pts, dtype=np.float64)
    gaps = np.empty(n_pts, dtype=np.float64)
    for i in range(n_pts):
        dist = np.max(np.abs(pts - pts[i]), axis=1)
        dist[dist == 0.0] = np.inf
        j = int(np.argmin(dist))  # argmin takes the lowest index on ties
        if not math.isfinite(dist[j]):
            raise ValueError("no strictly positive neighbour distance")
        neighbours[i] = j
        gap = abs(x[i + m * t] - x[j + m * t])
        ratios[i] = max(dist[j], gap) / dist[j]
        gaps[i] = gap
    return float(np.mean(ratios)), float(np.mean(gaps)), neighbours


def fnn_fractions(x: np.ndarray, t: int, m_values, r_tol: float = 15.0, a_tol: float = 2.0):
    """Kennel-style false-nearest-neighbour fractions per dimension.

    Euclidean metric, both the distance-ratio and the loneliness test;
    a neighbour at exactly zero distance is skipped rather than divided
    by. Only used to cross-check the plateau selection.
    """
    x = np.asarray(x, dtype=np.float64)
    r_a = float(np.std(x))
    out = {}
    for m in m_values:
        n_pts = x.size - m * t
        if n_pts < 2:
            out[m] = None
            continue
        pts = brute_restricted_points(x, m, t)
        false = 0
        counted = 0
        for i in range(n_pts):
            d = np.sqrt(((pts - pts[i]) ** 2).sum(axis=1))
            d[i] = np.inf
            j = int(np.argmin(d))
            dist = float(d[j])
            if dist == 0.0:
                continue
            counted += 1
            gap = abs(x[i + m * t] - x[j + m * t])
            if gap / dist > r_tol or math.hypot(dist, gap) / r_a > a_tol:
                false += 1
        out[m] = false / counted if counted else None
    return out


def fnn_minimum_dimension(x: np.ndarray, t: int, m_max: int = 6, threshold: float = 0.02) -> int:
    fractions = fnn_fractions(x, t, range(1, m_max + 1))
    for m in range(1, m_max + 1):
        frac = fractions[m]
        if frac is not None and frac < threshold:
            return m
    raise ValueError(f"no dimension up to {m_max} drops below {threshold}")


def t_tail_quad(t: float, df: float) -> float:
    """Upper-tail area of Student's t by numerical integration."""

    def density(u: float) -> float:
        c = math.gamma((df + 1.0) / 2.0) / (math.sqrt(df * math.pi) * math.gamma(df / 2.0))
        return c * (1.0 + u * u / df) ** (-(df + 1.0) / 2.0)

    area, _ = quad(density, t, math.inf, limit=200)
    return area


def two_pass_mean_std(values) -> tuple[float, float, int]:
    """fsum-based mean and sample standard deviation (n-1)."""
    vals = [float(v) for v in values]
    n = len(vals)
    mean = math.fsum(vals) / n
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return mean, math.sqrt(var), n


def jacobian_lle_logistic(r: float, x0: float, n_steps: int, transient: int = 1000) -> float:
    """ln |f'(x)| averaged along the orbit, the analytic-route oracle."""
    x = x0
    total = 0.0
    for k in range(transient + n_steps):
        if k >= transient:
            total += math.log(abs(r * (1.0 - 2.0 * x)))
        x = r * x * (1.0 - x)
    return total / n_steps
