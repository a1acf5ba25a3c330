"""Largest Lyapunov exponent from a fiducial trajectory with replacement.

The estimator walks the embedded trajectory, carrying a neighbour point
alongside the fiducial point. Every ``evolve_steps`` samples the pair's
separation is measured before and after, contributing ``ln(d'/d)`` to a
running sum, and a replacement neighbour is then sought: close to the
fiducial point (within the separation bounds), outside the temporal
exclusion window, and at a small angle to the current separation vector
so the accumulated orientation survives the swap. If the angle cone is
empty the nearest admissible point is taken regardless of angle; if
nothing is admissible the old pair is kept. The exponent is the log sum
divided by the total number of evolved samples, in nats per sample.

Distances are Euclidean. With ``M`` embedded points, the candidate scan
per renormalisation is a vectorised pass over all points, so a full run
costs O(M^2 / evolve_steps) coordinate operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateSeriesError, EstimationError, ShortSeriesError
from .series import DelayVectors

__all__ = ["WolfParams", "LyapunovResult", "largest_lyapunov_wolf"]

_MIN_POINTS = 100
_LOW_CONFIDENCE_RENORMS = 10


@dataclass(frozen=True)
class WolfParams:
    """Knobs of the fiducial-trajectory estimator.

    ``min_separation`` and ``max_separation`` default to 1e-3 and 0.1
    times the attractor extent (the largest per-coordinate span), which
    is resolved against the data at run time when they are left None.
    ``max_replacement_angle`` is in radians.
    """

    evolve_steps: int = 3
    min_separation: float | None = None
    max_separation: float | None = None
    theiler_w: int = 0
    max_replacement_angle: float = 0.5

    def __post_init__(self):
        if int(self.evolve_steps) != self.evolve_steps or self.evolve_steps < 1:
            raise ConfigError(f"evolve_steps must be an integer >= 1, got {self.evolve_steps!r}")
        for name in ("min_separation", "max_separation"):
            v = getattr(self, name)
            if v is not None and not (np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive and finite, got {v!r}")
        if (
            self.min_separation is not None
            and self.max_separation is not None
            and not self.min_separation < self.max_separation
        ):
            raise ConfigError("min_separation must be smaller than max_separation")
        if int(self.theiler_w) != self.theiler_w or self.theiler_w < 0:
            raise ConfigError(f"theiler_w must be an integer >= 0, got {self.theiler_w!r}")
        if not 0 < self.max_replacement_angle < math.pi:
            raise ConfigError(
                f"max_replacement_angle must be in (0, pi), got {self.max_replacement_angle!r}"
            )


@dataclass(frozen=True)
class LyapunovResult:
    """Estimate plus bookkeeping of the fiducial walk.

    ``exponent`` is in nats per sample. ``low_confidence`` is set when
    fewer than 10 renormalisations contributed.
    """

    exponent: float
    n_renormalizations: int
    n_replacements: int
    n_evolved_samples: int
    low_confidence: bool


def largest_lyapunov_wolf(vectors: DelayVectors | np.ndarray, params: WolfParams | None = None) -> LyapunovResult:
    """Estimate the largest Lyapunov exponent of an embedded trajectory.

    Raises
    ------
    ShortSeriesError
        With fewer than 100 embedded points.
    EstimationError
        If no admissible initial neighbour exists, or no divergence
        segment could be accumulated.
    """
    if params is None:
        params = WolfParams()
    pts = vectors.points if isinstance(vectors, DelayVectors) else np.asarray(vectors, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if n < _MIN_POINTS:
        raise ShortSeriesError(f"Wolf estimator needs at least {_MIN_POINTS} points, got {n}")
    extent = float(np.max(pts.max(axis=0) - pts.min(axis=0)))
    if extent == 0.0:
        raise DegenerateSeriesError("all embedded points coincide; extent is zero")
    d_min = params.min_separation if params.min_separation is not None else 1e-3 * extent
    d_max = params.max_separation if params.max_separation is not None else 0.1 * extent
    if not d_min < d_max:
        raise ConfigError(f"resolved separation bounds are empty: [= {d_min!r}, {d_max!r}]")
    cos_cone = math.cos(params.max_replacement_angle)
    w = params.theiler_w
    last = n - 1
    index = np.arange(n)

    if pts.shape[1] == 1:
        flat = pts[:, 0]

        def distances_from(i: int) -> np.ndarray:
            return np.abs(flat - flat[i])

    else:

        def distances_from(i: int) -> np.ndarray:
            return np.sqrt(((pts - pts[i]) ** 2).sum(axis=1))

    def admissible(i: int) -> tuple[np.ndarray, np.ndarray]:
        d = distances_from(i)
        ok = (d >= d_min) & (d <= d_max) & (np.abs(index - i) > w)
        ok[last] = False  # the final point has no future to evolve into
        return d, ok

    def pick(i: int, separation: np.ndarray | None, sep_norm: float) -> int | None:
        """Nearest admissible neighbour of point i, angle cone first."""
        d, ok = admissible(i)
        if not ok.any():
            return None
        if separation is not None and sep_norm > 0.0:
            cos = ((pts - pts[i]) @ separation) / (np.where(d > 0, d, np.inf) * sep_norm)
            cone = ok & (cos >= cos_cone)
            pool = cone if cone.any() else ok
        else:
            pool = ok
        return int(np.where(pool, d, np.inf).argmin())

    i = 0
    j = pick(0, None, 0.0)
    if j is None:
        raise EstimationError(
            "no admissible initial neighbour: separation bounds or exclusion window too strict"
        )

    log_sum = 0.0
    evolved = 0
    renorms = 0
    replacements = 0
    while i < last and j < last:
        steps = min(params.evolve_steps, last - i, last - j)
        d_before = float(np.sqrt(((pts[i] - pts[j]) ** 2).sum()))
        i += steps
        j += steps
        d_after = float(np.sqrt(((pts[i] - pts[j]) ** 2).sum()))
        if d_before > 0.0 and d_after > 0.0:
            log_sum += math.log(d_after / d_before)
            evolved += steps
            renorms += 1
        if i >= last:
            break
        candidate = pick(i, pts[j] - pts[i], d_after)
        if candidate is None:
            if j >= last:
                break  # neighbour ran off the end and nothing can replace it
            continue
        if candidate != j:
            replacements += 1
            j = candidate
    if evolved == 0:
        raise EstimationError("fiducial walk produced no usable divergence segments")
    return LyapunovResult(
        exponent=log_sum / evolved,
        n_renormalizations=renorms,
        n_replacements=replacements,
        n_evolved_samples=evolved,
        low_confidence=renorms < _LOW_CONFIDENCE_RENORMS,
    )
