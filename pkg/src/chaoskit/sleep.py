"""Epoching of staged recordings and the per-window index pipeline.

A recording is a scalar signal plus a hypnogram scored in 30 second
epochs. Recordings are cut into non-overlapping 30 s windows (the
trailing partial window is dropped and logged), each window carries its
stage label, and the four indices are computed per window:

1. embedding delay from the first minimum of auto mutual information,
2. temporal exclusion window from the first autocorrelation zero,
3. minimum embedding dimension from the E1 plateau,
4. largest Lyapunov exponent and correlation dimension on the delay
   embedding at that dimension and delay.

Mutual information is evaluated at the selected delay. Failures are per
index and per window: a window that cannot support one estimator still
reports the others, and the batch never aborts. Every result carries a
fingerprint of the estimator configuration so mixed-config outputs are
detectable.

Sampling rates are kept native per group (no resampling); concatenation
across subjects therefore requires a uniform rate within each
(group, stage) cell and refuses otherwise.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .cao import minimum_embedding_dimension
from .correlation import correlation_curve, correlation_dimension
from .errors import ChaosKitError, ConfigError, InputError, ShortSeriesError
from .information import auto_mutual_information, select_lag_first_minimum
from .lyapunov import WolfParams, largest_lyapunov_wolf
from .series import EmbeddingParams, TimeSeries, delay_embed, theiler_window

__all__ = [
    "EPOCH_SECONDS",
    "SleepStage",
    "Group",
    "SCORED_STAGES",
    "parse_stage_token",
    "stage_token",
    "parse_group",
    "Recording",
    "EpochWindow",
    "EstimatorConfig",
    "EpochIndices",
    "samples_per_epoch",
    "epoch_split",
    "concatenate_by_stage",
    "compute_epoch_indices",
    "analyze_recordings",
]

logger = logging.getLogger(__name__)

EPOCH_SECONDS = 30
LLE_UNITS = "nats/s"


class SleepStage(Enum):
    WAKE = "Wake"
    REM = "REM"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"
    UNKNOWN = "Unknown"


SCORED_STAGES = (
    SleepStage.WAKE,
    SleepStage.REM,
    SleepStage.S1,
    SleepStage.S2,
    SleepStage.S3,
    SleepStage.S4,
)

_TOKEN_TO_STAGE = {
    "W": SleepStage.WAKE,
    "R": SleepStage.REM,
    "1": SleepStage.S1,
    "2": SleepStage.S2,
    "3": SleepStage.S3,
    "4": SleepStage.S4,
    "?": SleepStage.UNKNOWN,
}
_STAGE_TO_TOKEN = {stage: token for token, stage in _TOKEN_TO_STAGE.items()}


def parse_stage_token(token: str) -> SleepStage:
    """Stage for a hypnogram token; anything unrecognised is Unknown."""
    return _TOKEN_TO_STAGE.get(token.strip(), SleepStage.UNKNOWN)


def stage_token(stage: SleepStage) -> str:
    return _STAGE_TO_TOKEN[stage]


class Group(Enum):
    HEALTHY = "Healthy"
    APNEA = "Apnea"


def parse_group(text: str) -> Group:
    """Group from its manifest spelling; never inferred from anything else."""
    lowered = text.strip().lower()
    for group in Group:
        if lowered == group.value.lower():
            return group
    raise InputError(f"unknown group {text!r}; expected 'Healthy' or 'Apnea'")


def samples_per_epoch(sample_rate_hz: float) -> int:
    """Samples in one 30 s epoch; the rate must make that an integer."""
    exact = sample_rate_hz * EPOCH_SECONDS
    nearest = round(exact)
    if nearest < 1 or abs(exact - nearest) > 1e-6:
        raise ConfigError(
            f"sample rate {sample_rate_hz} Hz does not give an integer number of samples per {EPOCH_SECONDS} s epoch"
        )
    return int(nearest)


@dataclass(frozen=True)
class Recording:
    """One subject's signal plus its epoch-by-epoch stage labels."""

    subject_id: str
    group: Group
    series: TimeSeries
    hypnogram: tuple[SleepStage, ...]

    def __post_init__(self):
        if not self.subject_id:
            raise InputError("subject_id must be non-empty")
        if not isinstance(self.group, Group):
            raise InputError(f"group must be a Group, got {self.group!r}")
        object.__setattr__(self, "hypnogram", tuple(self.hypnogram))
        expected = len(self.series) // samples_per_epoch(self.series.sample_rate_hz)
        if len(self.hypnogram) != expected:
            raise InputError(
                f"hypnogram of {self.subject_id!r} has {len(self.hypnogram)} epochs, "
                f"signal supports {expected}"
            )


class EpochWindow(NamedTuple):
    epoch_index: int
    stage: SleepStage
    window: TimeSeries


def epoch_split(recording: Recording) -> list[EpochWindow]:
    """Non-overlapping 30 s windows with their stage labels.

    A trailing partial window is dropped (and logged at debug level).
    """
    spe = samples_per_epoch(recording.series.sample_rate_hz)
    x = recording.series.samples
    n_full = x.size // spe
    dropped = x.size - n_full * spe
    if dropped:
        logger.debug(
            "dropping %d trailing samples of %s (partial epoch)", dropped, recording.subject_id
        )
    fs = recording.series.sample_rate_hz
    return [
        EpochWindow(k, recording.hypnogram[k], TimeSeries(x[k * spe : (k + 1) * spe], fs))
        for k in range(n_full)
    ]


def concatenate_by_stage(recordings: Sequence[Recording]) -> dict[tuple[Group, SleepStage], TimeSeries]:
    """Concatenate every scored stage's windows per group.

    Subjects contribute in input order, epochs in time order. Unknown
    epochs are left out; cells with no epochs are absent. All windows
    landing in one cell must share a sampling rate.
    """
    pieces: dict[tuple[Group, SleepStage], list[np.ndarray]] = {}
    rates: dict[tuple[Group, SleepStage], float] = {}
    for rec in recordings:
        for ew in epoch_split(rec):
            if ew.stage is SleepStage.UNKNOWN:
                continue
            key = (rec.group, ew.stage)
            known = rates.setdefault(key, ew.window.sample_rate_hz)
            if known != ew.window.sample_rate_hz:
                raise ConfigError(
                    f"mixed sampling rates in cell ({key[0].value}, {key[1].value}): "
                    f"{known} Hz vs {ew.window.sample_rate_hz} Hz"
                )
            pieces.setdefault(key, []).append(ew.window.samples)
    return {
        key: TimeSeries(np.concatenate(chunks), rates[key]) for key, chunks in pieces.items()
    }


@dataclass(frozen=True)
class EstimatorConfig:
    """Every estimator knob the pipeline uses, in one hashable place."""

    bins: int = 16
    mi_max_lag: int = 50
    theiler_max_lag: int = 100
    m_max: int = 8
    plateau_tol: float = 0.05
    e2_tol: float = 0.1
    evolve_steps: int = 3
    min_separation: float | None = None
    max_separation: float | None = None
    max_replacement_angle: float = 0.5
    n_radii: int = 24
    min_fit_r2: float = 0.98

    def as_dict(self) -> dict:
        return {
            "bins": self.bins,
            "mi_max_lag": self.mi_max_lag,
            "theiler_max_lag": self.theiler_max_lag,
            "m_max": self.m_max,
            "plateau_tol": self.plateau_tol,
            "e2_tol": self.e2_tol,
            "evolve_steps": self.evolve_steps,
            "min_separation": self.min_separation,
            "max_separation": self.max_separation,
            "max_replacement_angle": self.max_replacement_angle,
            "n_radii": self.n_radii,
            "min_fit_r2": self.min_fit_r2,
        }

    def fingerprint(self) -> str:
        """SHA-256 over the canonical JSON form of the configuration."""
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class EpochIndices:
    """All indices of one window, with per-index failure reasons.

    A value of None pairs with an entry in ``failures`` naming the
    index and why it is missing. ``failures`` empty means the window
    produced every index.
    """

    subject_id: str
    group: Group | None
    stage: SleepStage
    epoch_index: int
    sample_rate_hz: float
    lle: float | None = None
    lle_units: str = LLE_UNITS
    mi: float | None = None
    mi_lag: int | None = None
    med: int | None = None
    e1_at_selected: float | None = None
    d2: float | None = None
    theiler_w: int | None = None
    embed_m: int | None = None
    deterministic: bool | None = None
    failures: Mapping[str, str] = field(default_factory=dict)
    config_fingerprint: str = ""

    def __post_init__(self):
        object.__setattr__(self, "failures", dict(self.failures))

    @property
    def failed(self) -> bool:
        return bool(self.failures)


_ALL_INDEX_NAMES = ("lle", "mi", "med", "d2")


def compute_epoch_indices(
    window: TimeSeries,
    config: EstimatorConfig | None = None,
    *,
    subject_id: str = "",
    group: Group | None = None,
    stage: SleepStage = SleepStage.UNKNOWN,
    epoch_index: int = 0,
) -> EpochIndices:
    """Run the full index pipeline on one window.

    Order: delay selection, exclusion window, minimum embedding
    dimension, then the Lyapunov exponent and correlation dimension on
    the resulting embedding, plus mutual information at the selected
    delay. Per-index errors land in ``failures`` instead of raising.
    When the E1 curve never plateaus the window is embedded at the
    scanned maximum dimension so the trajectory-based indices are still
    attempted.
    """
    if config is None:
        config = EstimatorConfig()
    fingerprint = config.fingerprint()
    n = len(window)
    fs = window.sample_rate_hz
    failures: dict[str, str] = {}

    def failed_epoch(reason: str) -> EpochIndices:
        return EpochIndices(
            subject_id=subject_id,
            group=group,
            stage=stage,
            epoch_index=epoch_index,
            sample_rate_hz=fs,
            failures={name: reason for name in _ALL_INDEX_NAMES},
            config_fingerprint=fingerprint,
        )

    # Shared prerequisites: the delay and the exclusion window. If these
    # cannot be computed nothing downstream can run.
    try:
        lag, _lag_saturated = select_lag_first_minimum(
            window, min(config.mi_max_lag, n - 2), config.bins
        )
        w, _w_saturated = theiler_window(window, min(config.theiler_max_lag, n - 1))
    except ChaosKitError as exc:
        return failed_epoch(str(exc))

    mi = None
    try:
        mi = auto_mutual_information(window, lag, config.bins)
    except ChaosKitError as exc:
        failures["mi"] = str(exc)

    med = None
    e1_at_selected = None
    deterministic = None
    embed_m: int | None = None
    try:
        m_cap = (n - 2) // lag
        m_max = min(config.m_max, m_cap)
        if m_max < 3:
            raise ShortSeriesError(
                f"window of {n} samples cannot support a dimension scan at lag {lag}"
            )
        profile = minimum_embedding_dimension(
            window, lag, m_max, config.plateau_tol, config.e2_tol
        )
        deterministic = profile.deterministic
        if profile.selected_m is None:
            failures["med"] = "E1 curve never plateaus; no finite embedding dimension"
            embed_m = m_max
        else:
            med = profile.selected_m
            e1_at_selected = float(profile.e1_values[med - 1])
            embed_m = med
    except ChaosKitError as exc:
        failures["med"] = str(exc)
        fallback = (n - 1) // lag
        embed_m = max(2, min(config.m_max, fallback)) if fallback >= 2 else None

    vectors = None
    if embed_m is not None:
        try:
            vectors = delay_embed(window, EmbeddingParams(embed_m, lag, w))
        except ChaosKitError as exc:
            failures["lle"] = str(exc)
            failures["d2"] = str(exc)
    else:
        failures["lle"] = failures["d2"] = "no embedding dimension available"

    lle = None
    d2 = None
    if vectors is not None:
        try:
            wolf = WolfParams(
                evolve_steps=config.evolve_steps,
                min_separation=config.min_separation,
                max_separation=config.max_separation,
                theiler_w=w,
                max_replacement_angle=config.max_replacement_angle,
            )
            result = largest_lyapunov_wolf(vectors, wolf)
            lle = result.exponent * fs  # nats per sample -> nats per second
        except ChaosKitError as exc:
            failures["lle"] = str(exc)
        try:
            curve = correlation_curve(vectors, config.n_radii, w)
            d2 = correlation_dimension(curve, config.min_fit_r2).d2
        except ChaosKitError as exc:
            failures["d2"] = str(exc)

    return EpochIndices(
        subject_id=subject_id,
        group=group,
        stage=stage,
        epoch_index=epoch_index,
        sample_rate_hz=fs,
        lle=lle,
        mi=mi,
        mi_lag=int(lag),
        med=med,
        e1_at_selected=e1_at_selected,
        d2=d2,
        theiler_w=int(w),
        embed_m=embed_m,
        deterministic=deterministic,
        failures=failures,
        config_fingerprint=fingerprint,
    )


class _Task(NamedTuple):
    subject_id: str
    group: Group | None
    stage: SleepStage
    epoch_index: int
    window: TimeSeries


def _run_task(task: _Task, config: EstimatorConfig) -> EpochIndices:
    return compute_epoch_indices(
        task.window,
        config,
        subject_id=task.subject_id,
        group=task.group,
        stage=task.stage,
        epoch_index=task.epoch_index,
    )


def analyze_recordings(
    recordings: Sequence[Recording],
    config: EstimatorConfig | None = None,
    mode: str = "per-epoch",
    jobs: int = 1,
) -> list[EpochIndices]:
    """Compute indices for a whole cohort.

    ``mode="per-epoch"`` analyses every 30 s window of every subject;
    ``mode="per-stage-concat"`` first concatenates each (group, stage)
    cell across subjects and analyses the twelve concatenated signals.
    Results come back in task order (subjects as given, epochs in time
    order) regardless of ``jobs``, and are identical for any job count.
    """
    if config is None:
        config = EstimatorConfig()
    if int(jobs) != jobs or jobs < 1:
        raise ConfigError(f"jobs must be an integer >= 1, got {jobs!r}")
    jobs = int(jobs)

    tasks: list[_Task] = []
    if mode == "per-epoch":
        for rec in recordings:
            for ew in epoch_split(rec):
                tasks.append(_Task(rec.subject_id, rec.group, ew.stage, ew.epoch_index, ew.window))
    elif mode == "per-stage-concat":
        cells = concatenate_by_stage(recordings)
        for group in Group:
            for stage in SCORED_STAGES:
                series = cells.get((group, stage))
                if series is None:
                    continue
                name = f"concat-{group.value}-{stage.value}"
                tasks.append(_Task(name, group, stage, 0, series))
    else:
        raise ConfigError(f"unknown mode {mode!r}; expected 'per-epoch' or 'per-stage-concat'")

    if jobs == 1 or len(tasks) < 2:
        return [_run_task(task, config) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, (config,) * len(tasks), chunksize=1))
