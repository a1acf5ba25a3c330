"""File formats: signal CSV, hypnogram CSV, manifest JSON, NDJSON, reports.

Signal files are one sample per line with ``#``-prefixed ``key=value``
metadata lines up front (``# fs=100`` is required to rebuild a series).
Multi-channel files declare ``# channels=A,B`` and put one column per
channel on each line; a channel must then be named explicitly, it is
never guessed.

Hypnograms are ``epoch_index,stage_token`` rows with tokens
W R 1 2 3 4 ? counted from epoch 0; unrecognised tokens parse as
Unknown rather than failing the file.

All numeric output is serialised with 17 significant digits so a
written value reparses to the identical float. Writers go through a
temp-file-and-rename so a crash never leaves a half-written table, and
every report carries the configuration fingerprint of the run that
produced it.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .series import TimeSeries
from .sleep import (
    EpochIndices,
    Group,
    Recording,
    SleepStage,
    parse_group,
    parse_stage_token,
)
from .stats import ComparisonResult, GroupSummary, Histogram

__all__ = [
    "REPORTED_P_FLOOR",
    "atomic_write_text",
    "format_float",
    "read_signal_csv",
    "write_signal_csv",
    "read_hypnogram_csv",
    "write_hypnogram_csv",
    "RecordingSpec",
    "read_manifest",
    "load_recordings",
    "epoch_to_dict",
    "epoch_from_dict",
    "write_epochs_ndjson",
    "read_epochs_ndjson",
    "write_table1_csv",
    "write_pvalues_csv",
    "write_histogram_csvs",
    "write_run_manifest",
]

# Smallest p-value shown in the report-shaped table; the raw value is
# kept alongside it.
REPORTED_P_FLOOR = 0.0005


def format_float(x: float) -> str:
    """17 significant digits: enough for float64 round-trip fidelity."""
    return format(float(x), ".17g")


def _format_opt(x) -> str:
    return "" if x is None else format_float(x)


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see
    a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def read_signal_csv(path: str | Path, channel: str | None = None) -> tuple[TimeSeries, dict]:
    """Parse a signal file into a series plus its metadata dict.

    Raises
    ------
    InputError
        On unreadable files, malformed rows, missing ``fs`` metadata,
        or a missing/ambiguous channel selection.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read signal file {path}: {exc}") from exc
    metadata: dict[str, str] = {}
    rows: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                metadata[key.strip()] = value.strip()
            continue
        rows.append([p.strip() for p in line.split(",")])

    channels = None
    if "channels" in metadata:
        channels = [c.strip() for c in metadata["channels"].split(",") if c.strip()]

    n_cols = len(rows[0]) if rows else 0
    if n_cols == 0:
        raise InputError(f"signal file {path} has no samples")
    if any(len(r) != n_cols for r in rows):
        raise InputError(f"signal file {path} has rows of varying width")

    if n_cols == 1:
        # A single column is unambiguous; a requested channel only has
        # to be checked against whatever name the file declares.
        declared = metadata.get("channel")
        if declared is None and channels is not None and len(channels) == 1:
            declared = channels[0]
        if channel is not None and declared is not None and channel != declared:
            raise InputError(
                f"signal file {path} holds channel {declared!r}, not the requested {channel!r}"
            )
        col = 0
    else:
        if channels is None:
            raise InputError(
                f"signal file {path} has {n_cols} columns but no '# channels=' metadata"
            )
        if len(channels) != n_cols:
            raise InputError(
                f"signal file {path}: {len(channels)} channel names for {n_cols} columns"
            )
        if channel is None:
            raise InputError(
                f"signal file {path} is multi-channel ({', '.join(channels)}); pick one explicitly"
            )
        if channel not in channels:
            raise InputError(
                f"signal file {path} has no channel {channel!r}; available: {', '.join(channels)}"
            )
        col = channels.index(channel)

    try:
        samples = np.array([float(r[col]) for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"signal file {path} has a non-numeric sample: {exc}") from exc

    if "fs" not in metadata:
        raise InputError(f"signal file {path} is missing '# fs=' metadata")
    try:
        fs = float(metadata["fs"])
    except ValueError as exc:
        raise InputError(f"signal file {path} has a non-numeric fs: {metadata['fs']!r}") from exc
    try:
        series = TimeSeries(samples=samples, sample_rate_hz=fs)
    except Exception as exc:
        raise InputError(f"signal file {path}: {exc}") from exc
    return series, metadata


def write_signal_csv(path: str | Path, series: TimeSeries, metadata: dict | None = None) -> None:
    """Write a single-channel signal file; ``fs`` is always recorded."""
    lines = [f"# fs={format_float(series.sample_rate_hz)}"]
    for key, value in (metadata or {}).items():
        if key == "fs":
            continue
        lines.append(f"# {key}={value}")
    lines.extend(format_float(v) for v in series.samples)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_hypnogram_csv(path: str | Path) -> tuple[SleepStage, ...]:
    """Parse ``epoch_index,stage_token`` rows counted from zero."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read hypnogram {path}: {exc}") from exc
    stages: list[SleepStage] = []
    expected = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise InputError(f"hypnogram {path}:{lineno}: expected 'epoch_index,token'")
        try:
            idx = int(parts[0])
        except ValueError as exc:
            raise InputError(f"hypnogram {path}:{lineno}: bad epoch index {parts[0]!r}") from exc
        if idx != expected:
            raise InputError(
                f"hypnogram {path}:{lineno}: epoch indices must run 0,1,2,... (got {idx}, expected {expected})"
            )
        stages.append(parse_stage_token(parts[1]))
        expected += 1
    if not stages:
        raise InputError(f"hypnogram {path} has no epochs")
    return tuple(stages)


def write_hypnogram_csv(path: str | Path, stages: Sequence[SleepStage]) -> None:
    from .sleep import stage_token

    lines = [f"{k},{stage_token(stage)}" for k, stage in enumerate(stages)]
    atomic_write_text(path, "\n".join(lines) + "\n")


class RecordingSpec:
    """One manifest entry, with paths resolved against the manifest."""

    __slots__ = ("subject_id", "group", "signal_path", "hypnogram_path", "channel")

    def __init__(self, subject_id: str, group: Group, signal_path: Path, hypnogram_path: Path, channel: str | None):
        self.subject_id = subject_id
        self.group = group
        self.signal_path = signal_path
        self.hypnogram_path = hypnogram_path
        self.channel = channel


def read_manifest(path: str | Path) -> list[RecordingSpec]:
    """Parse a manifest: a JSON array of recording entries.

    Each entry needs ``subject_id``, ``group``, ``signal_path``, and
    ``hypnogram_path``; ``channel`` is optional. Relative paths are
    resolved against the manifest's own directory.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise InputError(f"manifest {path} must be a non-empty JSON array")
    base = path.parent
    specs = []
    for pos, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise InputError(f"manifest {path}: entry {pos} is not an object")
        missing = [k for k in ("subject_id", "group", "signal_path", "hypnogram_path") if k not in entry]
        if missing:
            raise InputError(f"manifest {path}: entry {pos} is missing {', '.join(missing)}")
        subject_id = str(entry["subject_id"])
        group = parse_group(str(entry["group"]))
        signal_path = base / str(entry["signal_path"])
        hypnogram_path = base / str(entry["hypnogram_path"])
        channel = entry.get("channel")
        if channel is not None:
            channel = str(channel)
        specs.append(RecordingSpec(subject_id, group, signal_path, hypnogram_path, channel))
    return specs


def load_recordings(manifest_path: str | Path) -> list[Recording]:
    """Read every recording a manifest names. All-or-nothing: any
    unreadable file fails the whole load before analysis starts."""
    recordings = []
    for spec in read_manifest(manifest_path):
        series, _meta = read_signal_csv(spec.signal_path, channel=spec.channel)
        hypnogram = read_hypnogram_csv(spec.hypnogram_path)
        try:
            recordings.append(
                Recording(
                    subject_id=spec.subject_id,
                    group=spec.group,
                    series=series,
                    hypnogram=hypnogram,
                )
            )
        except InputError:
            raise
        except Exception as exc:
            raise InputError(f"recording {spec.subject_id!r}: {exc}") from exc
    return recordings


_EPOCH_FIELDS = (
    "subject_id",
    "group",
    "stage",
    "epoch_index",
    "sample_rate_hz",
    "lle",
    "lle_units",
    "mi",
    "mi_lag",
    "med",
    "e1_at_selected",
    "d2",
    "theiler_w",
    "embed_m",
    "deterministic",
    "failures",
    "config_fingerprint",
)


def epoch_to_dict(epoch: EpochIndices) -> dict:
    """JSON-ready dict with a fixed key order."""
    return {
        "subject_id": epoch.subject_id,
        "group": None if epoch.group is None else epoch.group.value,
        "stage": epoch.stage.value,
        "epoch_index": epoch.epoch_index,
        "sample_rate_hz": epoch.sample_rate_hz,
        "lle": epoch.lle,
        "lle_units": epoch.lle_units,
        "mi": epoch.mi,
        "mi_lag": epoch.mi_lag,
        "med": epoch.med,
        "e1_at_selected": epoch.e1_at_selected,
        "d2": epoch.d2,
        "theiler_w": epoch.theiler_w,
        "embed_m": epoch.embed_m,
        "deterministic": epoch.deterministic,
        "failures": dict(sorted(epoch.failures.items())),
        "config_fingerprint": epoch.config_fingerprint,
    }


def epoch_from_dict(record: dict) -> EpochIndices:
    missing = [k for k in _EPOCH_FIELDS if k not in record]
    if missing:
        raise InputError(f"epoch record is missing fields: {', '.join(missing)}")
    group = record["group"]
    if group is not None:
        group = parse_group(group)
    try:
        stage = SleepStage(record["stage"])
    except ValueError as exc:
        raise InputError(f"unknown stage {record['stage']!r}") from exc
    return EpochIndices(
        subject_id=record["subject_id"],
        group=group,
        stage=stage,
        epoch_index=int(record["epoch_index"]),
        sample_rate_hz=float(record["sample_rate_hz"]),
        lle=record["lle"],
        lle_units=record["lle_units"],
        mi=record["mi"],
        mi_lag=record["mi_lag"],
        med=record["med"],
        e1_at_selected=record["e1_at_selected"],
        d2=record["d2"],
        theiler_w=record["theiler_w"],
        embed_m=record["embed_m"],
        deterministic=record["deterministic"],
        failures=record["failures"],
        config_fingerprint=record["config_fingerprint"],
    )


def write_epochs_ndjson(path: str | Path, epochs: Iterable[EpochIndices]) -> None:
    """One JSON object per line, one line per window."""
    lines = [json.dumps(epoch_to_dict(e), ensure_ascii=True) for e in epochs]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_epochs_ndjson(path: str | Path) -> list[EpochIndices]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read epoch file {path}: {exc}") from exc
    epochs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"epoch file {path}:{lineno} is not valid JSON: {exc}") from exc
        epochs.append(epoch_from_dict(record))
    return epochs


def _fingerprint_header(fingerprint: str) -> str:
    return f"# config_fingerprint={fingerprint}\n"


def write_table1_csv(path: str | Path, summaries: Sequence[GroupSummary], fingerprint: str) -> None:
    """Mean/std/count per (index, stage, group), one row per cell."""
    lines = [_fingerprint_header(fingerprint).rstrip("\n"), "index,stage,group,mean,std,n"]
    for s in summaries:
        group = "" if s.group is None else s.group.value
        stage = "" if s.stage is None else s.stage.value
        lines.append(
            f"{s.index_name},{stage},{group},{format_float(s.mean)},{format_float(s.std)},{s.n}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_pvalues_csv(path: str | Path, comparisons: Sequence[ComparisonResult], fingerprint: str) -> None:
    """Welch test per (stage, index); ``p_reported`` is floored at
    0.0005 to match the report granularity, ``p_raw`` is not."""
    lines = [
        _fingerprint_header(fingerprint).rstrip("\n"),
        "stage,index,t_value,df,p_raw,p_reported",
    ]
    for c in comparisons:
        reported = max(c.p_value, REPORTED_P_FLOOR)
        lines.append(
            f"{c.stage.value},{c.index_name},{format_float(c.t_value)},"
            f"{format_float(c.degrees_of_freedom)},{format_float(c.p_value)},{format_float(reported)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_histogram_csvs(directory: str | Path, histograms: Sequence[Histogram], fingerprint: str) -> list[Path]:
    """One CSV per histogram: ``hist_<index>_<stage>_<group>.csv``."""
    directory = Path(directory)
    written = []
    for h in histograms:
        stage = "any" if h.stage is None else h.stage.value
        group = "any" if h.group is None else h.group.value
        name = f"hist_{h.index_name or 'values'}_{stage}_{group}.csv"
        lines = [_fingerprint_header(fingerprint).rstrip("\n"), "bin_left,bin_right,relative_frequency"]
        for k, freq in enumerate(h.relative_frequencies):
            lines.append(
                f"{format_float(h.bin_edges[k])},{format_float(h.bin_edges[k + 1])},{format_float(freq)}"
            )
        target = directory / name
        atomic_write_text(target, "\n".join(lines) + "\n")
        written.append(target)
    return written


def write_run_manifest(
    path: str | Path,
    config_dict: dict,
    fingerprint: str,
    inputs: dict,
    outputs: dict,
) -> None:
    """Machine-readable record of a run: configuration, fingerprint,
    inputs, and what was produced. Deliberately carries no timestamps
    so identical runs write identical bytes."""
    payload = {
        "config": config_dict,
        "config_fingerprint": fingerprint,
        "inputs": inputs,
        "outputs": outputs,
    }
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
