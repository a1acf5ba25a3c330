"""Batch command-line interface.

Four commands:

* ``analyze``   manifest of recordings -> per-window indices (NDJSON)
                plus summary/p-value/histogram tables in an output dir
* ``estimate``  one estimator on one signal file -> JSON on stdout
* ``synth``     write a synthetic signal file from a named generator
* ``report``    rebuild the tables from an existing NDJSON file

Exit codes: 0 success, 2 usage error, 3 unreadable or malformed input,
4 estimator or internal failure. Per-window estimator failures during
``analyze`` are recorded in the output, not fatal.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .cao import minimum_embedding_dimension
from .correlation import correlation_curve, correlation_dimension
from .errors import ChaosKitError, ConfigError, InputError
from .generators import GeneratorSpec, generate, generator_kinds
from .information import auto_mutual_information, select_lag_first_minimum
from .io import (
    format_float,
    load_recordings,
    read_epochs_ndjson,
    read_signal_csv,
    write_epochs_ndjson,
    write_histogram_csvs,
    write_pvalues_csv,
    write_run_manifest,
    write_signal_csv,
    write_table1_csv,
)
from .lyapunov import WolfParams, largest_lyapunov_wolf
from .series import EmbeddingParams, TimeSeries, delay_embed, theiler_window
from .sleep import EstimatorConfig, SleepStage, analyze_recordings
from .stats import compare_groups, group_summaries, histograms_by_cell

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    grp = parser.add_argument_group("estimator configuration")
    grp.add_argument("--bins", type=int, default=16, help="histogram bins for MI (default 16)")
    grp.add_argument("--mi-max-lag", type=int, default=50, help="cap for the delay scan")
    grp.add_argument("--theiler-max-lag", type=int, default=100, help="cap for the exclusion-window scan")
    grp.add_argument("--m-max", type=int, default=8, help="largest dimension in the Cao scan")
    grp.add_argument("--plateau-tol", type=float, default=0.05, help="E1 plateau tolerance")
    grp.add_argument("--e2-tol", type=float, default=0.1, help="|E2-1| threshold for determinism")
    grp.add_argument("--evolve-steps", type=int, default=3, help="samples per divergence segment")
    grp.add_argument("--min-separation", type=float, default=None, help="neighbour distance floor (default 1e-3 x extent)")
    grp.add_argument("--max-separation", type=float, default=None, help="neighbour distance cap (default 0.1 x extent)")
    grp.add_argument("--max-angle", type=float, default=0.5, help="replacement angle cone, radians")
    grp.add_argument("--n-radii", type=int, default=24, help="radii on the correlation curve")
    grp.add_argument("--min-fit-r2", type=float, default=0.98, help="linearity bar for the D2 fit")


def _config_from_args(args: argparse.Namespace) -> EstimatorConfig:
    return EstimatorConfig(
        bins=args.bins,
        mi_max_lag=args.mi_max_lag,
        theiler_max_lag=args.theiler_max_lag,
        m_max=args.m_max,
        plateau_tol=args.plateau_tol,
        e2_tol=args.e2_tol,
        evolve_steps=args.evolve_steps,
        min_separation=args.min_separation,
        max_separation=args.max_separation,
        max_replacement_angle=args.max_angle,
        n_radii=args.n_radii,
        min_fit_r2=args.min_fit_r2,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaoskit",
        description="Chaos indices for scalar time series and staged sleep recordings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="run the index pipeline over a manifest of recordings")
    p_analyze.add_argument("--manifest", required=True, help="JSON manifest of recordings")
    p_analyze.add_argument("--out", required=True, help="output directory")
    p_analyze.add_argument(
        "--mode",
        choices=("per-epoch", "per-stage-concat"),
        default="per-epoch",
        help="analyse every 30 s window (default) or the concatenated stage signals",
    )
    p_analyze.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p_analyze.add_argument("--hist-bins", type=int, default=16, help="bins for the report histograms")
    _add_config_flags(p_analyze)
    p_analyze.set_defaults(func=_cmd_analyze)

    p_estimate = sub.add_parser("estimate", help="run one estimator on one signal file")
    p_estimate.add_argument(
        "--estimator",
        required=True,
        choices=("lag", "theiler", "mi", "med", "lle", "d2"),
        help="which quantity to estimate",
    )
    p_estimate.add_argument("--input", required=True, help="signal CSV file")
    p_estimate.add_argument("--channel", default=None, help="channel name for multi-channel files")
    p_estimate.add_argument("--lag", type=int, default=None, help="embedding delay (default: auto)")
    p_estimate.add_argument("--m", type=int, default=None, help="embedding dimension (default: auto)")
    p_estimate.add_argument("--theiler", type=int, default=None, help="exclusion window (default: auto)")
    p_estimate.add_argument("--log2", action="store_true", help="report the Lyapunov exponent in bits instead of nats")
    _add_config_flags(p_estimate)
    p_estimate.set_defaults(func=_cmd_estimate)

    p_synth = sub.add_parser("synth", help="write a synthetic signal file")
    p_synth.add_argument("--kind", required=True, choices=generator_kinds(), help="generator family")
    p_synth.add_argument("--n", type=int, required=True, help="samples to keep")
    p_synth.add_argument("--seed", type=int, default=0, help="noise stream seed")
    p_synth.add_argument("--skip", type=int, default=0, help="transient samples to discard")
    p_synth.add_argument("--fs", type=float, default=1.0, help="sampling rate of the output (Hz)")
    p_synth.add_argument("--out", required=True, help="output signal CSV")
    p_synth.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="generator parameter, repeatable (e.g. --param r=3.9 --param x0=0.2)",
    )
    p_synth.set_defaults(func=_cmd_synth)

    p_report = sub.add_parser("report", help="rebuild tables from an epoch NDJSON file")
    p_report.add_argument("--epochs", required=True, help="NDJSON file from a previous analyze run")
    p_report.add_argument("--out", required=True, help="output directory")
    p_report.add_argument("--hist-bins", type=int, default=16, help="bins for the report histograms")
    p_report.set_defaults(func=_cmd_report)

    return parser


def _write_reports(out_dir: Path, epochs, fingerprint: str, hist_bins: int) -> dict:
    scored = [e for e in epochs if e.group is not None and e.stage is not SleepStage.UNKNOWN]
    summaries = group_summaries(scored)
    comparisons = compare_groups(scored)
    histograms = histograms_by_cell(scored, hist_bins)
    write_table1_csv(out_dir / "summary.csv", summaries, fingerprint)
    write_pvalues_csv(out_dir / "pvalues.csv", comparisons, fingerprint)
    hist_paths = write_histogram_csvs(out_dir / "histograms", histograms, fingerprint)
    return {
        "summary_rows": len(summaries),
        "comparisons": len(comparisons),
        "histograms": len(hist_paths),
    }


def _cmd_analyze(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    recordings = load_recordings(args.manifest)  # InputError -> exit 3, nothing written
    epochs = analyze_recordings(recordings, config, mode=args.mode, jobs=args.jobs)
    out_dir = Path(args.out)
    fingerprint = config.fingerprint()
    write_epochs_ndjson(out_dir / "epoch_indices.ndjson", epochs)
    report_counts = _write_reports(out_dir, epochs, fingerprint, args.hist_bins)
    failed = sum(1 for e in epochs if e.failed)
    write_run_manifest(
        out_dir / "run_manifest.json",
        config.as_dict(),
        fingerprint,
        inputs={
            "manifest": str(args.manifest),
            "mode": args.mode,
            "subjects": [r.subject_id for r in recordings],
        },
        outputs={
            "epochs": len(epochs),
            "epochs_with_failures": failed,
            **report_counts,
        },
    )
    print(
        f"analyzed {len(epochs)} windows from {len(recordings)} recordings "
        f"({failed} with failures) -> {out_dir}"
    )
    return EXIT_OK


def _auto_lag(series: TimeSeries, args: argparse.Namespace) -> tuple[int, bool]:
    if args.lag is not None:
        if args.lag < 1:
            raise ConfigError(f"--lag must be >= 1, got {args.lag}")
        return args.lag, False
    cap = min(args.mi_max_lag, len(series) - 2)
    return select_lag_first_minimum(series, cap, args.bins)


def _auto_theiler(series: TimeSeries, args: argparse.Namespace) -> tuple[int, bool]:
    if args.theiler is not None:
        if args.theiler < 0:
            raise ConfigError(f"--theiler must be >= 0, got {args.theiler}")
        return args.theiler, False
    cap = min(args.theiler_max_lag, len(series) - 1)
    return theiler_window(series, cap)


def _auto_m(series: TimeSeries, lag: int, args: argparse.Namespace) -> tuple[int, dict]:
    if args.m is not None:
        if args.m < 1:
            raise ConfigError(f"--m must be >= 1, got {args.m}")
        return args.m, {"embedding_m": args.m, "m_source": "explicit"}
    m_cap = (len(series) - 2) // lag
    m_max = min(args.m_max, m_cap)
    if m_max < 3:
        raise ConfigError(f"series too short for a dimension scan at lag {lag}; pass --m explicitly")
    profile = minimum_embedding_dimension(series, lag, m_max, args.plateau_tol, args.e2_tol)
    if profile.selected_m is None:
        m = m_max
        source = "plateau-missing-fallback-m-max"
    else:
        m = profile.selected_m
        source = "cao-plateau"
    return m, {"embedding_m": m, "m_source": source, "deterministic": profile.deterministic}


def _cmd_estimate(args: argparse.Namespace) -> int:
    series, metadata = read_signal_csv(args.input, channel=args.channel)
    params: dict = {"input": str(args.input), "n_samples": len(series), "fs": series.sample_rate_hz}
    diagnostics: dict = {}

    if args.estimator == "lag":
        lag, saturated = _auto_lag(series, args)
        value: float | int | None = int(lag)
        units = "samples"
        diagnostics["saturated"] = bool(saturated)
        params["bins"] = args.bins
    elif args.estimator == "theiler":
        w, saturated = _auto_theiler(series, args)
        value = int(w)
        units = "samples"
        diagnostics["saturated"] = bool(saturated)
    elif args.estimator == "mi":
        lag, saturated = _auto_lag(series, args)
        value = auto_mutual_information(series, lag, args.bins)
        units = "bits"
        params.update(lag=int(lag), bins=args.bins)
        diagnostics["lag_saturated"] = bool(saturated)
    elif args.estimator == "med":
        lag, _ = _auto_lag(series, args)
        m_cap = (len(series) - 2) // lag
        m_max = min(args.m_max, m_cap)
        if m_max < 3:
            raise ConfigError(f"series too short for a dimension scan at lag {lag}")
        profile = minimum_embedding_dimension(series, lag, m_max, args.plateau_tol, args.e2_tol)
        value = None if profile.selected_m is None else int(profile.selected_m)
        units = "dimensions"
        params.update(lag=int(lag), m_max=m_max, plateau_tol=args.plateau_tol)
        diagnostics.update(
            deterministic=profile.deterministic,
            e1_values=[float(v) for v in profile.e1_values],
            e2_values=[float(v) for v in profile.e2_values],
        )
    elif args.estimator in ("lle", "d2"):
        lag, _ = _auto_lag(series, args)
        w, _ = _auto_theiler(series, args)
        m, m_info = _auto_m(series, lag, args)
        vectors = delay_embed(series, EmbeddingParams(m, lag, w))
        params.update(lag=int(lag), theiler_w=int(w))
        diagnostics.update(m_info)
        if args.estimator == "lle":
            wolf = WolfParams(
                evolve_steps=args.evolve_steps,
                min_separation=args.min_separation,
                max_separation=args.max_separation,
                theiler_w=w,
                max_replacement_angle=args.max_angle,
            )
            result = largest_lyapunov_wolf(vectors, wolf)
            if args.log2:
                value = result.exponent / math.log(2.0)
                units = "bits/sample"
            else:
                value = result.exponent
                units = "nats/sample"
            diagnostics.update(
                per_second=result.exponent * series.sample_rate_hz,
                per_second_units="nats/s",
                n_renormalizations=result.n_renormalizations,
                n_replacements=result.n_replacements,
                n_evolved_samples=result.n_evolved_samples,
                low_confidence=result.low_confidence,
            )
        else:
            curve = correlation_curve(vectors, args.n_radii, w)
            estimate = correlation_dimension(curve, args.min_fit_r2)
            value = estimate.d2
            units = "dimensions"
            diagnostics.update(
                fit_range=[estimate.fit_range[0], estimate.fit_range[1]],
                fit_r2=estimate.fit_r2,
                n_pairs_in_range=estimate.n_pairs_in_range,
            )
    else:  # unreachable; argparse constrains choices
        raise ConfigError(f"unknown estimator {args.estimator!r}")

    if metadata.get("channel"):
        params["channel"] = metadata["channel"]
    print(
        json.dumps(
            {
                "estimator": args.estimator,
                "value": value,
                "units": units,
                "parameters": params,
                "diagnostics": diagnostics,
            },
            ensure_ascii=True,
        )
    )
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    parameters: dict[str, float | str] = {"fs": args.fs}
    for item in args.param:
        name, sep, raw = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"--param needs NAME=VALUE, got {item!r}")
        try:
            parameters[name] = float(raw)
        except ValueError:
            parameters[name] = raw
    spec = GeneratorSpec(
        kind=args.kind,
        n_samples=args.n,
        seed=args.seed,
        transient_skip=args.skip,
        parameters=parameters,
    )
    series = generate(spec)
    metadata = {
        "kind": spec.kind,
        "seed": str(spec.seed),
        "transient_skip": str(spec.transient_skip),
        "prng": "splitmix64-counter",
    }
    for name in sorted(spec.parameters):
        if name == "fs":
            continue
        value = spec.parameters[name]
        metadata[f"param_{name}"] = format_float(value) if isinstance(value, float) else str(value)
    write_signal_csv(args.out, series, metadata)
    print(f"wrote {len(series)} samples of {spec.kind} to {args.out}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    epochs = read_epochs_ndjson(args.epochs)
    if not epochs:
        raise InputError(f"epoch file {args.epochs} has no records")
    fingerprints = {e.config_fingerprint for e in epochs}
    if len(fingerprints) > 1:
        raise InputError(
            "epoch file mixes records from different configurations; refusing to pool them"
        )
    out_dir = Path(args.out)
    _write_reports(out_dir, epochs, next(iter(fingerprints)), args.hist_bins)
    print(f"rebuilt tables for {len(epochs)} windows -> {out_dir}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(json.dumps({"error": {"type": "input", "message": str(exc)}}), file=sys.stderr)
        return EXIT_INPUT
    except ChaosKitError as exc:
        print(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
            file=sys.stderr,
        )
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(
            json.dumps({"error": {"type": "internal", "message": f"{type(exc).__name__}: {exc}"}}),
            file=sys.stderr,
        )
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
