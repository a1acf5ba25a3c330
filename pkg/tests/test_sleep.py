"""Epoching, per-cell concatenation, and the per-window index pipeline."""

import numpy as np
import pytest

from chaoskit.errors import ConfigError, InputError
from chaoskit.generators import GeneratorSpec, generate
from chaoskit.series import TimeSeries
from chaoskit.sleep import (
    EstimatorConfig,
    Group,
    Recording,
    SCORED_STAGES,
    SleepStage,
    analyze_recordings,
    compute_epoch_indices,
    concatenate_by_stage,
    epoch_split,
    parse_group,
    parse_stage_token,
    samples_per_epoch,
    stage_token,
)

_CYCLE = (
    SleepStage.WAKE,
    SleepStage.REM,
    SleepStage.S1,
    SleepStage.S2,
    SleepStage.S3,
    SleepStage.S4,
)


def make_recording(subject_id, group, kind, seed, n_epochs=6, fs=10.0):
    n = samples_per_epoch(fs) * n_epochs
    if kind == "sine":
        spec = GeneratorSpec(
            "sine", n, seed=seed, parameters={"freq_hz": 0.31, "noise_std": 0.05, "fs": fs}
        )
    else:
        spec = GeneratorSpec(
            "logistic", n, seed=seed, transient_skip=100, parameters={"r": 4.0, "fs": fs}
        )
    hypnogram = tuple(_CYCLE[k % len(_CYCLE)] for k in range(n_epochs))
    return Recording(subject_id=subject_id, group=group, series=generate(spec), hypnogram=hypnogram)


# Logistic windows at this length need an explicit neighbour ceiling;
# the default fraction-of-extent bound is tighter than the attractor's
# point spacing in four dimensions.
PIPELINE_CONFIG = EstimatorConfig(max_separation=0.7)


class TestStagesAndGroups:
    def test_stage_tokens_round_trip(self):
        for stage in SleepStage:
            assert parse_stage_token(stage_token(stage)) is stage

    def test_tokens(self):
        assert parse_stage_token("W") is SleepStage.WAKE
        assert parse_stage_token(" 2 ") is SleepStage.S2
        assert parse_stage_token("R") is SleepStage.REM
        assert parse_stage_token("movement") is SleepStage.UNKNOWN
        assert stage_token(SleepStage.UNKNOWN) == "?"

    def test_group_parsing(self):
        assert parse_group("Healthy") is Group.HEALTHY
        assert parse_group(" apnea ") is Group.APNEA
        with pytest.raises(InputError):
            parse_group("control")


class TestEpoching:
    def test_samples_per_epoch(self):
        assert samples_per_epoch(100.0) == 3000
        assert samples_per_epoch(128.0) == 3840
        assert samples_per_epoch(0.5) == 15

    def test_samples_per_epoch_rejects_fractional(self):
        with pytest.raises(ConfigError):
            samples_per_epoch(33.34)

    def test_split_drops_trailing_partial(self):
        fs = 100.0
        x = np.sin(np.arange(6999) * 0.01)
        rec = Recording(
            subject_id="s1",
            group=Group.HEALTHY,
            series=TimeSeries(x, fs),
            hypnogram=(SleepStage.WAKE, SleepStage.S2),
        )
        windows = epoch_split(rec)
        assert len(windows) == 2
        assert [w.epoch_index for w in windows] == [0, 1]
        assert [w.stage for w in windows] == [SleepStage.WAKE, SleepStage.S2]
        np.testing.assert_array_equal(windows[0].window.samples, x[:3000])
        np.testing.assert_array_equal(windows[1].window.samples, x[3000:6000])

    def test_hypnogram_length_must_match(self):
        with pytest.raises(InputError):
            Recording(
                subject_id="s1",
                group=Group.HEALTHY,
                series=TimeSeries(np.sin(np.arange(6000) * 0.01), 100.0),
                hypnogram=(SleepStage.WAKE,),
            )

    def test_subject_id_required(self):
        with pytest.raises(InputError):
            Recording(
                subject_id="",
                group=Group.HEALTHY,
                series=TimeSeries(np.sin(np.arange(3000) * 0.01), 100.0),
                hypnogram=(SleepStage.WAKE,),
            )


class TestConcatenation:
    def test_cells_and_order(self):
        a = make_recording("h1", Group.HEALTHY, "sine", seed=1)
        b = make_recording("h2", Group.HEALTHY, "sine", seed=2)
        c = make_recording("a1", Group.APNEA, "logistic", seed=3)
        cells = concatenate_by_stage([a, b, c])
        assert len(cells) == 12
        wake = cells[(Group.HEALTHY, SleepStage.WAKE)]
        spe = samples_per_epoch(10.0)
        # Subject order is preserved: first a's wake epoch, then b's.
        np.testing.assert_array_equal(wake.samples[:spe], epoch_split(a)[0].window.samples)
        np.testing.assert_array_equal(wake.samples[spe:], epoch_split(b)[0].window.samples)

    def test_sample_conservation(self):
        recs = [
            make_recording("h1", Group.HEALTHY, "sine", seed=1),
            make_recording("a1", Group.APNEA, "logistic", seed=3),
        ]
        cells = concatenate_by_stage(recs)
        total = sum(len(s) for s in cells.values())
        assert total == sum(len(r.series) for r in recs)

    def test_unknown_epochs_left_out(self):
        fs = 10.0
        spe = samples_per_epoch(fs)
        x = np.sin(np.arange(3 * spe) * 0.05) + 0.01 * np.arange(3 * spe)
        rec = Recording(
            subject_id="s1",
            group=Group.APNEA,
            series=TimeSeries(x, fs),
            hypnogram=(SleepStage.WAKE, SleepStage.UNKNOWN, SleepStage.WAKE),
        )
        cells = concatenate_by_stage([rec])
        assert set(cells) == {(Group.APNEA, SleepStage.WAKE)}
        assert len(cells[(Group.APNEA, SleepStage.WAKE)]) == 2 * spe

    def test_mixed_rates_in_one_cell_refused(self):
        fast = make_recording("h1", Group.HEALTHY, "sine", seed=1, fs=10.0)
        slow = make_recording("h2", Group.HEALTHY, "sine", seed=2, fs=5.0)
        with pytest.raises(ConfigError, match="mixed sampling rates"):
            concatenate_by_stage([fast, slow])

    def test_different_rates_in_different_cells_allowed(self):
        healthy = make_recording("h1", Group.HEALTHY, "sine", seed=1, fs=10.0)
        apnea = make_recording("a1", Group.APNEA, "logistic", seed=3, fs=5.0)
        cells = concatenate_by_stage([healthy, apnea])
        assert cells[(Group.HEALTHY, SleepStage.WAKE)].sample_rate_hz == 10.0
        assert cells[(Group.APNEA, SleepStage.WAKE)].sample_rate_hz == 5.0


class TestEstimatorConfig:
    def test_fingerprint_is_stable(self):
        assert EstimatorConfig().fingerprint() == EstimatorConfig().fingerprint()
        assert len(EstimatorConfig().fingerprint()) == 64

    def test_fingerprint_tracks_every_knob(self):
        base = EstimatorConfig().fingerprint()
        assert EstimatorConfig(bins=17).fingerprint() != base
        assert EstimatorConfig(max_separation=0.7).fingerprint() != base
        assert EstimatorConfig(min_fit_r2=0.97).fingerprint() != base


class TestComputeEpochIndices:
    def test_chaotic_window_full_report(self, logistic_20k):
        window = TimeSeries(logistic_20k.samples[:3000], 100.0)
        result = compute_epoch_indices(
            window,
            PIPELINE_CONFIG,
            subject_id="a1",
            group=Group.APNEA,
            stage=SleepStage.S2,
            epoch_index=4,
        )
        assert result.failures == {}
        assert not result.failed
        assert result.lle is not None and result.lle > 0
        assert result.mi is not None and result.mi > 0
        assert result.med is not None and 2 <= result.med <= 8
        # At the autoMI-selected delay the map's iterates decorrelate,
        # so the cloud genuinely fills dimensions; D2 is only bounded by
        # the embedding, not by the map's own dimension.
        assert result.d2 is not None and 0 < result.d2 <= result.embed_m + 0.5
        assert result.deterministic is True
        assert result.embed_m == result.med
        assert result.mi_lag is not None and result.mi_lag >= 1
        assert result.theiler_w is not None and result.theiler_w >= 1
        assert result.lle_units == "nats/s"
        assert result.subject_id == "a1"
        assert result.epoch_index == 4
        assert result.config_fingerprint == PIPELINE_CONFIG.fingerprint()

    def test_lle_scales_with_sample_rate(self, logistic_20k):
        # Same samples, rates a decade apart: identical walk, exponent
        # reported per second.
        slow = compute_epoch_indices(TimeSeries(logistic_20k.samples[:3000], 10.0), PIPELINE_CONFIG)
        fast = compute_epoch_indices(TimeSeries(logistic_20k.samples[:3000], 100.0), PIPELINE_CONFIG)
        assert fast.lle == pytest.approx(10.0 * slow.lle, rel=1e-12)

    def test_noise_window_not_deterministic(self, noise_10k):
        window = TimeSeries(noise_10k.samples[:3000], 100.0)
        result = compute_epoch_indices(window, subject_id="n1")
        assert result.deterministic is False
        assert result.med is None
        assert "med" in result.failures
        assert result.embed_m == 8  # fallback: embed at the scanned cap
        assert result.mi is not None
        assert result.theiler_w is not None

    def test_constant_window_fails_everything(self):
        window = TimeSeries(np.full(3000, 2.5), 100.0)
        result = compute_epoch_indices(window, subject_id="c1")
        assert set(result.failures) == {"lle", "mi", "med", "d2"}
        assert result.failed
        assert result.lle is None
        assert result.mi is None
        assert result.med is None
        assert result.d2 is None
        assert result.config_fingerprint == EstimatorConfig().fingerprint()

    def test_failures_do_not_raise(self):
        # A window too short for the dimension scan must still report
        # what it can.
        window = TimeSeries(np.sin(np.arange(60) * 0.7), 2.0)
        result = compute_epoch_indices(window)
        assert isinstance(result.failures, dict)


@pytest.fixture(scope="module")
def cohort():
    return [
        make_recording("h1", Group.HEALTHY, "sine", seed=31),
        make_recording("a1", Group.APNEA, "logistic", seed=32),
    ]


class TestAnalyzeRecordings:
    def test_per_epoch_order_and_count(self, cohort):
        results = analyze_recordings(cohort, PIPELINE_CONFIG)
        assert len(results) == 12
        assert [r.subject_id for r in results] == ["h1"] * 6 + ["a1"] * 6
        assert [r.epoch_index for r in results] == list(range(6)) * 2
        assert [r.stage for r in results] == list(_CYCLE) * 2

    def test_parallel_matches_serial(self, cohort):
        serial = analyze_recordings(cohort, PIPELINE_CONFIG, jobs=1)
        parallel = analyze_recordings(cohort, PIPELINE_CONFIG, jobs=3)
        assert serial == parallel

    def test_per_stage_concat_cells(self, cohort):
        results = analyze_recordings(cohort, PIPELINE_CONFIG, mode="per-stage-concat")
        assert len(results) == 12
        assert {r.subject_id for r in results} == {
            f"concat-{g.value}-{s.value}" for g in Group for s in SCORED_STAGES
        }
        assert all(r.epoch_index == 0 for r in results)
        # Healthy cells first (enum order), stages in scored order.
        assert results[0].subject_id == "concat-Healthy-Wake"
        assert results[6].subject_id == "concat-Apnea-Wake"

    def test_unknown_mode_rejected(self, cohort):
        with pytest.raises(ConfigError):
            analyze_recordings(cohort, mode="per-subject")

    def test_bad_jobs_rejected(self, cohort):
        with pytest.raises(ConfigError):
            analyze_recordings(cohort, jobs=0)
