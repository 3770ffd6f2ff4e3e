"""Tests for the latency benchmark."""

import json

import numpy as np
import pytest

from vpr_consensus.core.bench import Benchmarker, bench
from vpr_consensus.errors import ValidationError
from vpr_consensus.export.report_exporter import ReportExporter
from vpr_consensus.models.config import BenchConfig


@pytest.fixture
def small_report():
    benchmarker = Benchmarker(BenchConfig(n_refs=[40, 80], reps=3, queries=15, seq_len=3))
    return benchmarker, benchmarker.run()


def test_outputs_are_identical_across_repetitions(small_report):
    benchmarker, _ = small_report
    for outputs in benchmarker.outputs.values():
        assert len(outputs) == 3
        for refs in outputs[1:]:
            assert np.array_equal(outputs[0], refs)


def test_entries_and_fit(small_report):
    _, report = small_report
    assert [e.n_refs for e in report.entries] == [40, 80]
    for entry in report.entries:
        assert entry.queries == 15
        assert entry.prediction.mean_ms >= 0.0
        assert entry.sequence.p99_ms >= entry.sequence.median_ms >= 0.0
        assert entry.combined_mean_ms == entry.prediction.mean_ms + entry.sequence.mean_ms
    assert np.isfinite(report.slope_ms_per_ref)
    assert report.platform['platform'] in ('macos', 'windows', 'linux', 'unknown')


def test_parallel_sizes_keep_order():
    report = Benchmarker(BenchConfig(n_refs=[30, 60, 90], reps=3, queries=10, max_workers=3)).run()
    assert [e.n_refs for e in report.entries] == [30, 60, 90]


def test_bad_settings_are_rejected():
    with pytest.raises(ValidationError):
        Benchmarker(BenchConfig(reps=2))
    with pytest.raises(ValidationError):
        Benchmarker(BenchConfig(n_refs=[]))


def test_largest_database_stays_real_time():
    report = bench(n_refs=[1800], reps=3, queries=30, seq_len=3)
    assert report.entries[0].combined_mean_ms < 20.0


def test_export_writes_json_and_csv(tmp_path, small_report):
    _, report = small_report
    ReportExporter().export_bench(report, tmp_path / "bench.json", tmp_path / "bench.csv")
    data = json.loads((tmp_path / "bench.json").read_text())
    assert data['reps'] == 3
    assert set(data['linear_fit']) == {'slope_ms_per_ref', 'intercept_ms', 'r_squared'}
    lines = (tmp_path / "bench.csv").read_text().strip().splitlines()
    assert lines[0].startswith('n_refs,queries,prediction_mean_ms')
    assert len(lines) == 3


@pytest.mark.slow
def test_latency_grows_linearly_with_database_size():
    report = bench(n_refs=[200, 600, 1000, 1400, 1800], reps=3, queries=200, seq_len=3)
    assert report.slope_ms_per_ref > 0.0
    assert report.r_squared >= 0.9
