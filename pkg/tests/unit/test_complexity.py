"""Unit tests for real-multiplication accounting and reports."""

import json
import math

import pytest

from src.experiment.complexity import (
    fd_baseline_rms,
    optimal_fft_size,
    rm_report,
    rm_report_from_counts,
    with_fd_baseline,
)
from src.experiment.reports import rm_markdown, write_json
from src.utils.errors import EngineError


class TestRmCounts:
    """Test per-subband per-step cost accounting."""

    def test_sparse_long_haul_engine(self):
        report = rm_report_from_counts(7, 3, [3812] + [0] * 65)
        assert report.cd_rms == 16.0
        assert report.mimo_rms == pytest.approx(8.25)
        assert report.total_rms == pytest.approx(24.25)

    def test_dense_long_haul_engine(self):
        report = rm_report_from_counts(7, 3, [735] * 66)
        assert report.total_nonzero == 48510
        assert report.mimo_rms == pytest.approx(105.0)

    def test_step_rows(self):
        report = rm_report_from_counts(3, 2, [6, 3], [10.0, 5.0])
        assert [s.mimo_rms for s in report.steps] == [2.0, 1.0]
        assert report.steps[1].xi_km == 5.0
        assert report.steps[0].total_rms == pytest.approx(14.0)

    def test_needs_active_subbands(self):
        with pytest.raises(EngineError):
            rm_report_from_counts(0, 3, [1])

    def test_trained_parameters(self, micro_system, micro_params):
        report = rm_report(micro_params, micro_system.layout)
        assert report.n_steps == micro_system.layout.n_steps
        assert report.cd_rms == 4.0 * (micro_system.config.engine.cd_half_length + 1)
        assert report.total_nonzero == sum(micro_params.nonzero_per_step())


class TestFdBaseline:
    """Test the overlap-and-add FD cost model."""

    def test_optimal_size(self):
        assert fd_baseline_rms(128) == pytest.approx(97.95, abs=0.01)
        assert optimal_fft_size() == 128
        assert fd_baseline_rms(64) > fd_baseline_rms(128) < fd_baseline_rms(256)

    def test_large_transform_asymptote(self):
        n = 2**20
        assert fd_baseline_rms(n) == pytest.approx(8 * math.log2(n) + 32, rel=1e-3)

    def test_invalid_sizes(self):
        with pytest.raises(EngineError, match="exceed"):
            fd_baseline_rms(8)
        with pytest.raises(EngineError, match="power of two"):
            fd_baseline_rms(100)

    def test_attach_to_report(self):
        base = rm_report_from_counts(7, 3, [3812] + [0] * 65)
        report = with_fd_baseline(base)
        assert report.fd_fft_size == 128
        assert report.fd_rms == pytest.approx(fd_baseline_rms(128))
        assert base.fd_rms is None


class TestReports:
    """Test report serialisation."""

    def test_json(self, tmp_path):
        report = with_fd_baseline(rm_report_from_counts(7, 3, [7, 14]))
        data = json.loads(write_json(report, tmp_path / "complexity.json").read_text())
        assert data["n_active"] == 7
        assert data["fd_fft_size"] == 128
        assert len(data["steps"]) == 2

    def test_markdown(self):
        text = rm_markdown(with_fd_baseline(rm_report_from_counts(7, 3, [7, 14], [19.1, 19.1])))
        assert "| Subband TD-DBP | 16.00 | 1.50 | 17.50 |" in text
        assert "FD subband DBP (n=128)" in text
        assert "| 1 | 19.100 | 14 | 16.00 | 2.00 |" in text
