"""Unit tests for symmetric CD filters."""

import numpy as np
import pytest

from src.dbp.cd_filter import (
    CdFilter,
    apply_cd,
    design_grid,
    ideal_cd_response,
    inband_rms_error,
    ls_cd_filter,
    symmetric_response,
    truncated_cd_filter,
    unfold_taps,
)
from src.utils.errors import EngineError

SUBBAND_RATE = 24e9
BAND = 8 * 1.25 / 24


class TestCdFilter:
    """Test CD filter containers and structure."""

    def test_unfold(self):
        np.testing.assert_array_equal(unfold_taps(np.array([1, 2, 3])), [3, 2, 1, 2, 3])

    def test_half_length_and_cost(self):
        cd = CdFilter(half_taps=np.ones(4), xi_km=1.0)
        assert cd.half_length == 3
        assert cd.taps.size == 7
        assert cd.real_multiplications == 16

    def test_empty_rejected(self):
        with pytest.raises(EngineError):
            CdFilter(half_taps=np.array([]), xi_km=1.0)

    def test_folded_matches_direct(self, rng):
        x = rng.standard_normal((2, 200)) + 1j * rng.standard_normal((2, 200))
        half = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        direct = np.stack([np.convolve(row, unfold_taps(half))[3:203] for row in x])
        np.testing.assert_allclose(apply_cd(x, half), direct, atol=1e-12)

    def test_response_matches_dtft(self, rng):
        half = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        freqs = np.array([0.0, 0.1, 0.37])
        k = np.arange(-2, 3)
        dtft = np.exp(-2j * np.pi * np.outer(freqs, k)) @ unfold_taps(half)
        np.testing.assert_allclose(symmetric_response(half, freqs), dtft, atol=1e-12)


class TestDesign:
    """Test least-squares and truncated designs."""

    def test_zero_distance_is_identity(self):
        cd = ls_cd_filter(0.0, -21.7, 3, SUBBAND_RATE)
        np.testing.assert_array_equal(cd.half_taps, [1, 0, 0, 0])
        assert cd.xi_km == 0.0

    def test_least_squares_beats_truncation(self):
        ls = ls_cd_filter(19.1, -21.7, 3, SUBBAND_RATE, band=BAND)
        truncated = truncated_cd_filter(19.1, -21.7, 3, SUBBAND_RATE)
        ls_error = inband_rms_error(ls, -21.7, SUBBAND_RATE, BAND)
        assert ls_error < inband_rms_error(truncated, -21.7, SUBBAND_RATE, BAND)

    def test_longer_filters_fit_better(self):
        filters = [ls_cd_filter(19.1, -21.7, n, SUBBAND_RATE, band=BAND) for n in (1, 3, 6)]
        errors = [inband_rms_error(f, -21.7, SUBBAND_RATE, BAND) for f in filters]
        assert errors[0] > errors[1] > errors[2]

    def test_short_step_is_accurate(self):
        cd = ls_cd_filter(2.0, -21.7, 3, SUBBAND_RATE, band=BAND)
        assert inband_rms_error(cd, -21.7, SUBBAND_RATE, BAND) < 1e-2

    def test_truncated_converges_for_long_filters(self):
        cd = truncated_cd_filter(5.0, -21.7, 40, SUBBAND_RATE)
        freqs = np.linspace(0.0, 0.3, 64)
        ideal = ideal_cd_response(freqs, 5.0, -21.7, SUBBAND_RATE)
        assert np.max(np.abs(symmetric_response(cd.half_taps, freqs) - ideal)) < 1e-2

    def test_compensation_sign(self):
        response = ideal_cd_response(np.array([0.25]), 10.0, -21.7, SUBBAND_RATE)
        kappa = 0.5 * -21.7e-24 * 10.0
        expected = np.angle(np.exp(1j * kappa * (2 * np.pi * 6e9) ** 2))
        assert np.angle(response[0]) == pytest.approx(expected)

    def test_validation(self):
        with pytest.raises(EngineError):
            ls_cd_filter(10.0, -21.7, 0, SUBBAND_RATE)
        with pytest.raises(EngineError):
            design_grid(0.7)
