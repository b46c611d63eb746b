"""Unit tests for the reference backpropagation schemes."""

import numpy as np
import pytest

from src.channel.fiber import FiberParams
from src.channel.linear import COMPENSATE, angular_frequency, cd_exact, cd_response
from src.channel.ssfm import full_dbp_baseline
from src.dbp.baselines import fd_subband_dbp_baseline
from src.filterbank import FilterBankSpec, analyze, make_filter_bank, synthesize
from src.waveform.types import ComplexSignal


@pytest.fixture
def received(rng):
    """Band-limited field at 64 GHz sampling, about 0 dBm."""
    n = 2048
    spectrum = np.fft.fft(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    spectrum[np.abs(np.fft.fftfreq(n)) > 0.3] = 0.0
    samples = np.fft.ifft(spectrum)
    samples *= np.sqrt(1e-3 / np.mean(np.abs(samples) ** 2))
    return ComplexSignal(samples=samples, sample_rate=64e9)


def _peak_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def _identity_bank(rate):
    return FilterBankSpec(1, 1, 0, np.ones(1), np.ones(1), rate)


class TestFdSubbandBaseline:
    """Test the frequency-domain subband reference against its limits."""

    def test_single_subband_is_full_dbp(self, received):
        """Test one branch with no offset reproduces full-band DBP."""
        fiber = FiberParams(n_spans=2)
        bank = _identity_bank(received.sample_rate)

        rows = fd_subband_dbp_baseline(analyze(received, bank), bank, fiber, 10)
        out = synthesize(rows, bank)
        expected = full_dbp_baseline(received, fiber, 10)

        assert _peak_error(out.samples, expected.samples) < 1e-6

    def test_linear_limit_is_exact_dispersion_per_branch(self, received):
        """Test each branch sees the whole-link dispersion at its own centre frequency."""
        fiber = FiberParams(gamma_per_w_km=0.0, n_spans=2)
        bank = make_filter_bank(12, 1, 3, received.sample_rate)
        subbands = analyze(received, bank)

        out = fd_subband_dbp_baseline(subbands, bank, fiber, 4)

        omega = angular_frequency(len(subbands), subbands.sample_rate)[None, :]
        omega = omega + bank.omega(subbands.indices)[:, None]
        response = cd_response(omega, fiber.total_km, fiber.beta2_ps2_per_km, COMPENSATE)
        expected = np.fft.ifft(np.fft.fft(subbands.samples, axis=-1) * response, axis=-1)
        assert _peak_error(out.samples, expected) < 1e-9

    def test_linear_limit_single_branch_is_cd_exact(self, received):
        fiber = FiberParams(gamma_per_w_km=0.0, n_spans=3)
        bank = _identity_bank(received.sample_rate)

        out = synthesize(fd_subband_dbp_baseline(analyze(received, bank), bank, fiber, 5), bank)
        expected = cd_exact(received, fiber.total_km, fiber.beta2_ps2_per_km, COMPENSATE)

        assert _peak_error(out.samples, expected.samples) < 1e-9

    def test_subbands_keep_their_metadata(self, received):
        bank = make_filter_bank(12, 1, 3, received.sample_rate)
        subbands = analyze(received, bank)
        out = fd_subband_dbp_baseline(subbands, bank, FiberParams(n_spans=1), 2)
        np.testing.assert_array_equal(out.indices, subbands.indices)
        assert out.samples.shape == subbands.samples.shape
        assert out.full_length == subbands.full_length
