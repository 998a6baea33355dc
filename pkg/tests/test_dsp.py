"""Time-frequency core against brute-force oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engineid import dsp
from engineid.errors import FilterbankError, LogFreqRangeError

from conftest import SR, click_track, sine


def naive_dft_magnitude(frame):
    """O(n^2) DFT magnitude for bins 0..n/2 — the STFT oracle."""
    n = len(frame)
    bins = n // 2 + 1
    out = np.zeros(bins)
    for k in range(bins):
        angles = -2.0 * np.pi * k * np.arange(n) / n
        out[k] = abs(np.sum(frame * (np.cos(angles) + 1j * np.sin(angles))))
    return out


def naive_dct_ii(x, n_out):
    """O(n^2) orthonormal type-II DCT — the DCT oracle."""
    n = len(x)
    out = np.zeros(n_out)
    for k in range(n_out):
        s = 0.0
        for i in range(n):
            s += x[i] * np.cos(np.pi * k * (2 * i + 1) / (2 * n))
        scale = np.sqrt(1.0 / n) if k == 0 else np.sqrt(2.0 / n)
        out[k] = scale * s
    return out


class TestFraming:
    def test_centered_frame_count_4096(self):
        frames = dsp.frame_signal(np.zeros(4096), dsp.FrameGrid(2048, 512))
        assert frames.shape == (9, 2048)  # 1 + 4096 // 512

    def test_short_signal_padded_to_one_frame(self):
        frames = dsp.frame_signal(np.ones(100), dsp.FrameGrid(2048, 512))
        assert frames.shape == (1, 2048)

    def test_constant_signal_constant_frames(self):
        frames = dsp.frame_signal(np.full(3000, 0.25), dsp.FrameGrid(2048, 512))
        assert np.allclose(frames, 0.25)

    def test_frame_k_centered_at_k_hop(self):
        x = np.arange(5000, dtype=float)
        grid = dsp.FrameGrid(2048, 512)
        frames = dsp.frame_signal(x, grid)
        # interior frame: center sample of frame k is x[k * hop]
        assert frames[4][1024] == x[4 * 512]


class TestStft:
    def test_pure_sine_argmax_bin(self):
        spec = dsp.stft(sine(1000.0, duration=0.2), dsp.FrameGrid(2048, 512))
        # interior frames; the first/last are reflect-padded partial tones
        assert np.all(np.argmax(spec.bins[:, 1:-1], axis=0) == 46)
        # round(1000 * 2048 / 44100) == 46

    def test_zero_signal_zero_spectrogram(self):
        spec = dsp.stft(np.zeros(4096))
        assert np.all(spec.bins == 0)

    def test_parseval_rectangular_one_frame(self):
        rng = np.random.default_rng(5)
        n = 2048
        x = rng.standard_normal(n)
        grid = dsp.FrameGrid(n, n, window="rect", center=False)
        spec = dsp.stft(x, grid)
        assert spec.bins.shape[1] == 1
        half = spec.bins[:, 0] ** 2
        # reconstruct full symmetric spectrum energy from the half spectrum
        full = half[0] + 2 * np.sum(half[1:-1]) + half[-1]
        assert np.isclose(full, n * np.sum(x**2), rtol=1e-10)

    def test_matches_naive_dft_oracle(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(-1, 1, 4096)
        grid = dsp.FrameGrid(1024, 256)
        spec = dsp.stft(x, grid)
        frames = dsp.frame_signal(x, grid)
        window = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(1024) / 1024)
        for t in (0, 3, spec.bins.shape[1] - 1):
            oracle = naive_dft_magnitude(frames[t] * window)
            assert np.max(np.abs(spec.bins[:, t] - oracle)) < 1e-6

    def test_bin_frequencies(self):
        spec = dsp.stft(np.zeros(2048), dsp.FrameGrid(2048, 512))
        assert spec.bin_frequencies[1] == pytest.approx(44100 / 2048)
        assert len(spec.bin_frequencies) == 1025


class TestPower:
    def test_square_and_kind_flip(self):
        spec = dsp.stft(sine(500.0, 0.1))
        p = dsp.power(spec)
        assert p.kind == "power"
        assert np.allclose(p.bins, spec.bins**2)

    def test_power_of_power_rejected(self):
        p = dsp.power(dsp.stft(np.zeros(2048)))
        with pytest.raises(ValueError):
            dsp.power(p)


class TestMel:
    def test_mel_of_700(self):
        assert dsp.hz_to_mel(700.0) == pytest.approx(2595 * np.log10(2), abs=1e-9)

    def test_mel_of_zero(self):
        assert dsp.hz_to_mel(0.0) == 0.0

    def test_rows_nonnegative_with_positive_entry(self):
        fb = dsp.mel_filterbank(128, 1025, SR)
        assert np.all(fb >= 0)
        assert np.all((fb > 0).any(axis=1))

    def test_round_trip_scale(self):
        freqs = np.array([100.0, 1000.0, 8000.0])
        assert np.allclose(dsp.mel_to_hz(dsp.hz_to_mel(freqs)), freqs)

    def test_collapsed_band_raises(self):
        # 600 filters over a tiny band: adjacent centers fall between FFT bins.
        with pytest.raises(FilterbankError):
            dsp.mel_filterbank(600, 1025, SR, f_min=100.0, f_max=200.0)


class TestDct:
    def test_constant_input_dc_only(self):
        out = dsp.dct_ii(np.ones(4))
        assert out[0] == pytest.approx(2.0)  # sqrt(4) * mean
        assert np.allclose(out[1:], 0.0, atol=1e-12)

    def test_orthonormal_preserves_l2_norm(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(32)
        assert np.linalg.norm(dsp.dct_ii(x)) == pytest.approx(np.linalg.norm(x))

    def test_matches_naive_cosine_sum(self):
        rng = np.random.default_rng(13)
        x = rng.standard_normal(8)
        assert np.max(np.abs(dsp.dct_ii(x) - naive_dct_ii(x, 8))) < 1e-10

    def test_inverse_is_identity(self):
        rng = np.random.default_rng(17)
        x = rng.standard_normal(40)
        assert np.max(np.abs(dsp.idct_ii(dsp.dct_ii(x)) - x)) < 1e-9

    @given(st.integers(min_value=2, max_value=64), st.integers(min_value=0))
    @settings(max_examples=25, deadline=None)
    def test_oracle_property(self, n, seed):
        x = np.random.default_rng(seed).standard_normal(n)
        assert np.max(np.abs(dsp.dct_ii(x) - naive_dct_ii(x, n))) < 1e-10


class TestLogFreq:
    def centers(self):
        return dsp.log_freq_centers(32.70319566257483, 12, 84)

    def test_tone_at_center_argmax(self):
        centers = self.centers()
        k = 45  # 440 Hz exactly
        assert centers[k] == pytest.approx(440.0, rel=1e-9)
        spec = dsp.power(dsp.stft(sine(centers[k], 0.3)))
        logspec = dsp.log_freq_spectrogram(spec)
        assert np.all(np.argmax(logspec.bins[:, 1:-1], axis=0) == k)

    def test_octave_doubling_shifts_by_bins_per_octave(self):
        centers = self.centers()
        lo = dsp.log_freq_spectrogram(dsp.power(dsp.stft(sine(centers[57], 0.3))))
        hi = dsp.log_freq_spectrogram(dsp.power(dsp.stft(sine(centers[69], 0.3))))
        shift = (np.argmax(hi.bins[:, 1:-1], axis=0)
                 - np.argmax(lo.bins[:, 1:-1], axis=0))
        assert np.all(shift == 12)

    def test_zero_spectrum_zero_output(self):
        out = dsp.log_freq_spectrogram(dsp.power(dsp.stft(np.zeros(4096))))
        assert np.all(out.bins == 0)

    def test_nyquist_overflow_raises(self):
        spec = dsp.power(dsp.stft(np.zeros(2048)))
        with pytest.raises(LogFreqRangeError):
            dsp.log_freq_spectrogram(spec, 12, 32.70319566257483, 120)


class TestOnset:
    def test_stationary_spectrum_zero_envelope(self):
        mel_db = np.tile(np.linspace(-80.0, 0.0, 128)[:, None], (1, 30))
        env = dsp.onset_strength(mel_db, frame_rate=86.0)
        assert np.all(env.strength == 0.0)

    def test_single_loud_frame_single_peak(self):
        mel_db = np.full((128, 20), -100.0)
        mel_db[:, 10] = 0.0
        env = dsp.onset_strength(mel_db, frame_rate=86.0)
        assert np.argmax(env.strength) == 10
        positive = np.flatnonzero(env.strength > 1.0)
        assert list(positive) == [10]

    def test_click_train_peak_spacing(self):
        env = dsp.onset_envelope(click_track(120.0, duration=8.0))
        fr = env.frame_rate
        strength = env.strength
        peaks = [
            t for t in range(1, len(strength) - 1)
            if strength[t] > 0.5 * strength.max()
            and strength[t] >= strength[t - 1] and strength[t] >= strength[t + 1]
        ]
        spacing = np.diff(peaks)
        expected = fr / 2.0  # 2 clicks per second
        assert np.all(np.abs(spacing - expected) <= 2.0)


class TestTempo:
    @pytest.mark.parametrize("bpm", [60.0, 120.0, 180.0])
    def test_click_track_recovered_within_one_lag(self, bpm):
        env = dsp.onset_envelope(click_track(bpm, duration=10.0))
        est = dsp.estimate_tempo(env)
        assert not est.defaulted
        true_lag = 60.0 * env.frame_rate / bpm
        assert abs(est.lag - true_lag) <= 1.0
        low = 60.0 * env.frame_rate / (true_lag + 1)
        high = 60.0 * env.frame_rate / max(true_lag - 1, 1)
        assert low <= est.bpm <= high

    def test_silence_falls_back_to_120(self):
        env = dsp.onset_envelope(np.zeros(SR))
        est = dsp.estimate_tempo(env)
        assert est.defaulted
        assert est.bpm == 120.0

    def test_output_always_in_band(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            strength = np.abs(rng.standard_normal(rng.integers(2, 400)))
            est = dsp.estimate_tempo(dsp.OnsetEnvelope(strength, 86.13))
            assert (30.0 <= est.bpm <= 300.0) or (est.defaulted and est.bpm == 120.0)

    def test_autocorrelation_matches_direct_oracle(self):
        rng = np.random.default_rng(29)
        x = rng.standard_normal(200)
        r = dsp.autocorrelate(x, max_lag=50)
        oracle = np.array([np.sum(x[: 200 - lag] * x[lag:]) for lag in range(50)])
        assert np.allclose(r, oracle, atol=1e-9)
