"""Shared time-frequency machinery.

Framing, STFT, mel filterbanks, DCT, log-frequency (pseudo-constant-Q)
spectra, onset strength and autocorrelation tempo estimation.  All features
in :mod:`engineid.features` are built on these primitives, with one shared
frame grid (2048-sample Hann frames, 512-sample hop, reflect-centered).

Numerical conventions used throughout:

* magnitude spectra are |rfft| of the windowed frame, power = magnitude**2;
* decibels are 10*log10(power + 1e-10), so silence stays finite;
* the mel scale is 2595*log10(1 + f/700).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FilterbankError, LogFreqRangeError

DB_EPS = 1e-10

TEMPO_BPM_MIN = 30.0
TEMPO_BPM_MAX = 300.0
TEMPO_FALLBACK_BPM = 120.0


@dataclass(frozen=True)
class FrameGrid:
    """Framing parameters shared by every spectral computation."""

    frame_length: int = 2048
    hop_length: int = 512
    window: str = "hann"
    center: bool = True

    def __post_init__(self):
        if not 0 < self.hop_length <= self.frame_length:
            raise ValueError("require 0 < hop_length <= frame_length")
        if self.window not in ("hann", "rect"):
            raise ValueError(f"unknown window kind: {self.window}")

    def n_frames(self, n_samples: int) -> int:
        if self.center:
            return 1 + n_samples // self.hop_length
        if n_samples < self.frame_length:
            return 1
        return 1 + (n_samples - self.frame_length) // self.hop_length

    def frame_rate(self, sample_rate: int) -> float:
        return sample_rate / self.hop_length


DEFAULT_GRID = FrameGrid()


@dataclass(frozen=True)
class Spectrogram:
    """Nonnegative time-frequency matrix, frequency bins along axis 0."""

    bins: np.ndarray
    kind: str  # "magnitude" | "power"
    bin_frequencies: np.ndarray
    grid: FrameGrid

    @property
    def n_frames(self) -> int:
        return self.bins.shape[1]


@dataclass(frozen=True)
class OnsetEnvelope:
    """Per-frame onset strength and the frame rate it was sampled at."""

    strength: np.ndarray
    frame_rate: float


@dataclass(frozen=True)
class TempoEstimate:
    bpm: float
    defaulted: bool
    lag: int | None = None
    frame_rate: float = field(default=0.0)


def make_window(kind: str, length: int) -> np.ndarray:
    if kind == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)
    if kind == "rect":
        return np.ones(length)
    raise ValueError(f"unknown window kind: {kind}")


def _reflect_indices(positions: np.ndarray, n: int) -> np.ndarray:
    """Reflection-extend sample indices (mirror about the endpoints, which
    are not repeated).  Works for arbitrarily large padding, unlike np.pad
    on short signals.
    """
    if n == 1:
        return np.zeros_like(positions)
    period = 2 * (n - 1)
    p = np.mod(positions, period)
    return np.where(p >= n, period - p, p)


def frame_signal(samples: np.ndarray, grid: FrameGrid = DEFAULT_GRID) -> np.ndarray:
    """Slice a signal into frames, shape [n_frames, frame_length].

    With centering, frame k is centered on sample k*hop_length and edges are
    reflect-padded; short signals always yield at least one frame.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot frame an empty signal")
    n = len(x)
    n_frames = grid.n_frames(n)
    offsets = np.arange(n_frames) * grid.hop_length
    if grid.center:
        start = offsets - grid.frame_length // 2
    else:
        start = offsets
    idx = start[:, None] + np.arange(grid.frame_length)[None, :]
    if grid.center or n < grid.frame_length:
        idx = _reflect_indices(idx, n)
    return x[idx]


def stft(samples: np.ndarray, grid: FrameGrid = DEFAULT_GRID,
         sample_rate: int = 44100) -> Spectrogram:
    """Magnitude STFT; bin k sits at k * sample_rate / frame_length Hz."""
    frames = frame_signal(samples, grid)
    window = make_window(grid.window, grid.frame_length)
    spec = np.abs(np.fft.rfft(frames * window, axis=1)).T
    freqs = np.arange(spec.shape[0]) * (sample_rate / grid.frame_length)
    return Spectrogram(bins=spec, kind="magnitude", bin_frequencies=freqs, grid=grid)


def power(spec: Spectrogram) -> Spectrogram:
    """Elementwise square of a magnitude spectrogram."""
    if spec.kind != "magnitude":
        raise ValueError("power() expects a magnitude spectrogram")
    return Spectrogram(
        bins=spec.bins**2,
        kind="power",
        bin_frequencies=spec.bin_frequencies,
        grid=spec.grid,
    )


def power_to_db(power_bins: np.ndarray, eps: float = DB_EPS) -> np.ndarray:
    return 10.0 * np.log10(power_bins + eps)


# -- mel scale ---------------------------------------------------------------

def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft_bins: int, sample_rate: int,
                   f_min: float = 0.0, f_max: float | None = None,
                   normalize: bool = True) -> np.ndarray:
    """Triangular mel filters evaluated on the FFT bin grid, [n_mels, n_fft_bins].

    Centers are uniform in mel between f_min and f_max.  With normalize=True
    each row is divided by its bandwidth in Hz (area normalization); with
    normalize=False the triangles are left unnormalized, peaking at 1.
    """
    if n_mels < 1:
        raise FilterbankError("n_mels must be >= 1")
    if f_max is None:
        f_max = sample_rate / 2.0
    if not 0.0 <= f_min < f_max <= sample_rate / 2.0:
        raise FilterbankError("require 0 <= f_min < f_max <= sr/2")

    frame_length = 2 * (n_fft_bins - 1)
    bin_freqs = np.arange(n_fft_bins) * (sample_rate / frame_length)
    edges = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2))

    fb = np.zeros((n_mels, n_fft_bins))
    for m in range(n_mels):
        lo, center, hi = edges[m], edges[m + 1], edges[m + 2]
        if hi - lo <= 0 or center - lo <= 0 or hi - center <= 0:
            raise FilterbankError(f"mel band {m} has collapsed edges")
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        fb[m] = np.maximum(0.0, np.minimum(rising, falling))
        if not np.any(fb[m] > 0):
            raise FilterbankError(
                f"mel band {m}: no FFT bin falls inside [{lo:.2f}, {hi:.2f}] Hz"
            )
        if normalize:
            fb[m] /= hi - lo
    return fb


# -- DCT ---------------------------------------------------------------------

def dct_ii_matrix(n_out: int, n_in: int, orthonormal: bool = True) -> np.ndarray:
    """Type-II DCT as an [n_out, n_in] matrix."""
    k = np.arange(n_out)[:, None]
    n = np.arange(n_in)[None, :]
    mat = 2.0 * np.cos(np.pi * k * (2 * n + 1) / (2.0 * n_in))
    if orthonormal:
        mat[0] *= np.sqrt(1.0 / (4.0 * n_in))
        mat[1:] *= np.sqrt(1.0 / (2.0 * n_in))
    return mat


def dct_ii(vector: np.ndarray, n_out: int | None = None,
           orthonormal: bool = True) -> np.ndarray:
    x = np.asarray(vector, dtype=np.float64)
    if x.size == 0:
        raise ValueError("dct_ii of empty input")
    if n_out is None:
        n_out = len(x)
    if n_out > len(x):
        raise ValueError("n_out exceeds input length")
    return dct_ii_matrix(n_out, len(x), orthonormal) @ x


def idct_ii(coeffs: np.ndarray, n_out: int | None = None) -> np.ndarray:
    """Inverse of the orthonormal type-II DCT (i.e. orthonormal DCT-III)."""
    c = np.asarray(coeffs, dtype=np.float64)
    if n_out is None:
        n_out = len(c)
    return dct_ii_matrix(len(c), n_out, orthonormal=True).T @ c


# -- log-frequency (pseudo-constant-Q) projection ------------------------------

def log_freq_centers(f_min: float, bins_per_octave: int, n_bins: int) -> np.ndarray:
    return f_min * 2.0 ** (np.arange(n_bins) / bins_per_octave)


def log_freq_spectrogram(spec: Spectrogram, bins_per_octave: int = 12,
                         f_min: float = 32.70319566257483,
                         n_bins: int = 84,
                         sample_rate: int = 44100) -> Spectrogram:
    """Project a power STFT onto geometrically spaced centers by triangles.

    This is a pseudo-CQT: a log-frequency reading of the STFT rather than a
    true constant-Q kernel transform.
    """
    if spec.kind != "power":
        raise ValueError("log_freq_spectrogram expects a power spectrogram")
    if f_min < 20.0:
        raise ValueError("f_min must be >= 20 Hz")
    centers = log_freq_centers(f_min, bins_per_octave, n_bins + 1)
    if centers[-1] > sample_rate / 2.0:
        raise LogFreqRangeError(
            f"top band edge {centers[-1]:.1f} Hz exceeds Nyquist "
            f"{sample_rate / 2.0:.1f} Hz"
        )
    bin_freqs = spec.bin_frequencies
    lower = centers[0] / 2.0 ** (1.0 / bins_per_octave)
    edges = np.concatenate(([lower], centers))  # edges[k] .. edges[k+2] per band
    fb = np.zeros((n_bins, len(bin_freqs)))
    for k in range(n_bins):
        lo, center, hi = edges[k], edges[k + 1], edges[k + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        fb[k] = np.maximum(0.0, np.minimum(rising, falling))
    return Spectrogram(
        bins=fb @ spec.bins,
        kind="power",
        bin_frequencies=centers[:-1],
        grid=spec.grid,
    )


# -- onset strength and tempo --------------------------------------------------

def onset_strength(mel_db: np.ndarray, frame_rate: float) -> OnsetEnvelope:
    """Mean over mel bands of the half-wave-rectified frame-to-frame dB increase."""
    diff = np.maximum(0.0, mel_db[:, 1:] - mel_db[:, :-1])
    strength = np.concatenate(([0.0], diff.mean(axis=0)))
    return OnsetEnvelope(strength=strength, frame_rate=frame_rate)


def onset_envelope(samples: np.ndarray, grid: FrameGrid = DEFAULT_GRID,
                   sample_rate: int = 44100, n_mels: int = 128) -> OnsetEnvelope:
    """Onset strength of a raw signal via the dB mel spectrogram."""
    spec = power(stft(samples, grid, sample_rate))
    fb = mel_filterbank(n_mels, spec.bins.shape[0], sample_rate)
    mel_db = power_to_db(fb @ spec.bins)
    return onset_strength(mel_db, grid.frame_rate(sample_rate))


def autocorrelate(x: np.ndarray, max_lag: int | None = None) -> np.ndarray:
    """Linear autocorrelation r[l] = sum_t x[t] x[t+l], computed via FFT."""
    n = len(x)
    if max_lag is None:
        max_lag = n
    size = 1
    while size < 2 * n:
        size *= 2
    spectrum = np.fft.rfft(x, n=size)
    r = np.fft.irfft(spectrum * np.conj(spectrum), n=size)
    return r[:max_lag]


def estimate_tempo(envelope: OnsetEnvelope,
                   bpm_min: float = TEMPO_BPM_MIN,
                   bpm_max: float = TEMPO_BPM_MAX,
                   fallback: float = TEMPO_FALLBACK_BPM) -> TempoEstimate:
    """Tempo from the autocorrelation argmax of the mean-removed envelope.

    Searches lags corresponding to [bpm_min, bpm_max]; degenerate envelopes
    (silence, too short, no positive peak) return the fallback tempo with the
    defaulted flag set.
    """
    strength = envelope.strength
    fr = envelope.frame_rate
    if len(strength) < 2 or not np.any(strength > 0):
        return TempoEstimate(fallback, defaulted=True, frame_rate=fr)

    lag_min = max(1, int(np.ceil(60.0 * fr / bpm_max)))
    lag_max = min(len(strength) - 1, int(np.floor(60.0 * fr / bpm_min)))
    if lag_min > lag_max:
        return TempoEstimate(fallback, defaulted=True, frame_rate=fr)

    x = strength - strength.mean()
    r = autocorrelate(x, max_lag=lag_max + 1)
    window = r[lag_min : lag_max + 1]
    best = int(np.argmax(window))
    if window[best] <= 0.0:
        return TempoEstimate(fallback, defaulted=True, frame_rate=fr)
    lag = lag_min + best
    return TempoEstimate(60.0 * fr / lag, defaulted=False, lag=lag, frame_rate=fr)
