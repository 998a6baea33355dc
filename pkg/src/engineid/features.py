"""The 22 per-segment audio features and their canonical vector layout.

Each feature is computed framewise on the shared grid, then collapsed to its
per-coefficient time-mean; the means are concatenated in a fixed canonical
order into one 644-dimensional vector (with default dimensions).  Vector
features keep their full dimensionality: collapsing MFCCs or chroma to a
single scalar would throw away the discriminative content.

Every division and logarithm is epsilon-floored, so any finite input
(including silence) yields a finite, deterministic vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import dsp
from .dsp import DB_EPS, DEFAULT_GRID, FrameGrid
from .errors import FeatureComputationError

EPS = 1e-10


@dataclass(frozen=True)
class FeatureConfig:
    """Dimensional knobs for the feature set (defaults give D = 644)."""

    grid: FrameGrid = DEFAULT_GRID
    sample_rate: int = 44100
    n_mels: int = 128
    n_mfcc: int = 13
    contrast_bands: int = 6
    contrast_fmin: float = 200.0
    contrast_quantile: float = 0.02
    rolloff_fraction: float = 0.85
    logfreq_bins_per_octave: int = 12
    logfreq_fmin: float = 32.70319566257483  # C1; centers land on semitones
    logfreq_bins: int = 84
    cens_smooth_length: int = 41
    tempogram_lags: int = 384
    n_filt: int = 26
    n_subbands: int = 4


DEFAULT_CONFIG = FeatureConfig()


def canonical_layout(config: FeatureConfig = DEFAULT_CONFIG) -> tuple:
    """Ordered (feature name, dimension) pairs defining the vector layout."""
    return (
        ("rms", 1),
        ("zero_crossing", 1),
        ("chroma_cens", 12),
        ("chroma_stft", 12),
        ("chroma_cqt", 12),
        ("spectral_centroid", 1),
        ("spectral_bandwidth", 1),
        ("spectral_contrast", config.contrast_bands + 1),
        ("spectral_flatness", 1),
        ("spectral_rolloff", 1),
        ("poly_zero", 1),
        ("poly_linear", 2),
        ("poly_quadratic", 3),
        ("mfcc", config.n_mfcc),
        ("mel_spectrogram", config.n_mels),
        ("spectral_flux", 1),
        ("superflux", 1),
        ("tonnetz", 6),
        ("tempogram", config.tempogram_lags),
        ("filterbank_energies", config.n_filt),
        ("log_filterbank_energies", config.n_filt),
        ("subband_centroids", config.n_subbands),
    )


def layout_dimension(layout) -> int:
    return sum(dim for _, dim in layout)


@lru_cache(maxsize=16)
def _mel_fb(n_mels, n_bins, sr, normalize):
    return dsp.mel_filterbank(n_mels, n_bins, sr, normalize=normalize)


@lru_cache(maxsize=16)
def _dct_matrix(n_out, n_in):
    return dsp.dct_ii_matrix(n_out, n_in, orthonormal=True)


@lru_cache(maxsize=16)
def _chroma_fold_stft(n_bins, sr, frame_length):
    """[12, n_bins] matrix folding FFT bins onto pitch classes (class 0 = A)."""
    freqs = np.arange(n_bins) * (sr / frame_length)
    fold = np.zeros((12, n_bins))
    classes = np.zeros(n_bins, dtype=int)
    classes[1:] = np.round(12.0 * np.log2(freqs[1:] / 440.0)).astype(int) % 12
    fold[classes[1:], np.arange(1, n_bins)] = 1.0  # DC bin carries no pitch
    return fold


@lru_cache(maxsize=16)
def _chroma_fold_logfreq(fmin, bins_per_octave, n_bins):
    centers = dsp.log_freq_centers(fmin, bins_per_octave, n_bins)
    classes = np.round(12.0 * np.log2(centers / 440.0)).astype(int) % 12
    fold = np.zeros((12, n_bins))
    fold[classes, np.arange(n_bins)] = 1.0
    return fold


# Interval circles: angle step per pitch class and radius, for fifths,
# minor thirds and major thirds respectively.
_TONNETZ_STEPS = (7.0 * np.pi / 6.0, 3.0 * np.pi / 2.0, 2.0 * np.pi / 3.0)
_TONNETZ_RADII = (1.0, 1.0, 0.5)


@lru_cache(maxsize=1)
def _tonnetz_matrix():
    p = np.arange(12)
    rows = []
    for step, radius in zip(_TONNETZ_STEPS, _TONNETZ_RADII):
        rows.append(radius * np.sin(p * step))
        rows.append(radius * np.cos(p * step))
    return np.array(rows)


class _Analysis:
    """Lazily computed per-segment intermediates shared across features."""

    def __init__(self, samples, config: FeatureConfig = DEFAULT_CONFIG):
        self.x = np.asarray(samples, dtype=np.float64)
        self.cfg = config
        self._cache = {}

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @property
    def frames(self):
        return self._get("frames", lambda: dsp.frame_signal(self.x, self.cfg.grid))

    @property
    def magnitude(self):
        def build():
            window = dsp.make_window(self.cfg.grid.window, self.cfg.grid.frame_length)
            return np.abs(np.fft.rfft(self.frames * window, axis=1)).T
        return self._get("magnitude", build)

    @property
    def power(self):
        return self._get("power", lambda: self.magnitude**2)

    @property
    def freqs(self):
        return self._get("freqs", lambda: np.arange(self.magnitude.shape[0])
                         * (self.cfg.sample_rate / self.cfg.grid.frame_length))

    @property
    def mel_power(self):
        fb = _mel_fb(self.cfg.n_mels, self.power.shape[0], self.cfg.sample_rate, True)
        return self._get("mel_power", lambda: fb @ self.power)

    @property
    def mel_db(self):
        return self._get("mel_db", lambda: dsp.power_to_db(self.mel_power))

    @property
    def logfreq_power(self):
        def build():
            spec = dsp.Spectrogram(self.power, "power", self.freqs, self.cfg.grid)
            return dsp.log_freq_spectrogram(
                spec, self.cfg.logfreq_bins_per_octave, self.cfg.logfreq_fmin,
                self.cfg.logfreq_bins, self.cfg.sample_rate,
            ).bins
        return self._get("logfreq_power", build)

    @property
    def chroma_cqt_raw(self):
        fold = _chroma_fold_logfreq(self.cfg.logfreq_fmin,
                                    self.cfg.logfreq_bins_per_octave,
                                    self.cfg.logfreq_bins)
        return self._get("chroma_cqt_raw", lambda: fold @ self.logfreq_power)

    @property
    def onset(self):
        def build():
            return dsp.onset_strength(
                self.mel_db, self.cfg.grid.frame_rate(self.cfg.sample_rate)
            )
        return self._get("onset", build)

    # -- features ------------------------------------------------------------

    def rms(self):
        return np.sqrt(np.mean(self.frames**2, axis=1))[None, :]

    def zero_crossing(self):
        nonneg = self.frames >= 0
        changes = np.sum(nonneg[:, 1:] != nonneg[:, :-1], axis=1)
        return (changes / self.cfg.grid.frame_length)[None, :]

    def chroma_stft(self):
        fold = _chroma_fold_stft(self.power.shape[0], self.cfg.sample_rate,
                                 self.cfg.grid.frame_length)
        return _max_normalize(fold @ self.power)

    def chroma_cqt(self):
        return _max_normalize(self.chroma_cqt_raw)

    def chroma_cens(self):
        return _cens(self.chroma_cqt_raw, self.cfg.cens_smooth_length)

    def spectral_centroid(self):
        return _centroid(self.magnitude, self.freqs)[None, :]

    def spectral_bandwidth(self):
        mag = self.magnitude
        total = mag.sum(axis=0)
        centroid = _centroid(mag, self.freqs)
        dev2 = (self.freqs[:, None] - centroid[None, :]) ** 2
        var = np.where(total > 0, (mag * dev2).sum(axis=0) / np.maximum(total, EPS), 0.0)
        return np.sqrt(var)[None, :]

    def spectral_contrast(self):
        return _contrast(self.power, self.freqs, self.cfg.contrast_fmin,
                         self.cfg.contrast_bands, self.cfg.contrast_quantile,
                         self.cfg.sample_rate)

    def spectral_flatness(self):
        p = self.power
        geometric = np.exp(np.mean(np.log(p + EPS), axis=0))
        arithmetic = np.mean(p + EPS, axis=0)
        return (geometric / arithmetic)[None, :]

    def spectral_rolloff(self):
        return _rolloff(self.power, self.freqs, self.cfg.rolloff_fraction)[None, :]

    def poly(self, order):
        return np.polyfit(self.freqs, self.magnitude, order).reshape(order + 1, -1)

    def mfcc(self):
        return _dct_matrix(self.cfg.n_mfcc, self.cfg.n_mels) @ self.mel_db

    def mel_spectrogram(self):
        return self.mel_power

    def spectral_flux(self):
        d = np.maximum(0.0, self.magnitude[:, 1:] - self.magnitude[:, :-1])
        flux = np.sqrt(np.sum(d**2, axis=0))
        return np.concatenate(([0.0], flux))[None, :]

    def superflux(self):
        mel_db = self.mel_db
        padded = np.pad(mel_db, ((1, 1), (0, 0)), mode="edge")
        filtered = np.maximum(np.maximum(padded[:-2], padded[1:-1]), padded[2:])
        d = np.maximum(0.0, mel_db[:, 1:] - filtered[:, :-1])
        return np.concatenate(([0.0], d.sum(axis=0)))[None, :]

    def tonnetz(self):
        cens = self.chroma_cens()
        norms = np.abs(cens).sum(axis=0)
        normalized = np.where(norms > 0, cens / np.maximum(norms, EPS), 0.0)
        return _tonnetz_matrix() @ normalized

    def tempogram(self):
        return tempogram_from_envelope(self.onset.strength, self.cfg.tempogram_lags)

    def filterbank_energies(self, log=False):
        fb = _mel_fb(self.cfg.n_filt, self.power.shape[0], self.cfg.sample_rate, False)
        energies = fb @ self.power
        if log:
            return np.log(np.maximum(energies, EPS))
        return energies

    def subband_centroids(self):
        return _subband_centroids(self.power, self.freqs, self.cfg.n_subbands,
                                  self.cfg.sample_rate)


def _max_normalize(chroma):
    peak = chroma.max(axis=0)
    return np.where(peak > 0, chroma / np.maximum(peak, EPS), 0.0)


def _centroid(mag, freqs):
    total = mag.sum(axis=0)
    weighted = (freqs[:, None] * mag).sum(axis=0)
    return np.where(total > 0, weighted / np.maximum(total, EPS), 0.0)


def _rolloff(power_bins, freqs, fraction):
    cum = np.cumsum(power_bins, axis=0)
    threshold = fraction * cum[-1]
    idx = np.argmax(cum >= threshold[None, :], axis=0)
    return freqs[idx]


def _contrast(power_bins, freqs, fmin, n_bands, quantile, sr):
    edges = [0.0] + [fmin * 2.0**k for k in range(n_bands + 1)]
    edges[-1] = sr / 2.0  # top octave extends to Nyquist
    out = np.zeros((n_bands + 1, power_bins.shape[1]))
    for band in range(n_bands + 1):
        lo, hi = edges[band], edges[band + 1]
        if band == n_bands:
            mask = (freqs >= lo) & (freqs <= hi)
        else:
            mask = (freqs >= lo) & (freqs < hi)
        sub = np.sort(power_bins[mask], axis=0)
        m = max(1, int(round(quantile * sub.shape[0])))
        valley = sub[:m].mean(axis=0)
        peak = sub[-m:].mean(axis=0)
        out[band] = np.log(peak + EPS) - np.log(valley + EPS)
    return out


def _cens(chroma_raw, smooth_length):
    """CENS: l1 normalize, quantize against the frame max, smooth, l2 normalize."""
    norms = chroma_raw.sum(axis=0)
    chroma = np.where(norms > 0, chroma_raw / np.maximum(norms, EPS), 0.0)
    peak = chroma.max(axis=0)
    quantized = np.zeros_like(chroma)
    for threshold in (0.05, 0.1, 0.2, 0.4):
        quantized += 0.25 * (chroma > threshold * peak[None, :])
    kernel = np.ones(smooth_length) / smooth_length
    smoothed = np.apply_along_axis(
        lambda row: np.convolve(row, kernel, mode="same"), 1, quantized
    )
    l2 = np.sqrt((smoothed**2).sum(axis=0))
    return np.where(l2 > 0, smoothed / np.maximum(l2, EPS), 0.0)


def _subband_centroids(power_bins, freqs, n_subbands, sr):
    nyquist = sr / 2.0
    edges = np.linspace(0.0, nyquist, n_subbands + 1)
    out = np.zeros((n_subbands, power_bins.shape[1]))
    for band in range(n_subbands):
        lo, hi = edges[band], edges[band + 1]
        if band == n_subbands - 1:
            mask = (freqs >= lo) & (freqs <= hi)
        else:
            mask = (freqs >= lo) & (freqs < hi)
        sub = power_bins[mask]
        total = sub.sum(axis=0)
        weighted = (freqs[mask][:, None] * sub).sum(axis=0)
        midpoint = (lo + hi) / 2.0
        out[band] = np.where(total > 0, weighted / np.maximum(total, EPS), midpoint)
    return out


def tempogram_from_envelope(strength, win_lags=384):
    """Local autocorrelation of the onset envelope, [win_lags, n_steps].

    Each time step autocorrelates a centered window of win_lags envelope
    frames (zero padding at the edges) and is normalized by its lag-0 value.
    Envelopes shorter than win_lags are zero-padded up to win_lags first, so
    short segments still produce the full lag axis.
    """
    env = np.asarray(strength, dtype=np.float64)
    if len(env) < win_lags:
        env = np.pad(env, (0, win_lags - len(env)))
    n = len(env)
    half = win_lags // 2
    padded = np.pad(env, (half, win_lags - half))
    windows = np.lib.stride_tricks.sliding_window_view(padded, win_lags)[:n]
    spectrum = np.fft.rfft(windows, n=2 * win_lags, axis=1)
    ac = np.fft.irfft(spectrum * np.conj(spectrum), n=2 * win_lags, axis=1)
    ac = ac[:, :win_lags]
    lag0 = ac[:, :1]
    normalized = np.where(lag0 > EPS, ac / np.maximum(lag0, EPS), 0.0)
    return normalized.T


# -- public per-feature entry points -----------------------------------------

def rms(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).rms()


def zero_crossing_rate(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).zero_crossing()


def chroma(samples, variant="stft", config=DEFAULT_CONFIG):
    analysis = _Analysis(samples, config)
    if variant == "stft":
        return analysis.chroma_stft()
    if variant == "cqt":
        return analysis.chroma_cqt()
    if variant == "cens":
        return analysis.chroma_cens()
    raise ValueError(f"unknown chroma variant: {variant}")


def spectral_centroid(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).spectral_centroid()


def spectral_bandwidth(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).spectral_bandwidth()


def spectral_contrast(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).spectral_contrast()


def spectral_flatness(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).spectral_flatness()


def spectral_rolloff(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).spectral_rolloff()


def poly_features(samples, order, config=DEFAULT_CONFIG):
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    return _Analysis(samples, config).poly(order)


def mel_spectrogram(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).mel_spectrogram()


def mfcc(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).mfcc()


def spectral_flux(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).spectral_flux()


def superflux(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).superflux()


def tonnetz(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).tonnetz()


def tonnetz_projection(chroma_frames):
    """Project [12, T] chroma (l1-normalized per frame internally) to 6-D."""
    chroma_frames = np.asarray(chroma_frames, dtype=np.float64)
    norms = np.abs(chroma_frames).sum(axis=0)
    normalized = np.where(norms > 0, chroma_frames / np.maximum(norms, EPS), 0.0)
    return _tonnetz_matrix() @ normalized


def tempogram(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).tempogram()


def filterbank_energies(samples, log=False, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).filterbank_energies(log=log)


def subband_centroids(samples, config=DEFAULT_CONFIG):
    return _Analysis(samples, config).subband_centroids()


def aggregate_mean(frame_feature):
    """Per-coefficient arithmetic mean over the time axis."""
    return np.asarray(frame_feature, dtype=np.float64).mean(axis=1)


class FeatureExtractor:
    """Computes the full canonical feature vector for segments."""

    def __init__(self, config: FeatureConfig = DEFAULT_CONFIG):
        self.config = config
        self.layout = canonical_layout(config)
        self.dimension = layout_dimension(self.layout)

    def extract(self, samples) -> np.ndarray:
        analysis = _Analysis(samples, self.config)
        builders = {
            "rms": analysis.rms,
            "zero_crossing": analysis.zero_crossing,
            "chroma_cens": analysis.chroma_cens,
            "chroma_stft": analysis.chroma_stft,
            "chroma_cqt": analysis.chroma_cqt,
            "spectral_centroid": analysis.spectral_centroid,
            "spectral_bandwidth": analysis.spectral_bandwidth,
            "spectral_contrast": analysis.spectral_contrast,
            "spectral_flatness": analysis.spectral_flatness,
            "spectral_rolloff": analysis.spectral_rolloff,
            "poly_zero": lambda: analysis.poly(0),
            "poly_linear": lambda: analysis.poly(1),
            "poly_quadratic": lambda: analysis.poly(2),
            "mfcc": analysis.mfcc,
            "mel_spectrogram": analysis.mel_spectrogram,
            "spectral_flux": analysis.spectral_flux,
            "superflux": analysis.superflux,
            "tonnetz": analysis.tonnetz,
            "tempogram": analysis.tempogram,
            "filterbank_energies": analysis.filterbank_energies,
            "log_filterbank_energies": lambda: analysis.filterbank_energies(log=True),
            "subband_centroids": analysis.subband_centroids,
        }
        parts = []
        for name, dim in self.layout:
            try:
                frame_feature = builders[name]()
            except Exception as exc:
                raise FeatureComputationError(name, str(exc)) from exc
            values = aggregate_mean(frame_feature)
            if values.shape != (dim,):
                raise FeatureComputationError(
                    name, f"expected {dim} values, got {values.shape}"
                )
            parts.append(values)
        return np.concatenate(parts)


def extract_feature_vector(samples, config: FeatureConfig = DEFAULT_CONFIG):
    """One-call extraction of the canonical vector (see FeatureExtractor)."""
    return FeatureExtractor(config).extract(samples)
