"""Deterministic synthetic engine-sound corpus.

Stand-in for real engine recordings: each "manufacturer" is an EngineProfile
whose running sound is a harmonic stack on the four-stroke firing frequency
(rpm / 60 * cylinders / 2), with slow amplitude modulation, a small random
frequency wobble and colored noise.  Profiles differ in their harmonic
envelopes and noise color, which is what makes them separable downstream.

Every waveform is a pure function of (profile, rpm, duration, seed), and the
corpus builder derives per-file seeds from the master seed, so rebuilding a
corpus is byte-identical.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import (
    CANONICAL_RATE,
    VALID_RPM,
    RecordingMeta,
    Waveform,
    write_manifest,
    write_wav_pcm16,
)


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary key parts (SHA-256 based)."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class EngineProfile:
    """Acoustic fingerprint of one synthetic manufacturer.

    am_depth/am_rate describe a slow periodic rev pulse (raised-cosine bumps,
    sharp enough to register in the onset envelope); jitter is a fractional
    frequency wobble applied to the whole harmonic stack.
    """

    name: str
    cylinders: int = 4
    harmonic_weights: tuple = (1.0, 0.5, 0.25)
    noise_color_exponent: float = 1.0
    am_depth: float = 0.3
    am_rate: float = 2.0
    jitter: float = 0.01

    def __post_init__(self):
        weights = np.asarray(self.harmonic_weights, dtype=np.float64)
        if weights.size == 0 or not np.all(np.isfinite(weights)):
            raise ValueError(f"profile {self.name}: invalid harmonic weights")
        if np.any(weights < 0) or not np.any(weights > 0):
            raise ValueError(f"profile {self.name}: weights must be >= 0, not all zero")
        if not 0.0 <= self.jitter <= 0.05:
            raise ValueError(f"profile {self.name}: jitter must be in [0, 0.05]")

    def firing_frequency(self, rpm: int) -> float:
        return (rpm / 60.0) * (self.cylinders / 2.0)


# Five invented manufacturers with different firing frequencies (cylinder
# counts), dominant harmonics and noise colors, mirroring the five-class
# structure of the real problem.
DEFAULT_PROFILES = (
    EngineProfile("Avelo", cylinders=4,
                  harmonic_weights=(1.0, 0.7, 0.2, 0.1, 0.05),
                  noise_color_exponent=0.0, am_depth=0.50, jitter=0.010),
    EngineProfile("Bremsa", cylinders=4,
                  harmonic_weights=(0.15, 0.3, 1.0, 0.8, 0.25, 0.1),
                  noise_color_exponent=0.5, am_depth=0.45, jitter=0.012),
    EngineProfile("Cardeno", cylinders=6,
                  harmonic_weights=(0.1, 0.15, 0.3, 0.5, 1.0, 0.9, 0.3),
                  noise_color_exponent=1.0, am_depth=0.55, jitter=0.015),
    EngineProfile("Dynare", cylinders=6,
                  harmonic_weights=(0.1, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0, 0.85),
                  noise_color_exponent=1.5, am_depth=0.62, jitter=0.008),
    EngineProfile("Estrilo", cylinders=8,
                  harmonic_weights=(0.3, 0.2, 0.15, 0.15, 0.2, 0.25, 0.3,
                                    0.4, 0.9, 1.0, 0.5, 0.2),
                  noise_color_exponent=0.8, am_depth=0.60, jitter=0.020),
)


@dataclass(frozen=True)
class CorpusSpec:
    """Shape of a synthetic corpus build."""

    profiles: tuple = DEFAULT_PROFILES
    recordings_per_profile: int = 20
    rpm_levels: tuple = VALID_RPM
    duration: float = 15.0
    snr_db: float | None = 20.0
    seed: int = 0

    def __post_init__(self):
        if len(self.profiles) < 2:
            raise ValueError("need at least 2 profiles")
        if self.recordings_per_profile < 2:
            raise ValueError("need at least 2 recordings per profile")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not set(self.rpm_levels) <= set(VALID_RPM):
            raise ValueError(f"rpm levels must be within {VALID_RPM}")


def _colored_noise(n: int, exponent: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian noise with power spectrum ~ 1/f**exponent, unit variance."""
    white = rng.standard_normal(n)
    if exponent == 0.0:
        return white
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n)
    shaping = np.ones_like(freqs)
    nonzero = freqs > 0
    shaping[nonzero] = freqs[nonzero] ** (-exponent / 2.0)
    shaping[0] = 0.0
    colored = np.fft.irfft(spectrum * shaping, n=n)
    return colored / max(colored.std(), 1e-12)


def _rev_pulses(t: np.ndarray, rate: float, width: float, phase: float) -> np.ndarray:
    """Periodic raised-cosine bumps in [0, 1] at the given rate."""
    cycle = np.mod(t * rate + phase, 1.0)  # position within the cycle, [0, 1)
    u = cycle / (rate * width)
    return np.where(u < 1.0, 0.5 - 0.5 * np.cos(2.0 * np.pi * np.minimum(u, 1.0)), 0.0)


def synth_engine(profile: EngineProfile, rpm: int, duration: float, seed: int,
                 sample_rate: int = CANONICAL_RATE,
                 snr_db: float | None = 20.0) -> Waveform:
    """Render one synthetic engine recording, peak-normalized to 0.9.

    Harmonics whose (wobble-stretched) frequency would cross Nyquist are
    truncated rather than aliased.  The rev-pulse amplitude modulation is
    applied to harmonics and noise together, so each pulse registers as a
    broadband level rise in the onset envelope.
    """
    if rpm <= 0:
        raise ValueError("rpm must be positive")
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    f0 = profile.firing_frequency(rpm)

    # Slow random frequency wobble: smoothed noise, scaled to +-jitter.
    wobble = np.zeros(n)
    if profile.jitter > 0:
        control_rate = 8.0  # wobble control points per second
        n_ctrl = max(2, int(duration * control_rate) + 1)
        ctrl = rng.standard_normal(n_ctrl)
        ctrl /= max(np.abs(ctrl).max(), 1e-12)
        wobble = profile.jitter * np.interp(
            t, np.linspace(0.0, duration, n_ctrl), ctrl
        )
    inst_phase = 2.0 * np.pi * f0 * np.cumsum(1.0 + wobble) / sample_rate

    nyquist = sample_rate / 2.0
    max_stretch = 1.0 + profile.jitter
    signal = np.zeros(n)
    for h, weight in enumerate(profile.harmonic_weights, start=1):
        if weight == 0.0:
            continue
        if h * f0 * max_stretch >= nyquist:
            break
        phase_offset = rng.uniform(0.0, 2.0 * np.pi)
        signal += weight * np.sin(h * inst_phase + phase_offset)

    am_phase = rng.uniform(0.0, 1.0)
    if snr_db is not None:
        noise = _colored_noise(n, profile.noise_color_exponent, rng)
        sig_power = np.mean(signal**2)
        noise_power = sig_power / 10.0 ** (snr_db / 10.0)
        signal = signal + noise * np.sqrt(noise_power)

    if profile.am_depth > 0:
        pulses = _rev_pulses(t, profile.am_rate, width=0.12, phase=am_phase)
        signal = signal * (1.0 + profile.am_depth * pulses)

    peak = np.abs(signal).max()
    if peak > 0:
        signal = 0.9 * signal / peak
    source = f"{profile.name}_{rpm}rpm_seed{seed}"
    return Waveform(samples=signal, sample_rate=sample_rate, source_id=source)


def build_corpus(spec: CorpusSpec, out_dir) -> Path:
    """Write WAV files plus a manifest CSV; returns the manifest path.

    File seeds derive from (master seed, profile, rpm, recording index), so
    the same spec always produces identical bytes.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metas = []
    for profile in spec.profiles:
        for rpm in spec.rpm_levels:
            for idx in range(spec.recordings_per_profile):
                seed = derive_seed(spec.seed, profile.name, rpm, idx)
                wav = synth_engine(profile, rpm, spec.duration, seed,
                                   snr_db=spec.snr_db)
                name = f"{profile.name}_{rpm}rpm_{idx:03d}.wav"
                write_wav_pcm16(out_dir / name, wav.samples, wav.sample_rate)
                metas.append(RecordingMeta(
                    path=str(out_dir / name),
                    manufacturer=profile.name,
                    model=f"{profile.name}-1",
                    rpm=rpm,
                ))
    manifest_path = out_dir / "manifest.csv"
    write_manifest(manifest_path, metas)
    return manifest_path
