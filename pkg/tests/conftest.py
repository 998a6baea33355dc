import numpy as np
import pytest

SR = 44100


def sine(freq, duration=1.0, amplitude=0.5, sr=SR, phase=0.0):
    t = np.arange(int(round(duration * sr))) / sr
    return amplitude * np.sin(2 * np.pi * freq * t + phase)


def white_noise(duration=1.0, amplitude=0.1, seed=0, sr=SR):
    rng = np.random.default_rng(seed)
    return amplitude * rng.standard_normal(int(round(duration * sr)))


def click_track(bpm, duration=10.0, sr=SR, click_len=1536, amplitude=0.9):
    """Hann-windowed noise bursts at the given BPM over silence.

    Bursts span a few STFT hops so each onset peak is a smooth bump; with
    single-sample clicks the envelope's sub-frame jitter can favor a
    subharmonic autocorrelation lag.
    """
    n = int(round(duration * sr))
    x = np.zeros(n)
    rng = np.random.default_rng(1)
    window = np.hanning(click_len)
    period = 60.0 / bpm
    t = 0.0
    while t * sr < n - click_len:
        start = int(round(t * sr))
        x[start : start + click_len] = (
            amplitude * window * rng.standard_normal(click_len)
        )
        t += period
    return x


@pytest.fixture(scope="session")
def tone_440():
    return sine(440.0, duration=0.8)


@pytest.fixture(scope="session")
def engine_segment():
    """One 1-tempo-sized segment of a synthetic engine sound."""
    from engineid import synth

    wav = synth.synth_engine(synth.DEFAULT_PROFILES[0], 2000, 1.0, seed=3)
    return wav.samples[:22050]
