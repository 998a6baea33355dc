"""Tempo-derived windowing of recordings into non-overlapping segments.

The window size is ``round(60 / tempo * 44100)`` samples (one tempo duration),
optionally stretched by a multiplier of 1, 2 or 5.  The tempo is estimated
once per recording from its onset-strength envelope; the trailing partial
window is discarded so every segment carries identically sized audio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsp
from .audio_io import Waveform
from .errors import RecordingTooShortError

VALID_MULTIPLIERS = (1, 2, 5)


@dataclass(frozen=True)
class SegmentationPlan:
    tempo: float
    samples_per_tempo: int
    multiplier: int
    window_samples: int
    defaulted_tempo: bool


@dataclass(frozen=True)
class Segment:
    samples: np.ndarray
    source_id: str
    index: int


def samples_per_tempo(tempo: float, sample_rate: int = 44100) -> int:
    """Window size in samples for one tempo duration: round(60/tempo * sr)."""
    value = int(round(60.0 / tempo * sample_rate))
    if value <= 0:
        raise ValueError(f"tempo {tempo} yields a non-positive window")
    return value


def plan_segmentation(waveform: Waveform, multiplier: int,
                      tempo: float | dsp.TempoEstimate | None = None,
                      ) -> SegmentationPlan:
    """Build the window plan for one recording.

    The tempo is estimated from the full recording unless given explicitly
    (as BPM or as a precomputed TempoEstimate, so one estimate can serve
    several multipliers).  Raises RecordingTooShortError when the recording
    cannot fit one window.
    """
    if multiplier not in VALID_MULTIPLIERS:
        raise ValueError(f"multiplier must be one of {VALID_MULTIPLIERS}")
    if tempo is None:
        tempo = dsp.estimate_tempo(
            dsp.onset_envelope(waveform.samples, sample_rate=waveform.sample_rate)
        )
    if isinstance(tempo, dsp.TempoEstimate):
        tempo_bpm, defaulted = tempo.bpm, tempo.defaulted
    else:
        tempo_bpm, defaulted = float(tempo), False

    spt = samples_per_tempo(tempo_bpm, waveform.sample_rate)
    window = multiplier * spt
    if window > len(waveform.samples):
        raise RecordingTooShortError(
            f"{waveform.source_id}: window of {window} samples "
            f"(tempo {tempo_bpm:.2f}, multiplier {multiplier}) exceeds "
            f"recording length {len(waveform.samples)}"
        )
    return SegmentationPlan(
        tempo=tempo_bpm,
        samples_per_tempo=spt,
        multiplier=multiplier,
        window_samples=window,
        defaulted_tempo=defaulted,
    )


def segment(waveform: Waveform, plan: SegmentationPlan) -> list[Segment]:
    """Cut the waveform into floor(len / window) disjoint, contiguous segments."""
    w = plan.window_samples
    n_segments = len(waveform.samples) // w
    return [
        Segment(
            samples=np.array(waveform.samples[k * w : (k + 1) * w]),
            source_id=waveform.source_id,
            index=k,
        )
        for k in range(n_segments)
    ]
