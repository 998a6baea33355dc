"""WAV ingestion, canonicalization and recording manifests.

Everything entering the pipeline becomes a mono float64 waveform at the
canonical 44100 Hz rate: multi-channel input is averaged, integer PCM is
scaled by its full-scale divisor into [-1, 1], and off-rate input is
resampled by linear interpolation (recordings are expected at 44100 Hz
already; resampling exists for robustness, not fidelity).
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AudioFormatError,
    EmptyAudioError,
    ManifestError,
    UnsupportedCodecError,
)

CANONICAL_RATE = 44100
VALID_RPM = (1000, 1500, 2000)

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE

_MANIFEST_HEADER = ["path", "manufacturer", "model", "rpm"]


@dataclass(frozen=True)
class Waveform:
    """Mono audio signal with its sample rate and source identity."""

    samples: np.ndarray
    sample_rate: int
    source_id: str

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class RecordingMeta:
    """One manifest row: where a recording lives and how it is labelled."""

    path: str
    manufacturer: str
    model: str
    rpm: int


def _parse_fmt_chunk(data: bytes) -> tuple[int, int, int, int]:
    if len(data) < 16:
        raise AudioFormatError("fmt chunk shorter than 16 bytes")
    fmt_tag, channels, rate, _byte_rate, block_align, bits = struct.unpack(
        "<HHIIHH", data[:16]
    )
    if fmt_tag == _WAVE_FORMAT_EXTENSIBLE:
        # Actual format code lives in the first two bytes of the SubFormat GUID.
        if len(data) < 26:
            raise AudioFormatError("extensible fmt chunk truncated")
        fmt_tag = struct.unpack("<H", data[24:26])[0]
    if channels < 1:
        raise AudioFormatError("fmt chunk declares zero channels")
    if rate < 1:
        raise AudioFormatError("fmt chunk declares zero sample rate")
    return fmt_tag, channels, rate, bits


def _decode_samples(raw: bytes, fmt_tag: int, bits: int) -> np.ndarray:
    if fmt_tag == _WAVE_FORMAT_PCM:
        if bits == 8:
            x = np.frombuffer(raw, dtype=np.uint8).astype(np.float64)
            return (x - 128.0) / 128.0
        if bits == 16:
            x = np.frombuffer(raw, dtype="<i2").astype(np.float64)
            return x / 32768.0
        if bits == 24:
            b = np.frombuffer(raw, dtype=np.uint8)
            b = b[: len(b) - len(b) % 3].reshape(-1, 3).astype(np.int32)
            x = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
            x = np.where(x & 0x800000, x - (1 << 24), x).astype(np.float64)
            return x / float(1 << 23)
        if bits == 32:
            x = np.frombuffer(raw, dtype="<i4").astype(np.float64)
            return x / float(1 << 31)
        raise UnsupportedCodecError(f"unsupported PCM bit depth: {bits}")
    if fmt_tag == _WAVE_FORMAT_IEEE_FLOAT:
        if bits == 32:
            x = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            return np.clip(x, -1.0, 1.0)
        raise UnsupportedCodecError(f"unsupported float bit depth: {bits}")
    raise UnsupportedCodecError(f"unsupported WAV format tag: {fmt_tag}")


def resample_linear(samples: np.ndarray, rate_in: int, rate_out: int) -> np.ndarray:
    """Linear-interpolation resampling onto the output rate's sample grid.

    Output positions are k * rate_in / rate_out for k = 0..M-1 where M is the
    largest count keeping every position inside [0, n-1]; a 22050 Hz signal of
    N samples therefore becomes 2N-1 samples at 44100 Hz.
    """
    if rate_in == rate_out:
        return samples
    n = len(samples)
    if n == 1:
        return samples.copy()
    step = rate_in / rate_out
    n_out = int(np.floor((n - 1) / step)) + 1
    positions = np.minimum(np.arange(n_out) * step, n - 1)
    return np.interp(positions, np.arange(n), samples)


def load_wav(path, target_rate: int = CANONICAL_RATE) -> Waveform:
    """Load a RIFF/WAVE file and canonicalize to mono at ``target_rate``.

    Accepts integer PCM (8/16/24/32-bit) and 32-bit float samples.  Raises
    AudioFormatError for malformed containers, UnsupportedCodecError for
    other encodings and EmptyAudioError for zero-length data chunks.
    """
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 12 or blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise AudioFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(blob):
        chunk_id = blob[pos : pos + 4]
        (chunk_size,) = struct.unpack("<I", blob[pos + 4 : pos + 8])
        body = blob[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            fmt = _parse_fmt_chunk(body)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise AudioFormatError(f"{path}: data chunk truncated")
            data = body
            break
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise AudioFormatError(f"{path}: missing fmt chunk")
    if data is None:
        raise AudioFormatError(f"{path}: missing data chunk")

    fmt_tag, channels, rate, bits = fmt
    if len(data) == 0:
        raise EmptyAudioError(f"{path}: zero-length data chunk")

    x = _decode_samples(data, fmt_tag, bits)
    frames = len(x) // channels
    if frames == 0:
        raise EmptyAudioError(f"{path}: no complete sample frames")
    if channels > 1:
        x = x[: frames * channels].reshape(frames, channels).mean(axis=1)

    x = resample_linear(x, rate, target_rate)
    x = np.clip(x, -1.0, 1.0)
    return Waveform(samples=x, sample_rate=target_rate, source_id=path.stem)


def write_wav_pcm16(path, samples: np.ndarray, sample_rate: int = CANONICAL_RATE) -> None:
    """Write mono 16-bit PCM.  Quantizes by round(x * 32768), clipped to int16."""
    x = np.asarray(samples, dtype=np.float64)
    q = np.clip(np.rint(x * 32768.0), -32768, 32767).astype("<i2")
    payload = q.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    fmt = b"fmt " + struct.pack(
        "<IHHIIHH", 16, _WAVE_FORMAT_PCM, 1, sample_rate, sample_rate * 2, 2, 16
    )
    data = b"data" + struct.pack("<I", len(payload)) + payload
    Path(path).write_bytes(header + fmt + data)


def load_manifest(path) -> list[RecordingMeta]:
    """Read a recording manifest CSV with header ``path,manufacturer,model,rpm``.

    Relative recording paths are interpreted relative to the manifest's own
    directory.  Rows with an rpm outside {1000, 1500, 2000} raise
    ManifestError naming the offending file line.
    """
    path = Path(path)
    base = path.parent
    metas: list[RecordingMeta] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestError(f"{path}: empty manifest") from None
        if [h.strip() for h in header] != _MANIFEST_HEADER:
            raise ManifestError(
                f"{path}: expected header {','.join(_MANIFEST_HEADER)}, "
                f"got {','.join(header)}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ManifestError(f"{path}: line {line_no}: expected 4 columns")
            rec_path, manufacturer, model, rpm_text = (c.strip() for c in row)
            try:
                rpm = int(rpm_text)
            except ValueError:
                raise ManifestError(
                    f"{path}: line {line_no}: rpm '{rpm_text}' is not an integer"
                ) from None
            if rpm not in VALID_RPM:
                raise ManifestError(
                    f"{path}: line {line_no}: rpm {rpm} not in {VALID_RPM}"
                )
            resolved = rec_path if Path(rec_path).is_absolute() else str(base / rec_path)
            metas.append(RecordingMeta(resolved, manufacturer, model, rpm))
    return metas


def write_manifest(path, metas) -> None:
    """Write manifest rows (paths stored relative to the manifest directory)."""
    path = Path(path)
    base = path.parent
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_MANIFEST_HEADER)
        for meta in metas:
            rec = Path(meta.path)
            try:
                rec = rec.relative_to(base)
            except ValueError:
                pass
            writer.writerow([str(rec), meta.manufacturer, meta.model, meta.rpm])
