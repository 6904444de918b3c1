"""PCM audio I/O and preparation: WAV parsing/writing, resampling, segmenting,
and SNR-controlled noise injection.

All functions are pure (given an explicit seed where randomness is involved)
and operate on integer `Waveform` objects, so results are bit-reproducible.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from bitwave.errors import DataError, UnsupportedWavError, WavError

SUPPORTED_BIT_DEPTHS = (8, 16)

# Resampler design constants: 64-tap Kaiser-windowed sinc, evaluated as a
# rational-ratio polyphase filter, cutoff at 0.45 of the lower Nyquist.
RESAMPLE_TAPS = 64
RESAMPLE_KAISER_BETA = 8.6
RESAMPLE_CUTOFF_FRACTION = 0.45


@dataclass(eq=False)
class Waveform:
    """Signed integer PCM samples plus rate/depth metadata.

    Samples are stored as int32 regardless of bit depth; every value must lie
    in [-2^(B-1), 2^(B-1)-1] for the declared depth B.
    """

    samples: np.ndarray
    sample_rate: int
    bit_depth: int = 16

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.int64)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("waveform needs at least one sample in a 1-D array")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.bit_depth not in SUPPORTED_BIT_DEPTHS:
            raise ValueError(f"bit_depth must be one of {SUPPORTED_BIT_DEPTHS}")
        lo, hi = sample_range(self.bit_depth)
        if self.samples.min() < lo or self.samples.max() > hi:
            raise ValueError(
                f"samples out of range [{lo}, {hi}] for {self.bit_depth}-bit PCM"
            )
        self.samples = self.samples.astype(np.int32)

    def __len__(self):
        return int(self.samples.size)

    def __eq__(self, other):
        if not isinstance(other, Waveform):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.bit_depth == other.bit_depth
            and np.array_equal(self.samples, other.samples)
        )

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass
class SnrSpec:
    """Noise injection request: target SNR in dB and the noise family.

    ``snr_db = math.inf`` is the "clean" sentinel: injection is the identity.
    """

    snr_db: float
    noise_kind: str = "white_gaussian"

    def __post_init__(self):
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")
        if self.noise_kind != "white_gaussian":
            raise ValueError(f"unknown noise kind {self.noise_kind!r}")

    @property
    def is_clean(self) -> bool:
        return math.isinf(self.snr_db) and self.snr_db > 0


CLEAN = SnrSpec(snr_db=math.inf)


def sample_range(bit_depth: int) -> tuple[int, int]:
    """Valid signed sample range [lo, hi] for a bit depth."""
    half = 1 << (bit_depth - 1)
    return -half, half - 1


def _saturate(values: np.ndarray, bit_depth: int) -> np.ndarray:
    """Round to nearest integer and clamp into the PCM range."""
    lo, hi = sample_range(bit_depth)
    return np.clip(np.rint(values), lo, hi).astype(np.int32)


# --------------------------------------------------------------------------
# WAV parsing / writing
# --------------------------------------------------------------------------

_WAVE_FORMAT_PCM = 1


def load_wav(path, channel: int | None = None) -> Waveform:
    """Read an integer PCM RIFF/WAVE file.

    Multi-channel files are averaged to mono unless ``channel`` selects a
    specific zero-based channel. Leading and trailing non-fmt/data chunks are
    skipped. Raises WavError for malformed containers (the message names the
    offending chunk) and UnsupportedWavError for non-PCM or unsupported
    sample widths.
    """
    with open(path, "rb") as fh:
        data = fh.read()

    if len(data) < 12:
        raise WavError(f"{path}: file too short for a RIFF header")
    if data[0:4] != b"RIFF":
        raise WavError(f"{path}: missing RIFF chunk id (got {data[0:4]!r})")
    if data[8:12] != b"WAVE":
        raise WavError(f"{path}: RIFF form type is not WAVE (got {data[8:12]!r})")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if len(body) < chunk_size:
            raise WavError(
                f"{path}: chunk {chunk_id!r} claims {chunk_size} bytes but "
                f"only {len(body)} remain"
            )
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise WavError(f"{path}: fmt chunk too short ({chunk_size} bytes)")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
            if fmt is not None:
                break  # canonical layout satisfied; ignore trailing chunks
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavError(f"{path}: no fmt chunk found")
    if payload is None:
        raise WavError(f"{path}: no data chunk found")

    audio_format, n_channels, sample_rate, _byte_rate, block_align, bits = fmt
    if audio_format != _WAVE_FORMAT_PCM:
        raise UnsupportedWavError(
            f"{path}: format tag {audio_format} is not integer PCM "
            "(float/compressed codecs are unsupported)"
        )
    if bits not in SUPPORTED_BIT_DEPTHS:
        raise UnsupportedWavError(f"{path}: {bits}-bit samples unsupported")
    if n_channels < 1:
        raise WavError(f"{path}: fmt chunk declares {n_channels} channels")
    bytes_per_sample = bits // 8
    if block_align != n_channels * bytes_per_sample:
        raise WavError(
            f"{path}: fmt chunk block_align {block_align} inconsistent with "
            f"{n_channels} channel(s) at {bits} bits"
        )

    frame_count = len(payload) // block_align
    if frame_count < 1:
        raise WavError(f"{path}: data chunk holds no complete frame")
    payload = payload[: frame_count * block_align]

    if bits == 16:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.int32)
    else:
        # 8-bit WAV stores unsigned bytes with a 128 offset
        raw = np.frombuffer(payload, dtype=np.uint8).astype(np.int32) - 128
    frames = raw.reshape(frame_count, n_channels)

    if channel is not None:
        if not 0 <= channel < n_channels:
            raise WavError(
                f"{path}: channel {channel} requested but file has {n_channels}"
            )
        samples = frames[:, channel]
    elif n_channels == 1:
        samples = frames[:, 0]
    else:
        samples = _saturate(frames.mean(axis=1), bits)

    return Waveform(samples=samples, sample_rate=sample_rate, bit_depth=bits)


def save_wav(w: Waveform, path) -> None:
    """Write a mono integer PCM WAV file with the canonical 44-byte header.

    ``load_wav(save_wav(w)) == w`` holds bit-exactly.
    """
    bytes_per_sample = w.bit_depth // 8
    if w.bit_depth == 16:
        body = w.samples.astype("<i2").tobytes()
    else:
        body = (w.samples + 128).astype(np.uint8).tobytes()
    pad = b"\x00" if len(body) % 2 else b""

    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(body) + len(pad),
        b"WAVE",
        b"fmt ",
        16,
        _WAVE_FORMAT_PCM,
        1,  # mono
        w.sample_rate,
        w.sample_rate * bytes_per_sample,
        bytes_per_sample,
        w.bit_depth,
        b"data",
        len(body),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)
        fh.write(pad)


# --------------------------------------------------------------------------
# Resampling
# --------------------------------------------------------------------------


def _kaiser_sinc(offsets: np.ndarray, cutoff: float) -> np.ndarray:
    """Continuous Kaiser-windowed sinc kernel sampled at fractional offsets.

    ``cutoff`` is in cycles per input sample; offsets are in input samples and
    must lie within the +-(taps/2) window support.
    """
    half = RESAMPLE_TAPS / 2.0
    x = np.asarray(offsets, dtype=np.float64)
    core = 2.0 * cutoff * np.sinc(2.0 * cutoff * x)
    inside = np.abs(x) <= half
    window = np.zeros_like(x)
    arg = 1.0 - (x[inside] / half) ** 2
    window[inside] = np.i0(RESAMPLE_KAISER_BETA * np.sqrt(arg))
    window /= np.i0(RESAMPLE_KAISER_BETA)
    return core * window


def resample(w: Waveform, target_rate: int) -> Waveform:
    """Band-limited sample rate conversion via polyphase windowed sinc.

    The output keeps the input bit depth (values re-rounded and saturated)
    and preserves duration to within one output sample. Equal source and
    target rates return an identical copy.
    """
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == w.sample_rate:
        return Waveform(w.samples.copy(), w.sample_rate, w.bit_depth)

    g = math.gcd(w.sample_rate, target_rate)
    up = target_rate // g
    down = w.sample_rate // g
    t_in = w.samples.size
    t_out = (t_in * up) // down
    if t_out < 1:
        raise ValueError("input too short to produce any output sample")

    cutoff_hz = RESAMPLE_CUTOFF_FRACTION * (min(w.sample_rate, target_rate) / 2.0)
    cutoff = cutoff_hz / w.sample_rate  # cycles per input sample

    half = RESAMPLE_TAPS // 2
    # Output n sits at input time n*down/up; only `up` distinct fractional
    # phases occur, so precompute one 64-tap filter row per phase, each
    # normalized to unit DC gain.
    phases = (np.arange(up) * down % up) / up
    tap_index = np.arange(RESAMPLE_TAPS) - (half - 1)
    table = _kaiser_sinc(tap_index[None, :] - phases[:, None], cutoff)
    table /= table.sum(axis=1, keepdims=True)

    x = np.zeros(t_in + RESAMPLE_TAPS, dtype=np.float64)
    x[half - 1 : half - 1 + t_in] = w.samples  # zero padding beyond the edges

    out = np.empty(t_out, dtype=np.float64)
    n = np.arange(t_out)
    base = (n * down) // up
    phase_of = n % up
    chunk = 65536
    for start in range(0, t_out, chunk):
        stop = min(start + chunk, t_out)
        idx = base[start:stop, None] + np.arange(RESAMPLE_TAPS)[None, :]
        out[start:stop] = np.einsum(
            "ij,ij->i", x[idx], table[phase_of[start:stop]]
        )
    return Waveform(_saturate(out, w.bit_depth), target_rate, w.bit_depth)


# --------------------------------------------------------------------------
# Segmentation / noise
# --------------------------------------------------------------------------


def segment(w: Waveform, seconds: float) -> list[Waveform]:
    """Split into consecutive segments of floor(seconds*rate) samples.

    A trailing remainder shorter than one segment is dropped.
    """
    seg_len = int(seconds * w.sample_rate)
    if seg_len < 1:
        raise ValueError("segment length must cover at least one sample")
    count = w.samples.size // seg_len
    return [
        Waveform(w.samples[i * seg_len : (i + 1) * seg_len].copy(),
                 w.sample_rate, w.bit_depth)
        for i in range(count)
    ]


def signal_power(w: Waveform) -> float:
    """Mean squared sample value."""
    s = w.samples.astype(np.float64)
    return float(np.mean(s * s))


def mix_noise(w: Waveform, spec: SnrSpec, seed: int) -> Waveform:
    """Add white Gaussian noise at an exact SNR, then re-quantize.

    The noise vector is rescaled so that 10*log10(P_signal/P_noise) equals
    ``spec.snr_db`` exactly before rounding, which keeps the realized SNR
    within tolerance for any clip length and seed. The clean sentinel
    (snr_db = +inf) returns an identical copy.
    """
    if spec.is_clean:
        return Waveform(w.samples.copy(), w.sample_rate, w.bit_depth)
    p_signal = signal_power(w)
    if p_signal <= 0:
        raise DataError("SNR undefined for a silent clip (signal power is 0)")
    p_noise = p_signal / (10.0 ** (spec.snr_db / 10.0))

    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(w.samples.size)
    realized = float(np.mean(noise * noise))
    if realized <= 0:  # only possible for degenerate draws at tiny lengths
        noise = np.ones_like(noise)
        realized = 1.0
    noise *= math.sqrt(p_noise / realized)

    noisy = w.samples.astype(np.float64) + noise
    return Waveform(_saturate(noisy, w.bit_depth), w.sample_rate, w.bit_depth)
