"""Classical comparison representations: framed log power spectrum with
regression deltas, MFCC, and the raw-integer view, plus the DFT machinery
(naive reference transform and a radix-2 FFT) they are built on.

Defaults: 512-sample Hamming frames with a 160-sample hop, FFT size 512,
256 spectral dims (one-sided bins 1..256, DC dropped), log floor 1e-10,
40 HTK-mel filters, 13 cepstra. All math runs in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from bitwave.audio_io import Waveform
from bitwave.errors import ConfigError, ShapeError

FFT_SIZE = 512
LOG_FLOOR = 1e-10
DELTA_WINDOW = 2

_WINDOWS = {
    "hamming": np.hamming,
    "hann": np.hanning,
    "rect": np.ones,
}


@dataclass
class FrameSpec:
    """Analysis framing: window length and hop in samples, window shape."""

    frame_length: int = 512
    hop: int = 160
    window: str = "hamming"

    def __post_init__(self):
        if not 0 < self.hop <= self.frame_length:
            raise ConfigError(
                f"hop must satisfy 0 < hop <= frame_length, got "
                f"hop={self.hop}, frame_length={self.frame_length}"
            )
        if self.window not in _WINDOWS:
            raise ConfigError(f"window must be one of {sorted(_WINDOWS)}")
        if self.frame_length > FFT_SIZE:
            raise ConfigError(
                f"frame_length {self.frame_length} exceeds FFT size {FFT_SIZE}"
            )


@dataclass(eq=False)
class FeatureMatrix:
    """Frames-by-coefficients real matrix plus descriptive metadata."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ShapeError("feature values must form a 2-D matrix")
        if not np.isfinite(self.values).all():
            raise ValueError("feature values must be finite")

    @property
    def shape(self):
        return self.values.shape

    def to_csv(self, path) -> None:
        np.savetxt(path, self.values, delimiter=",", fmt="%.10g")


# --------------------------------------------------------------------------
# DFT machinery
# --------------------------------------------------------------------------


def dft_naive(x) -> np.ndarray:
    """Direct O(N^2) DFT: X[k] = sum_n x[n] exp(-2*pi*i*k*n/N).

    Reference transform used as the oracle for :func:`fft`.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ShapeError("dft_naive expects a non-empty 1-D vector")
    n = x.size
    kn = np.outer(np.arange(n), np.arange(n))
    return np.exp(-2j * np.pi * kn / n) @ x


def fft(x) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT (power-of-two lengths only)."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ShapeError("fft expects a non-empty 1-D vector")
    n = x.size
    if n & (n - 1):
        raise ShapeError(f"fft length must be a power of two, got {n}")
    return _fft_rows(x[None, :])[0]


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def _fft_rows(x: np.ndarray) -> np.ndarray:
    """Radix-2 FFT applied independently to each row of a (rows, N) array."""
    n = x.shape[1]
    if n == 1:
        return x.copy()
    out = x[:, _bit_reverse_indices(n)].copy()
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(x.shape[0], n // size, size)
        even = blocks[:, :, :half]
        odd = blocks[:, :, half:] * twiddle
        blocks[:, :, :half] = even + odd
        blocks[:, :, half:] = even - odd
        size *= 2
    return out


# --------------------------------------------------------------------------
# Framing and spectra
# --------------------------------------------------------------------------


def frame_signal(samples: np.ndarray, spec: FrameSpec) -> np.ndarray:
    """Slice a signal into windowed frames, shape (n_frames, frame_length)."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < spec.frame_length:
        raise ShapeError(
            f"clip of {x.size} samples is shorter than one "
            f"{spec.frame_length}-sample frame"
        )
    n_frames = 1 + (x.size - spec.frame_length) // spec.hop
    idx = (np.arange(spec.frame_length)[None, :]
           + spec.hop * np.arange(n_frames)[:, None])
    return x[idx] * _WINDOWS[spec.window](spec.frame_length)


def _power_frames(samples: np.ndarray, spec: FrameSpec) -> np.ndarray:
    """One-sided power spectrum per frame, bins 0..FFT_SIZE/2 inclusive."""
    frames = frame_signal(samples, spec)
    if spec.frame_length < FFT_SIZE:
        frames = np.pad(frames, ((0, 0), (0, FFT_SIZE - spec.frame_length)))
    spectrum = _fft_rows(frames.astype(np.complex128))
    power = np.abs(spectrum[:, : FFT_SIZE // 2 + 1]) ** 2
    return power


def power_spectrum_features(w: Waveform, spec: FrameSpec | None = None) -> FeatureMatrix:
    """Log power spectrum (256 dims, DC dropped) with deltas appended.

    Column j holds FFT bin j+1 of the one-sided spectrum; the output matrix
    concatenates [static | delta | delta-delta] for 768 columns total.
    """
    spec = spec or FrameSpec()
    power = _power_frames(w.samples, spec)[:, 1 : FFT_SIZE // 2 + 1]
    static = np.log(np.maximum(power, LOG_FLOOR))
    d1 = delta_matrix(static)
    d2 = delta_matrix(d1)
    return FeatureMatrix(
        values=np.hstack([static, d1, d2]),
        meta={
            "name": "power_spectrum",
            "frame_length": spec.frame_length,
            "hop": spec.hop,
            "window": spec.window,
            "fft_size": FFT_SIZE,
            "dims": 3 * (FFT_SIZE // 2),
            "sample_rate": w.sample_rate,
        },
    )


def delta_matrix(values: np.ndarray, window: int = DELTA_WINDOW) -> np.ndarray:
    """Regression delta over frames with edge replication.

    d[t] = sum_{n=1..N} n*(c[t+n] - c[t-n]) / (2 * sum n^2)
    """
    if window < 1:
        raise ConfigError(f"delta window must be >= 1, got {window}")
    c = np.asarray(values, dtype=np.float64)
    rows = c.shape[0]
    denom = 2.0 * sum(n * n for n in range(1, window + 1))
    padded = np.vstack([np.repeat(c[:1], window, axis=0),
                        c,
                        np.repeat(c[-1:], window, axis=0)])
    d = np.zeros_like(c)
    for n in range(1, window + 1):
        d += n * (padded[window + n : window + n + rows]
                  - padded[window - n : window - n + rows])
    return d / denom


def delta(f: FeatureMatrix, window: int = DELTA_WINDOW) -> FeatureMatrix:
    """FeatureMatrix wrapper around :func:`delta_matrix`."""
    return FeatureMatrix(values=delta_matrix(f.values, window),
                         meta={**f.meta, "name": f"delta({f.meta.get('name')})"})


# --------------------------------------------------------------------------
# MFCC
# --------------------------------------------------------------------------


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, sample_rate: int, n_fft: int = FFT_SIZE) -> np.ndarray:
    """Triangular HTK-mel filterbank over one-sided FFT bins.

    Returns (n_mels, n_fft//2 + 1); each row is a triangle with unit peak.
    """
    n_bins = n_fft // 2 + 1
    freqs = np.arange(n_bins) * sample_rate / n_fft
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_mels + 2))
    fb = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        left, center, right = edges[m], edges[m + 1], edges[m + 2]
        up = (freqs - left) / max(center - left, 1e-12)
        down = (right - freqs) / max(right - center, 1e-12)
        fb[m] = np.maximum(0.0, np.minimum(up, down))
    return fb


def dct_matrix(n_out: int, n_in: int) -> np.ndarray:
    """Orthonormal DCT-II basis, rows = output coefficients."""
    k = np.arange(n_out)[:, None]
    n = np.arange(n_in)[None, :]
    mat = np.cos(np.pi * k * (2 * n + 1) / (2 * n_in)) * np.sqrt(2.0 / n_in)
    mat[0] /= np.sqrt(2.0)
    return mat


def mfcc(w: Waveform, spec: FrameSpec | None = None, n_mels: int = 40,
         n_ceps: int = 13) -> FeatureMatrix:
    """Mel-frequency cepstra with deltas: n_ceps*3 columns per frame."""
    spec = spec or FrameSpec()
    power = _power_frames(w.samples, spec)
    fb = mel_filterbank(n_mels, w.sample_rate)
    logmel = np.log(np.maximum(power @ fb.T, LOG_FLOOR))
    ceps = logmel @ dct_matrix(n_ceps, n_mels).T
    d1 = delta_matrix(ceps)
    d2 = delta_matrix(d1)
    return FeatureMatrix(
        values=np.hstack([ceps, d1, d2]),
        meta={
            "name": "mfcc",
            "frame_length": spec.frame_length,
            "hop": spec.hop,
            "window": spec.window,
            "n_mels": n_mels,
            "n_ceps": n_ceps,
            "sample_rate": w.sample_rate,
        },
    )


def raw_numeric(w: Waveform, normalize: bool = False) -> np.ndarray:
    """Waveform as a (1, T) float tensor; optionally scaled by 2^(B-1)."""
    x = w.samples.astype(np.float64)[None, :]
    if normalize:
        x = x / float(1 << (w.bit_depth - 1))
    return x
