"""Bit-level views of integer waveforms.

A B-bit sample becomes a length-B two's-complement bit vector (MSB first, so
bit 0 is the sign). Stacking those vectors per time step yields either

* a set of B binary pulse channels, one per bit position, shape (B, T), or
* a binary pattern image, shape (T, B).

Both transforms are exact inverses of integer PCM, which is what makes them
usable as lossless network inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bitwave.audio_io import Waveform, sample_range
from bitwave.errors import ShapeError

NUMERIC_MAPPINGS = ("unipolar01", "bipolar")


@dataclass(eq=False)
class BitPulseSet:
    """B binary channels over time; channel 0 is the MSB (sign) pulse."""

    channels: np.ndarray  # (B, T), uint8 in {0, 1}
    sample_rate: int
    bit_depth: int

    def __post_init__(self):
        self.channels = np.ascontiguousarray(self.channels, dtype=np.uint8)
        if self.channels.ndim != 2:
            raise ShapeError("channels must be a (B, T) array")
        if self.channels.shape[0] != self.bit_depth:
            raise ShapeError(
                f"expected {self.bit_depth} channels, got {self.channels.shape[0]}"
            )
        if self.channels.size and self.channels.max() > 1:
            raise ValueError("channel values must be 0 or 1")

    @property
    def length(self) -> int:
        return int(self.channels.shape[1])


@dataclass(eq=False)
class BitPatternImage:
    """T x B binary matrix; row t is the bit vector of sample t, MSB first."""

    grid: np.ndarray  # (T, B), uint8 in {0, 1}
    sample_rate: int

    def __post_init__(self):
        self.grid = np.ascontiguousarray(self.grid, dtype=np.uint8)
        if self.grid.ndim != 2:
            raise ShapeError("grid must be a (T, B) array")
        if self.grid.size and self.grid.max() > 1:
            raise ValueError("grid values must be 0 or 1")

    @property
    def bit_depth(self) -> int:
        return int(self.grid.shape[1])

    @property
    def length(self) -> int:
        return int(self.grid.shape[0])


def _unpack(samples: np.ndarray, bit_depth: int) -> np.ndarray:
    """(T,) signed ints -> (T, B) two's-complement bits, MSB first."""
    unsigned = samples.astype(np.int64) & ((1 << bit_depth) - 1)
    shifts = np.arange(bit_depth - 1, -1, -1, dtype=np.int64)
    return ((unsigned[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _pack(bits: np.ndarray) -> np.ndarray:
    """(T, B) bits, MSB first -> (T,) signed ints via two's complement."""
    bit_depth = bits.shape[1]
    weights = 1 << np.arange(bit_depth - 1, -1, -1, dtype=np.int64)
    unsigned = bits.astype(np.int64) @ weights
    return unsigned - (bits[:, 0].astype(np.int64) << bit_depth)


def sample_to_bits(s: int, bit_depth: int) -> np.ndarray:
    """Encode one signed integer as its two's-complement bit vector."""
    lo, hi = sample_range(bit_depth)
    if not lo <= s <= hi:
        raise ValueError(f"sample {s} out of range [{lo}, {hi}] for {bit_depth} bits")
    return _unpack(np.array([s]), bit_depth)[0]


def bits_to_sample(bits) -> int:
    """Decode a two's-complement bit vector back to its signed integer."""
    v = np.asarray(bits)
    if v.ndim != 1 or v.size < 1:
        raise ShapeError("bit vector must be 1-D and non-empty")
    if not np.isin(v, (0, 1)).all():
        raise ValueError("bit vector entries must be 0 or 1")
    return int(_pack(v.astype(np.uint8)[None, :])[0])


def to_bit_pulses(w: Waveform) -> BitPulseSet:
    """Decompose a waveform into one binary pulse channel per bit position."""
    bits = _unpack(w.samples, w.bit_depth)
    return BitPulseSet(
        channels=bits.T, sample_rate=w.sample_rate, bit_depth=w.bit_depth
    )


def from_bit_pulses(p: BitPulseSet) -> Waveform:
    """Exact inverse of :func:`to_bit_pulses`."""
    samples = _pack(p.channels.T)
    return Waveform(samples=samples, sample_rate=p.sample_rate, bit_depth=p.bit_depth)


def to_bit_image(w: Waveform) -> BitPatternImage:
    """Render a waveform as its (T, B) bit pattern image."""
    return BitPatternImage(grid=_unpack(w.samples, w.bit_depth),
                           sample_rate=w.sample_rate)


def from_bit_image(img: BitPatternImage) -> Waveform:
    """Exact inverse of :func:`to_bit_image`."""
    samples = _pack(img.grid)
    return Waveform(samples=samples, sample_rate=img.sample_rate,
                    bit_depth=img.bit_depth)


def bits_to_numeric(data, mapping: str = "unipolar01") -> np.ndarray:
    """Map bit data to float64 network inputs, preserving shape.

    ``unipolar01`` keeps {0, 1}; ``bipolar`` maps 0 -> -1 and 1 -> +1.
    Accepts a BitPulseSet ((B, T) output), a BitPatternImage ((T, B) output),
    or a raw binary array.
    """
    if mapping not in NUMERIC_MAPPINGS:
        raise ValueError(f"mapping must be one of {NUMERIC_MAPPINGS}")
    if isinstance(data, BitPulseSet):
        bits = data.channels
    elif isinstance(data, BitPatternImage):
        bits = data.grid
    else:
        bits = np.asarray(data, dtype=np.uint8)
    out = bits.astype(np.float64)
    if mapping == "bipolar":
        out = out * 2.0 - 1.0
    return out
