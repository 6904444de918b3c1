"""Binary container for transform outputs.

Layout (all integers little-endian):

    magic   4 bytes  b"BWCT"
    version u8       currently 1
    type    u8       1 = bit pulse set, 2 = bit pattern image, 3 = features

followed by a type-specific header and a row-major payload:

    bit data:  bit_depth u8, sample_rate u32, length u64,
               then B*T (pulses, channel-major) or T*B (image) bytes in {0,1}
    features:  rows u32, cols u32, meta_len u32, meta JSON (UTF-8),
               then rows*cols float64 values

One byte per bit keeps the format trivially seekable; payloads are small at
the clip scale this tool targets.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from bitwave.bitrep import BitPatternImage, BitPulseSet
from bitwave.errors import WavError
from bitwave.features import FeatureMatrix

MAGIC = b"BWCT"
VERSION = 1
TYPE_BIT_PULSES = 1
TYPE_BIT_IMAGE = 2
TYPE_FEATURES = 3

_TYPE_NAMES = {
    TYPE_BIT_PULSES: "bit_pulses",
    TYPE_BIT_IMAGE: "bit_image",
    TYPE_FEATURES: "features",
}


def write_container(obj, path) -> None:
    """Serialize a BitPulseSet, BitPatternImage, or FeatureMatrix."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        if isinstance(obj, BitPulseSet):
            fh.write(struct.pack("<BBBIQ", VERSION, TYPE_BIT_PULSES,
                                 obj.bit_depth, obj.sample_rate, obj.length))
            fh.write(obj.channels.tobytes())
        elif isinstance(obj, BitPatternImage):
            fh.write(struct.pack("<BBBIQ", VERSION, TYPE_BIT_IMAGE,
                                 obj.bit_depth, obj.sample_rate, obj.length))
            fh.write(obj.grid.tobytes())
        elif isinstance(obj, FeatureMatrix):
            meta = json.dumps(obj.meta, sort_keys=True).encode("utf-8")
            rows, cols = obj.values.shape
            fh.write(struct.pack("<BBIII", VERSION, TYPE_FEATURES, rows, cols,
                                 len(meta)))
            fh.write(meta)
            fh.write(np.ascontiguousarray(obj.values, dtype="<f8").tobytes())
        else:
            raise TypeError(f"cannot serialize {type(obj).__name__}")


def read_container(path):
    """Read back whatever :func:`write_container` wrote."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise WavError(f"{path}: not a bitwave container (bad magic)")
    version, type_tag = struct.unpack_from("<BB", data, 4)
    if version != VERSION:
        raise WavError(f"{path}: unsupported container version {version}")

    if type_tag in (TYPE_BIT_PULSES, TYPE_BIT_IMAGE):
        bit_depth, rate, length = struct.unpack_from("<BIQ", data, 6)
        payload = np.frombuffer(data, dtype=np.uint8,
                                count=bit_depth * length, offset=21)
        if type_tag == TYPE_BIT_PULSES:
            return BitPulseSet(channels=payload.reshape(bit_depth, length).copy(),
                               sample_rate=rate, bit_depth=bit_depth)
        return BitPatternImage(grid=payload.reshape(length, bit_depth).copy(),
                               sample_rate=rate)
    if type_tag == TYPE_FEATURES:
        rows, cols, meta_len = struct.unpack_from("<III", data, 6)
        meta = json.loads(data[18 : 18 + meta_len].decode("utf-8"))
        values = np.frombuffer(data, dtype="<f8", count=rows * cols,
                               offset=18 + meta_len).reshape(rows, cols)
        return FeatureMatrix(values=values.copy(), meta=meta)
    raise WavError(f"{path}: unknown container type tag {type_tag}")


def describe_container(path) -> dict:
    """Header summary without materializing the payload (for `inspect`)."""
    with open(path, "rb") as fh:
        head = fh.read(64)
    if head[:4] != MAGIC:
        raise WavError(f"{path}: not a bitwave container (bad magic)")
    version, type_tag = struct.unpack_from("<BB", head, 4)
    info = {"version": version, "type": _TYPE_NAMES.get(type_tag, f"unknown({type_tag})")}
    if type_tag in (TYPE_BIT_PULSES, TYPE_BIT_IMAGE):
        bit_depth, rate, length = struct.unpack_from("<BIQ", head, 6)
        info.update(bit_depth=bit_depth, sample_rate=rate, length=length)
        info["shape"] = ((bit_depth, length) if type_tag == TYPE_BIT_PULSES
                         else (length, bit_depth))
    elif type_tag == TYPE_FEATURES:
        rows, cols, _ = struct.unpack_from("<III", head, 6)
        info["shape"] = (rows, cols)
    return info
