"""Checkpoint container: model kind + config + parameter tensors.

Layout:

    magic    4 bytes  b"BWCK"
    version  u8       currently 1
    hdr_len  u32      length of the JSON header
    header   JSON     {"kind", "config", "params": [{"name","shape"}...],
                       "has_optimizer", "extra"}
    payload  float64 LE tensors in header order; optimizer velocity tensors
             follow with identical shapes when has_optimizer is true.

The JSON header is dumped with sorted keys, so identical models produce
byte-identical files.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from bitwave.errors import ConfigError, WavError

MAGIC = b"BWCK"
VERSION = 1


def save_checkpoint(path, kind: str, config: dict, params,
                    optimizer_arrays=None, extra: dict | None = None) -> None:
    """`params` is an ordered list of Param objects (or (name, array) pairs)."""
    entries = []
    arrays = []
    for p in params:
        name, data = (p.name, p.data) if hasattr(p, "data") else p
        entries.append({"name": name, "shape": list(data.shape)})
        arrays.append(np.ascontiguousarray(data, dtype="<f8"))
    header = {
        "kind": kind,
        "config": config,
        "params": entries,
        "has_optimizer": optimizer_arrays is not None,
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BI", VERSION, len(blob)))
        fh.write(blob)
        for a in arrays:
            fh.write(a.tobytes())
        if optimizer_arrays is not None:
            for a in optimizer_arrays:
                fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_checkpoint(path) -> dict:
    """Returns {"kind", "config", "arrays", "optimizer_arrays", "extra"}."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise WavError(f"{path}: not a checkpoint file (bad magic)")
    version, hdr_len = struct.unpack_from("<BI", data, 4)
    if version != VERSION:
        raise ConfigError(f"{path}: unsupported checkpoint version {version}")
    header = json.loads(data[9 : 9 + hdr_len].decode("utf-8"))
    offset = 9 + hdr_len
    arrays = []
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset)
        arrays.append((entry["name"], arr.reshape(shape).copy()))
        offset += count * 8
    optimizer_arrays = None
    if header.get("has_optimizer"):
        optimizer_arrays = []
        for entry in header["params"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset)
            optimizer_arrays.append(arr.reshape(shape).copy())
            offset += count * 8
    return {
        "kind": header["kind"],
        "config": header["config"],
        "arrays": arrays,
        "optimizer_arrays": optimizer_arrays,
        "extra": header.get("extra", {}),
    }
