"""Convolution kernel backend selection.

Two interchangeable implementations exist: the compiled Cython module
(_convkernels) and the numpy im2col module (_conv_numpy). Selection happens
once at import time:

    BITWAVE_BACKEND=auto      compiled when built, else numpy (default)
    BITWAVE_BACKEND=compiled  require the compiled module
    BITWAVE_BACKEND=numpy     force the numpy kernels

Dispatch functions validate shapes against the valid-convolution shape law
out = floor((in - k) / s) + 1 before handing off, so both backends share one
error surface. benchmarks/bench_conv.py compares the two.
"""

from __future__ import annotations

import os

import numpy as np

from bitwave.errors import ConfigError, ShapeError

_CHOICE = os.environ.get("BITWAVE_BACKEND", "auto").lower()
if _CHOICE not in ("auto", "compiled", "numpy"):
    raise ConfigError(
        f"BITWAVE_BACKEND must be auto, compiled, or numpy; got {_CHOICE!r}"
    )

if _CHOICE == "numpy":
    from bitwave.nn import _conv_numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from bitwave.nn import _convkernels as _impl

        BACKEND = "compiled"
    except ImportError:
        if _CHOICE == "compiled":
            raise ConfigError(
                "BITWAVE_BACKEND=compiled but the extension is not built; "
                "reinstall the package or use BITWAVE_BACKEND=numpy"
            ) from None
        from bitwave.nn import _conv_numpy as _impl

        BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND


def conv_out_len(in_len: int, kernel: int, stride: int) -> int:
    """Valid-convolution output extent: floor((in - k) / s) + 1."""
    if kernel < 1 or stride < 1:
        raise ShapeError(f"kernel and stride must be >= 1, got k={kernel}, s={stride}")
    if in_len < kernel:
        raise ShapeError(
            f"input extent {in_len} is smaller than the kernel {kernel}"
        )
    return (in_len - kernel) // stride + 1


def _as_f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def conv1d_forward(x, w, b, stride: int):
    x, w, b = _as_f64(x), _as_f64(w), _as_f64(b)
    if x.ndim != 3 or w.ndim != 3 or x.shape[1] != w.shape[1]:
        raise ShapeError(
            f"conv1d expects x (N,C,L) and w (O,C,K) with matching C; got "
            f"{x.shape} and {w.shape}"
        )
    conv_out_len(x.shape[2], w.shape[2], stride)
    return _impl.conv1d_forward(x, w, b, stride)


def conv1d_backward(x, w, stride: int, gy):
    x, w, gy = _as_f64(x), _as_f64(w), _as_f64(gy)
    l_out = conv_out_len(x.shape[2], w.shape[2], stride)
    if gy.shape != (x.shape[0], w.shape[0], l_out):
        raise ShapeError(
            f"upstream gradient shape {gy.shape} does not match "
            f"{(x.shape[0], w.shape[0], l_out)}"
        )
    return _impl.conv1d_backward(x, w, stride, gy)


def conv2d_forward(x, w, b, stride_h: int, stride_w: int):
    x, w, b = _as_f64(x), _as_f64(w), _as_f64(b)
    if x.ndim != 4 or w.ndim != 4 or x.shape[1] != w.shape[1]:
        raise ShapeError(
            f"conv2d expects x (N,C,H,W) and w (O,C,KH,KW) with matching C; "
            f"got {x.shape} and {w.shape}"
        )
    conv_out_len(x.shape[2], w.shape[2], stride_h)
    conv_out_len(x.shape[3], w.shape[3], stride_w)
    return _impl.conv2d_forward(x, w, b, stride_h, stride_w)


def conv2d_backward(x, w, stride_h: int, stride_w: int, gy):
    x, w, gy = _as_f64(x), _as_f64(w), _as_f64(gy)
    h_out = conv_out_len(x.shape[2], w.shape[2], stride_h)
    w_out = conv_out_len(x.shape[3], w.shape[3], stride_w)
    if gy.shape != (x.shape[0], w.shape[0], h_out, w_out):
        raise ShapeError(
            f"upstream gradient shape {gy.shape} does not match "
            f"{(x.shape[0], w.shape[0], h_out, w_out)}"
        )
    return _impl.conv2d_backward(x, w, stride_h, stride_w, gy)
