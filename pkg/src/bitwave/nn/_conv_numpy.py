"""Numpy convolution kernels: im2col views reduced with einsum/BLAS.

Same call contracts as the compiled module in _convkernels.pyx; the backend
module picks one of the two at import time.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv1d_forward(x, w, b, stride):
    cols = sliding_window_view(x, w.shape[2], axis=2)[:, :, ::stride, :]
    y = np.einsum("nclk,ock->nol", cols, w, optimize=True)
    y += b[None, :, None]
    return y


def conv1d_backward(x, w, stride, gy):
    k = w.shape[2]
    l_out = gy.shape[2]
    cols = sliding_window_view(x, k, axis=2)[:, :, ::stride, :]
    gw = np.einsum("nclk,nol->ock", cols, gy, optimize=True)
    gb = gy.sum(axis=(0, 2))
    gx = np.zeros_like(x)
    for kk in range(k):
        contrib = np.einsum("nol,oc->ncl", gy, w[:, :, kk], optimize=True)
        gx[:, :, kk : kk + stride * l_out : stride] += contrib
    return gx, gw, gb


def conv2d_forward(x, w, b, stride_h, stride_w):
    kh, kw = w.shape[2], w.shape[3]
    cols = sliding_window_view(x, (kh, kw), axis=(2, 3))[:, :, ::stride_h, ::stride_w]
    y = np.einsum("nchwij,ocij->nohw", cols, w, optimize=True)
    y += b[None, :, None, None]
    return y


def conv2d_backward(x, w, stride_h, stride_w, gy):
    kh, kw = w.shape[2], w.shape[3]
    h_out, w_out = gy.shape[2], gy.shape[3]
    cols = sliding_window_view(x, (kh, kw), axis=(2, 3))[:, :, ::stride_h, ::stride_w]
    gw = np.einsum("nchwij,nohw->ocij", cols, gy, optimize=True)
    gb = gy.sum(axis=(0, 2, 3))
    gx = np.zeros_like(x)
    for ki in range(kh):
        for kj in range(kw):
            contrib = np.einsum("nohw,oc->nchw", gy, w[:, :, ki, kj], optimize=True)
            gx[:, :,
               ki : ki + stride_h * h_out : stride_h,
               kj : kj + stride_w * w_out : stride_w] += contrib
    return gx, gw, gb
