# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled direct-convolution kernels (forward and backward).

Plain serial loops over typed memoryviews: every output cell is accumulated
in a fixed order, so results are bit-reproducible and independent of any
threading configuration. The numpy backend in _conv_numpy.py implements the
same contracts via im2col + BLAS.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv1d_forward(double[:, :, ::1] x, double[:, :, ::1] w,
                   double[::1] b, int stride):
    cdef Py_ssize_t n_items = x.shape[0], c_in = x.shape[1], length = x.shape[2]
    cdef Py_ssize_t c_out = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t l_out = (length - k) // stride + 1
    y_arr = np.empty((n_items, c_out, l_out), dtype=np.float64)
    cdef double[:, :, ::1] y = y_arr
    cdef Py_ssize_t n, oc, j, c, kk, base
    cdef double acc
    with nogil:
        for n in range(n_items):
            for oc in range(c_out):
                for j in range(l_out):
                    base = j * stride
                    acc = b[oc]
                    for c in range(c_in):
                        for kk in range(k):
                            acc += x[n, c, base + kk] * w[oc, c, kk]
                    y[n, oc, j] = acc
    return y_arr


def conv1d_backward(double[:, :, ::1] x, double[:, :, ::1] w, int stride,
                    double[:, :, ::1] gy):
    cdef Py_ssize_t n_items = x.shape[0], c_in = x.shape[1], length = x.shape[2]
    cdef Py_ssize_t c_out = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t l_out = gy.shape[2]
    gx_arr = np.zeros((n_items, c_in, length), dtype=np.float64)
    gw_arr = np.zeros((c_out, c_in, k), dtype=np.float64)
    gb_arr = np.zeros(c_out, dtype=np.float64)
    cdef double[:, :, ::1] gx = gx_arr
    cdef double[:, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t n, oc, j, c, kk, base
    cdef double g
    with nogil:
        for n in range(n_items):
            for oc in range(c_out):
                for j in range(l_out):
                    g = gy[n, oc, j]
                    gb[oc] += g
                    base = j * stride
                    for c in range(c_in):
                        for kk in range(k):
                            gx[n, c, base + kk] += g * w[oc, c, kk]
                            gw[oc, c, kk] += g * x[n, c, base + kk]
    return gx_arr, gw_arr, gb_arr


def conv2d_forward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                   double[::1] b, int stride_h, int stride_w):
    cdef Py_ssize_t n_items = x.shape[0], c_in = x.shape[1]
    cdef Py_ssize_t height = x.shape[2], width = x.shape[3]
    cdef Py_ssize_t c_out = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t h_out = (height - kh) // stride_h + 1
    cdef Py_ssize_t w_out = (width - kw) // stride_w + 1
    y_arr = np.empty((n_items, c_out, h_out, w_out), dtype=np.float64)
    cdef double[:, :, :, ::1] y = y_arr
    cdef Py_ssize_t n, oc, i, j, c, ki, kj, bi, bj
    cdef double acc
    with nogil:
        for n in range(n_items):
            for oc in range(c_out):
                for i in range(h_out):
                    bi = i * stride_h
                    for j in range(w_out):
                        bj = j * stride_w
                        acc = b[oc]
                        for c in range(c_in):
                            for ki in range(kh):
                                for kj in range(kw):
                                    acc += (x[n, c, bi + ki, bj + kj]
                                            * w[oc, c, ki, kj])
                        y[n, oc, i, j] = acc
    return y_arr


def conv2d_backward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                    int stride_h, int stride_w, double[:, :, :, ::1] gy):
    cdef Py_ssize_t n_items = x.shape[0], c_in = x.shape[1]
    cdef Py_ssize_t height = x.shape[2], width = x.shape[3]
    cdef Py_ssize_t c_out = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t h_out = gy.shape[2], w_out = gy.shape[3]
    gx_arr = np.zeros((n_items, c_in, height, width), dtype=np.float64)
    gw_arr = np.zeros((c_out, c_in, kh, kw), dtype=np.float64)
    gb_arr = np.zeros(c_out, dtype=np.float64)
    cdef double[:, :, :, ::1] gx = gx_arr
    cdef double[:, :, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    cdef Py_ssize_t n, oc, i, j, c, ki, kj, bi, bj
    cdef double g
    with nogil:
        for n in range(n_items):
            for oc in range(c_out):
                for i in range(h_out):
                    bi = i * stride_h
                    for j in range(w_out):
                        bj = j * stride_w
                        g = gy[n, oc, i, j]
                        gb[oc] += g
                        for c in range(c_in):
                            for ki in range(kh):
                                for kj in range(kw):
                                    gx[n, c, bi + ki, bj + kj] += g * w[oc, c, ki, kj]
                                    gw[oc, c, ki, kj] += g * x[n, c, bi + ki, bj + kj]
    return gx_arr, gw_arr, gb_arr
