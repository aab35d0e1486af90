# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled convolution/dense/pool loops.

Inputs arrive pre-padded and C-contiguous from the dispatch layer; the
innermost loop runs along the contiguous width axis so the compiler can
vectorize it.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def conv3d_padded(const double[:, :, :, ::1] xp, const double[:, :, :, :, ::1] w,
                  const double[::1] b):
    """Cross-correlation of a pre-padded input, stride 1.

    xp: (c_in, t+2p, h+2p, w+2p), w: (c_out, c_in, kt, kh, kw).
    One output row is accumulated at a time: the scratch row stays in L1
    and the contiguous inner loop over the width vectorizes.
    """
    cdef Py_ssize_t c_out = w.shape[0]
    cdef Py_ssize_t c_in = w.shape[1]
    cdef Py_ssize_t kt = w.shape[2]
    cdef Py_ssize_t kh = w.shape[3]
    cdef Py_ssize_t kw = w.shape[4]
    cdef Py_ssize_t t_out = xp.shape[1] - kt + 1
    cdef Py_ssize_t h_out = xp.shape[2] - kh + 1
    cdef Py_ssize_t w_out = xp.shape[3] - kw + 1

    out_arr = np.empty((c_out, t_out, h_out, w_out), dtype=np.float64)
    cdef double[:, :, :, ::1] out = out_arr
    row_arr = np.empty(w_out, dtype=np.float64)
    cdef double[::1] row = row_arr
    cdef Py_ssize_t co, ci, t, h, x, dt, dh, dw
    cdef double coeff, bias
    cdef const double* src

    with nogil:
        for co in range(c_out):
            bias = b[co]
            for t in range(t_out):
                for h in range(h_out):
                    for x in range(w_out):
                        row[x] = bias
                    for ci in range(c_in):
                        for dt in range(kt):
                            for dh in range(kh):
                                src = &xp[ci, t + dt, h + dh, 0]
                                for dw in range(kw):
                                    coeff = w[co, ci, dt, dh, dw]
                                    for x in range(w_out):
                                        row[x] += coeff * src[x + dw]
                    for x in range(w_out):
                        out[co, t, h, x] = row[x]
    return out_arr


def dense(const double[::1] v, const double[:, ::1] w, const double[::1] b):
    cdef Py_ssize_t rows = w.shape[0]
    cdef Py_ssize_t cols = w.shape[1]
    out_arr = np.empty(rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc
    with nogil:
        for i in range(rows):
            acc = b[i]
            for j in range(cols):
                acc += w[i, j] * v[j]
            out[i] = acc
    return out_arr


def global_avg_pool(const double[:, :, :, ::1] x):
    cdef Py_ssize_t c = x.shape[0]
    cdef Py_ssize_t n = x.shape[1] * x.shape[2] * x.shape[3]
    out_arr = np.empty(c, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t ci, t, h, j
    cdef double acc
    with nogil:
        for ci in range(c):
            acc = 0.0
            for t in range(x.shape[1]):
                for h in range(x.shape[2]):
                    for j in range(x.shape[3]):
                        acc += x[ci, t, h, j]
            out[ci] = acc / n
    return out_arr
