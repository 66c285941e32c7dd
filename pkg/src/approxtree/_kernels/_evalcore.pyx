# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled quantized-inference kernel: per-sample tree traversal."""

import numpy as np

cimport numpy as cnp


def predict_batch(
    const cnp.uint32_t[:, ::1] codes,
    const cnp.int32_t[::1] feature,
    const cnp.int32_t[::1] shift,
    const cnp.uint32_t[::1] thr,
    const cnp.int32_t[::1] left,
    const cnp.int32_t[::1] right,
    const cnp.int32_t[::1] label,
    int root,
):
    cdef Py_ssize_t s, n_samples = codes.shape[0]
    cdef int i
    out = np.empty(n_samples, dtype=np.int32)
    cdef cnp.int32_t[::1] o = out
    with nogil:
        for s in range(n_samples):
            i = root
            while left[i] >= 0:
                if (codes[s, feature[i]] >> shift[i]) <= thr[i]:
                    i = left[i]
                else:
                    i = right[i]
            o[s] = label[i]
    return out
