# cython: language_level=3
"""Compiled inner loops for codebook scans, combination checks and the resonator sweep.

Every function here has a numpy twin in :mod:`factorhd._fallback` with the
identical signature and output; :mod:`factorhd.kernels` picks one at import.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int8_t, int32_t, int64_t

cnp.import_array()


def score_rows(const int8_t[:, ::1] rows, const int32_t[::1] query):
    """Integer dot product of every row with ``query`` (int64 accumulation)."""
    cdef Py_ssize_t k, d
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t dim = rows.shape[1]
    cdef int64_t acc
    if query.shape[0] != dim:
        raise ValueError("query length does not match row length")
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for k in range(n):
            acc = 0
            for d in range(dim):
                acc += rows[k, d] * query[d]
            o[k] = acc
    return out


def combo_scores(const int32_t[::1] residual, const int8_t[:, ::1] rows,
                 const int64_t[::1] counts):
    """Dot of ``residual`` with the product of one row per group, for every combination.

    ``rows`` stacks the groups back to back (group g owns ``counts[g]`` rows).
    Output is flat in row-major order over the groups, last group fastest.
    Prefix products are cached per depth, so each combination costs one
    pass over the last group.
    """
    cdef Py_ssize_t n_groups = counts.shape[0]
    cdef Py_ssize_t dim = residual.shape[0]
    cdef Py_ssize_t g, d, j, total = 1, pos = 0
    cdef int64_t acc
    if n_groups == 0:
        raise ValueError("need at least one group")
    if rows.shape[1] != dim:
        raise ValueError("row length does not match residual length")
    for g in range(n_groups):
        if counts[g] <= 0:
            return np.empty(0, dtype=np.int64)
        total *= counts[g]

    offsets_np = np.zeros(n_groups, dtype=np.int64)
    cdef int64_t[::1] offsets = offsets_np
    for g in range(1, n_groups):
        offsets[g] = offsets[g - 1] + counts[g - 1]

    # prefix[g] = residual * row(group 0) * ... * row(group g-1)
    prefix_np = np.empty((n_groups, dim), dtype=np.int32)
    cdef int32_t[:, ::1] prefix = prefix_np
    idx_np = np.zeros(n_groups, dtype=np.int64)
    cdef int64_t[::1] idx = idx_np
    out = np.empty(total, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t last = n_groups - 1
    cdef Py_ssize_t start = 1  # first depth whose prefix is stale
    cdef const int8_t[:] r

    with nogil:
        for d in range(dim):
            prefix[0, d] = residual[d]
        while True:
            for g in range(start, n_groups):
                for d in range(dim):
                    prefix[g, d] = prefix[g - 1, d] * rows[offsets[g - 1] + idx[g - 1], d]
            for j in range(counts[last]):
                acc = 0
                for d in range(dim):
                    acc += prefix[last, d] * rows[offsets[last] + j, d]
                o[pos] = acc
                pos += 1
            # odometer over groups 0..last-1
            g = last - 1
            while g >= 0:
                idx[g] += 1
                if idx[g] < counts[g]:
                    break
                idx[g] = 0
                g -= 1
            if g < 0:
                break
            start = g + 1
    return out


def resonator_project(const int8_t[:, ::1] codebook, const int8_t[::1] u):
    """sign(codebook.T @ (codebook @ u)) with ties resolved to +1."""
    cdef Py_ssize_t m = codebook.shape[0]
    cdef Py_ssize_t dim = codebook.shape[1]
    cdef Py_ssize_t k, d
    cdef int64_t acc
    if u.shape[0] != dim:
        raise ValueError("vector length does not match codebook width")
    coef_np = np.empty(m, dtype=np.int32)
    cdef int32_t[::1] coef = coef_np
    accum_np = np.zeros(dim, dtype=np.int64)
    cdef int64_t[::1] accum = accum_np
    out = np.empty(dim, dtype=np.int8)
    cdef int8_t[::1] o = out
    with nogil:
        for k in range(m):
            acc = 0
            for d in range(dim):
                acc += codebook[k, d] * u[d]
            coef[k] = <int32_t>acc
        for k in range(m):
            for d in range(dim):
                accum[d] += coef[k] * codebook[k, d]
        for d in range(dim):
            o[d] = 1 if accum[d] >= 0 else -1
    return out
