"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""

from __future__ import annotations

import numpy as np


def score_rows(rows: np.ndarray, query: np.ndarray) -> np.ndarray:
    if query.shape[0] != rows.shape[1]:
        raise ValueError("query length does not match row length")
    return rows.astype(np.int64) @ query.astype(np.int64)


def combo_scores(residual: np.ndarray, rows: np.ndarray, counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("need at least one group")
    if rows.shape[1] != residual.shape[0]:
        raise ValueError("row length does not match residual length")
    if np.any(counts <= 0):
        return np.empty(0, dtype=np.int64)
    bounds = np.concatenate([[0], np.cumsum(counts)])
    partial = residual.astype(np.int64)[None, :]
    for g in range(counts.size - 1):
        group = rows[bounds[g]:bounds[g + 1]].astype(np.int64)
        partial = (partial[:, None, :] * group[None, :, :]).reshape(-1, residual.shape[0])
    last = rows[bounds[-2]:bounds[-1]].astype(np.int64)
    return (partial @ last.T).reshape(-1)


def resonator_project(codebook: np.ndarray, u: np.ndarray) -> np.ndarray:
    if u.shape[0] != codebook.shape[1]:
        raise ValueError("vector length does not match codebook width")
    cb = codebook.astype(np.int64)
    accum = cb.T @ (cb @ u.astype(np.int64))
    return np.where(accum >= 0, 1, -1).astype(np.int8)
