"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``FACTORHD_KERNELS=python`` to force the fallback (the benchmark and the
backend-equivalence tests do this per call via :func:`get_backend`).
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _fallback

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS: dict[str, ModuleType] = {"python": _fallback}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def get_backend(name: str) -> ModuleType:
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(_BACKENDS)}") from None


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


_requested = os.environ.get("FACTORHD_KERNELS", "").strip().lower()
if _requested:
    BACKEND = _requested
    _impl = get_backend(_requested)
else:
    BACKEND = "cython" if _ckernels is not None else "python"
    _impl = _BACKENDS[BACKEND]


def set_backend(name: str) -> None:
    """Switch the module-wide backend (``"cython"`` or ``"python"``)."""
    global BACKEND, _impl
    _impl = get_backend(name)
    BACKEND = name


def score_rows(rows: np.ndarray, query: np.ndarray) -> np.ndarray:
    """int64 dot of each int8 row with an int32 query vector."""
    return _impl.score_rows(
        np.ascontiguousarray(rows, dtype=np.int8), np.ascontiguousarray(query, dtype=np.int32)
    )


def combo_scores(residual: np.ndarray, rows: np.ndarray, counts) -> np.ndarray:
    """Dot of ``residual`` with every one-row-per-group product (last group fastest)."""
    return _impl.combo_scores(
        np.ascontiguousarray(residual, dtype=np.int32),
        np.ascontiguousarray(rows, dtype=np.int8),
        np.ascontiguousarray(counts, dtype=np.int64),
    )


def resonator_project(codebook: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Bipolar sign of the codebook projection of ``u`` (ties go to +1)."""
    return _impl.resonator_project(
        np.ascontiguousarray(codebook, dtype=np.int8), np.ascontiguousarray(u, dtype=np.int8)
    )
