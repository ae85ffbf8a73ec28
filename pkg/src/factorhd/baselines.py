"""Comparison models: class-instance (C-I) role-filler sums and the resonator network.

The resonator factorizes a pure product of one item per codebook (the
class-class model). Estimates start from the sign of each codebook's
superposition and are updated synchronously: every factor in a sweep reads
the previous sweep's estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .codebook import Hierarchy
from .errors import DimensionMismatchError, PathNotFoundError
from .factorizer import Counters
from .vsa import Domain, Hypervector

DEFAULT_MAX_ITERATIONS = 200


@dataclass(frozen=True, eq=False)
class CIEncoded:
    hv: Hypervector
    class_labels: tuple[Hypervector, ...]
    classes: tuple[int, ...]


def ci_encode(h: Hierarchy, assignments: Sequence[int] | Mapping[int, int]) -> CIEncoded:
    """Sum over classes of LABEL_c * item, unclipped.

    ``assignments`` is either one level-1 item index per class or a mapping
    ``{class_index: item_index}`` for objects that only carry some classes.
    """
    pairs = dict(assignments) if isinstance(assignments, Mapping) else dict(enumerate(assignments))
    if not pairs:
        raise PathNotFoundError("class-instance object needs at least one attribute")
    total = np.zeros(h.dim, dtype=np.int32)
    for c, item in sorted(pairs.items()):
        if not 0 <= c < h.num_classes:
            raise PathNotFoundError(f"class {c} out of range")
        total += h.labels[c] * h.item_row(c, (int(item),))
    classes = tuple(sorted(pairs))
    labels = tuple(Hypervector(h.labels[c], Domain.BIPOLAR) for c in classes)
    return CIEncoded(Hypervector(total, Domain.INTEGER), labels, classes)


def ci_factorize(enc: CIEncoded | Hypervector | np.ndarray, h: Hierarchy, class_index: int, counters: Counters | None = None) -> int:
    """Unbind the class label and return the most similar level-1 item."""
    hv = enc.hv if isinstance(enc, CIEncoded) else enc
    arr = _as_vector(hv)
    if arr.shape != (h.dim,):
        raise DimensionMismatchError(f"encoding shape {arr.shape} != hierarchy dim {h.dim}")
    query = arr.astype(np.int32) * h.labels[class_index]
    scores = kernels.score_rows(h.levels[0][class_index], query)
    if counters is not None:
        counters.similarity_measurements += scores.shape[0]
    return int(np.argmax(scores))


@dataclass(frozen=True)
class ResonatorResult:
    indices: tuple[int, ...]
    iterations: int
    converged: bool
    similarity_measurements: int


def _sign_plus(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0, 1, -1).astype(np.int8)


def resonator_factorize(
    target,
    codebooks: Sequence,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    initial: Sequence | None = None,
) -> ResonatorResult:
    """Iterative resonator search for one item per codebook whose product is ``target``.

    Each sweep, factor i takes u = target * (product of the other estimates),
    projects it onto codebook i (items weighted by their dot with u) and keeps
    the sign. Stops when a sweep changes nothing or the estimates multiply back
    to the target exactly. Indices are read out by largest |similarity|,
    because flipping the sign of two factors leaves the product unchanged.
    """
    books = [np.ascontiguousarray(_as_matrix(cb), dtype=np.int8) for cb in codebooks]
    if not books:
        raise ValueError("need at least one codebook")
    t = target.components if isinstance(target, Hypervector) else np.asarray(target)
    t = t.astype(np.int8)
    dim = t.shape[0]
    if any(b.shape[1] != dim for b in books):
        raise DimensionMismatchError("codebook width does not match the target")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")

    if initial is None:
        est = [_sign_plus(b.sum(axis=0, dtype=np.int64)) for b in books]
    else:
        est = [_sign_plus(np.asarray(_as_vector(v), dtype=np.int64)) for v in initial]
    measurements = 0
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        prod_all = np.prod(est, axis=0, dtype=np.int8)
        new = [kernels.resonator_project(b, t * prod_all * e) for b, e in zip(books, est)]
        measurements += sum(b.shape[0] for b in books)
        stable = all(np.array_equal(a, b) for a, b in zip(new, est))
        est = new
        if stable or np.array_equal(np.prod(est, axis=0, dtype=np.int8), t):
            converged = True
            break

    indices = []
    for b, e in zip(books, est):
        scores = kernels.score_rows(b, e.astype(np.int32))
        indices.append(int(np.argmax(np.abs(scores))))
        measurements += b.shape[0]
    return ResonatorResult(tuple(indices), iterations, converged, measurements)


def _as_matrix(cb) -> np.ndarray:
    if isinstance(cb, np.ndarray):
        return cb
    return np.stack([_as_vector(v) for v in cb])


def _as_vector(v) -> np.ndarray:
    return v.components if isinstance(v, Hypervector) else np.asarray(v)


def hierarchy_codebooks(h: Hierarchy) -> list[np.ndarray]:
    """Level-1 item matrices of every class, as resonator codebooks."""
    return [h.levels[0][c] for c in range(h.num_classes)]


def product_target(h: Hierarchy, indices: Sequence[int]) -> np.ndarray:
    """Class-class encoding: product of one level-1 item per class."""
    return np.prod([h.levels[0][c, i] for c, i in enumerate(indices)], axis=0, dtype=np.int8)
