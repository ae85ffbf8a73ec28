"""Factorization of encoded targets back into per-class item paths.

Single objects are decoded by label elimination plus an argmax descent over
the item tree. Scenes with several (or an unknown number of) objects go
through the threshold loop: candidate items per class, combination checks
against the residual, level-by-level descent, then exact subtraction of each
reconstructed object and a re-scan of what is left.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from . import kernels
from .codebook import NULL, Hierarchy, ItemPath
from .encoder import EncodedTarget, ObjectDescription, object_array
from .errors import DimensionMismatchError, InvalidShapeError
from .vsa import Domain, Hypervector

DEFAULT_MAX_OBJECTS = 16
DEFAULT_ASSUMED_OBJECTS = 2
MIN_THRESHOLD = 0.005
DEFAULT_MAX_COMBINATIONS = 1 << 20


def auto_threshold(n: int, f: int, d: int, m: int) -> float:
    """Fitted optimal similarity threshold for ``n`` objects, ``f`` classes, dimension ``d``, ``m`` items.

    0.001 * (104 + 2n - 15f - 0.001d - log10(m)), floored at 0.005.
    """
    if min(n, f, d, m) < 1:
        raise ValueError(f"auto_threshold arguments must be >= 1, got n={n} f={f} d={d} m={m}")
    th = 0.001 * (104 + 2 * n - 15 * f - 0.001 * d - math.log10(m))
    return max(th, MIN_THRESHOLD)


@dataclass(frozen=True)
class ThresholdConfig:
    mode: Literal["fixed", "auto"] = "auto"
    value: float | None = None
    n_assumed: int | None = None

    def __post_init__(self):
        if self.mode == "fixed":
            if self.value is None or not 0.0 < self.value < 1.0:
                raise ValueError(f"fixed threshold must lie in (0, 1), got {self.value}")
        elif self.mode == "auto":
            if self.n_assumed is not None and self.n_assumed < 1:
                raise ValueError("n_assumed must be >= 1")
        else:
            raise ValueError(f"unknown threshold mode {self.mode!r}")

    @classmethod
    def fixed(cls, value: float) -> ThresholdConfig:
        return cls("fixed", float(value))

    @classmethod
    def auto(cls, n_assumed: int | None = None) -> ThresholdConfig:
        return cls("auto", None, n_assumed)

    def resolve(self, h: Hierarchy, hint: int | None = None) -> float:
        """Concrete threshold for ``h``; auto mode uses n_assumed, else the hint, else 2."""
        if self.mode == "fixed":
            return float(self.value)
        n = self.n_assumed or hint or DEFAULT_ASSUMED_OBJECTS
        return auto_threshold(n, h.num_classes, h.dim, h.branching[0])

    def describe(self) -> str:
        return f"{self.value:g}" if self.mode == "fixed" else "auto"


@dataclass
class Counters:
    similarity_measurements: int = 0
    combinations_tested: int = 0
    loop_iterations: int = 0

    def add(self, other: Counters) -> None:
        self.similarity_measurements += other.similarity_measurements
        self.combinations_tested += other.combinations_tested
        self.loop_iterations += other.loop_iterations


@dataclass(frozen=True)
class DecodedObject:
    assignments: tuple  # per class: tuple of level indices, or NULL
    confidence: float

    @property
    def description(self) -> ObjectDescription:
        return ObjectDescription(self.assignments)

    def path(self, class_index: int):
        a = self.assignments[class_index]
        return NULL if a is NULL else ItemPath(class_index, a)


@dataclass
class FactorizationResult:
    objects: list[DecodedObject]
    residual: Hypervector
    counters: Counters = field(default_factory=Counters)
    truncated: bool = False

    @property
    def residual_norm(self) -> float:
        r = self.residual.components.astype(np.float64)
        return float(np.sqrt(r @ r))

    def assignment_multiset(self) -> list[tuple]:
        return sorted((o.assignments for o in self.objects), key=_assignment_key)


def _assignment_key(assignments: tuple):
    return tuple((-1,) if a is NULL else a for a in assignments)


def _target_array(target, h: Hierarchy) -> tuple[np.ndarray, int | None]:
    hint = None
    if isinstance(target, EncodedTarget):
        hint = target.num_objects_hint
        target = target.hv
    arr = target.components if isinstance(target, Hypervector) else np.asarray(target)
    if arr.ndim != 1 or arr.shape[0] != h.dim:
        raise DimensionMismatchError(f"target has shape {arr.shape}, hierarchy dimension is {h.dim}")
    return arr.astype(np.int32), hint


def _label_product(h: Hierarchy) -> np.ndarray:
    return np.prod(h.labels, axis=0, dtype=np.int8)


def _unbound_all(residual: np.ndarray, h: Hierarchy, classes: Iterable[int]) -> dict[int, np.ndarray]:
    # Labels are bipolar, so "all labels except c" is the full product times label c.
    base = residual * _label_product(h)
    return {c: base * h.labels[c] for c in classes}


def unbind_labels(target, h: Hierarchy, selected_class: int) -> Hypervector:
    """Bind the target with every label except the selected class's."""
    if not 0 <= selected_class < h.num_classes:
        raise IndexError(f"class {selected_class} out of range (have {h.num_classes})")
    arr, _ = _target_array(target, h)
    out = _unbound_all(arr, h, [selected_class])[selected_class]
    domain = target.domain if isinstance(target, Hypervector) else Domain.INTEGER
    return Hypervector(out, domain)


def _scan(
    u: np.ndarray, h: Hierarchy, class_index: int, parent: tuple[int, ...], th: float, counters: Counters
) -> list[tuple[object, float]]:
    """(index, score) of children above ``th``; index -1 stands for NULL (root level only)."""
    rows = h.children(class_index, parent)
    scores = kernels.score_rows(rows, u) / h.dim
    counters.similarity_measurements += rows.shape[0]
    found = [(int(i), float(scores[i])) for i in np.flatnonzero(scores > th)]
    if not parent:
        null_score = float(kernels.score_rows(h.null[None, :], u)[0]) / h.dim
        counters.similarity_measurements += 1
        if null_score > th:
            found.append((-1, null_score))
    # descending score; items before NULL and lower index first on ties
    found.sort(key=lambda t: (-t[1], t[0] < 0, t[0]))
    return found


def candidate_items(
    unbound, h: Hierarchy, class_index: int, parent=None, th: float = 0.0, counters: Counters | None = None
) -> list[tuple[object, float]]:
    """Children of ``parent`` (class root when None) whose similarity to ``unbound`` exceeds ``th``.

    Returns ``(ItemPath or NULL, score)`` sorted by descending score.
    """
    counters = counters if counters is not None else Counters()
    arr = unbound.components if isinstance(unbound, Hypervector) else np.asarray(unbound)
    if parent is None:
        levels: tuple[int, ...] = ()
    elif isinstance(parent, ItemPath):
        levels = parent.levels
    else:
        levels = tuple(parent)
    found = _scan(arr.astype(np.int32), h, class_index, levels, th, counters)
    return [(NULL if i < 0 else ItemPath(class_index, levels + (i,)), s) for i, s in found]


def _require_levels(h: Hierarchy) -> None:
    if h.num_levels == 0:
        raise InvalidShapeError("hierarchy has no item levels to factorize")


def factorize_single(
    target, h: Hierarchy, selected_classes: Iterable[int] | None = None, counters: Counters | None = None
) -> dict[int, object]:
    """Decode a single-object target: argmax over level-1 items plus NULL, then argmax down the tree.

    Only ``selected_classes`` are scanned (all classes when None).
    """
    _require_levels(h)
    counters = counters if counters is not None else Counters()
    arr, _ = _target_array(target, h)
    classes = sorted(set(range(h.num_classes) if selected_classes is None else selected_classes))
    for c in classes:
        if not 0 <= c < h.num_classes:
            raise IndexError(f"class {c} out of range (have {h.num_classes})")
    unbound = _unbound_all(arr, h, classes)
    counters.loop_iterations += 1
    out: dict[int, object] = {}
    for c in classes:
        u = unbound[c]
        scores = kernels.score_rows(h.levels[0][c], u)
        null_score = int(kernels.score_rows(h.null[None, :], u)[0])
        counters.similarity_measurements += scores.shape[0] + 1
        best = int(np.argmax(scores))
        if null_score > scores[best]:
            out[c] = NULL
            continue
        path = (best,)
        for _ in range(1, h.num_levels):
            child_scores = kernels.score_rows(h.children(c, path), u)
            counters.similarity_measurements += child_scores.shape[0]
            path = path + (int(np.argmax(child_scores)),)
        out[c] = ItemPath(c, path)
    return out


def _combo_rows(h: Hierarchy, options: Sequence[Sequence[int]], prefix: tuple, depth: int) -> tuple[np.ndarray, list[int]]:
    rows, counts = [], []
    for c, opts in enumerate(options):
        if prefix[c] is NULL:
            rows.append(h.null[None, :])
            counts.append(1)
            continue
        children = h.children(c, prefix[c][:depth])
        block = [h.null if i < 0 else children[i] for i in opts]
        rows.append(np.stack(block))
        counts.append(len(block))
    return np.concatenate(rows), counts


def _trim_to_budget(cands: list[list], budget: int) -> list[list]:
    # Drop the weakest candidate of the widest class until the combination count fits.
    cands = [list(c) for c in cands]
    while math.prod(len(c) for c in cands) > budget:
        widest = max(range(len(cands)), key=lambda c: len(cands[c]))
        cands[widest].pop()
    return cands


class _MultiDecoder:
    def __init__(self, h: Hierarchy, th: float, counters: Counters, max_combinations: int):
        self.h = h
        self.th = th
        self.counters = counters
        self.max_combinations = max_combinations
        self.th_dot = th * h.dim

    def _accepted(self, residual: np.ndarray, options: list[list[int]], prefix: tuple, depth: int) -> list[tuple[tuple, int]]:
        rows, counts = _combo_rows(self.h, options, prefix, depth)
        scores = kernels.combo_scores(residual, rows, counts)
        self.counters.combinations_tested += scores.shape[0]
        choices = [[-2] if prefix[c] is NULL else opts for c, opts in enumerate(options)]
        out = []
        for combo, score in zip(itertools.product(*choices), scores):
            if score > self.th_dot:
                out.append((combo, int(score)))
        return out

    def level_one(self, residual: np.ndarray, unbound: dict[int, np.ndarray]) -> list[tuple[tuple, int]]:
        h = self.h
        cands = [[i for i, _ in _scan(unbound[c], h, c, (), self.th, self.counters)] for c in range(h.num_classes)]
        if any(not c for c in cands):
            return []
        cands = _trim_to_budget(cands, self.max_combinations)
        root = tuple(() for _ in range(h.num_classes))
        accepted = self._accepted(residual, cands, root, 0)
        return [(tuple(NULL if i < 0 else (i,) for i in combo), score) for combo, score in accepted]

    def descend(self, residual: np.ndarray, unbound: dict[int, np.ndarray], prefix: tuple) -> list[tuple]:
        """Complete every path of ``prefix`` to the last level; returns full assignments."""
        h = self.h
        depth = min((len(a) for a in prefix if a is not NULL), default=h.num_levels)
        if depth >= h.num_levels:
            return [prefix]
        cands: list[list[int]] = []
        for c, a in enumerate(prefix):
            if a is NULL:
                cands.append([-2])
                continue
            found = [i for i, _ in _scan(unbound[c], h, c, a, self.th, self.counters)]
            if not found:
                return []
            cands.append(found)
        cands = _trim_to_budget(cands, self.max_combinations)
        results = []
        for combo, _ in self._accepted(residual, cands, prefix, depth):
            child = tuple(a if a is NULL else a + (i,) for a, i in zip(prefix, combo))
            results.extend(self.descend(residual, unbound, child))
        return results


def _similarity_to(residual: np.ndarray, obj_arr: np.ndarray) -> float:
    return float(np.dot(residual.astype(np.int64), obj_arr.astype(np.int64))) / residual.shape[0]


def factorize_multi(
    target,
    h: Hierarchy,
    th_cfg: ThresholdConfig | float | None = None,
    max_objects: int = DEFAULT_MAX_OBJECTS,
    acceptance: Literal["batch", "sequential"] = "batch",
    max_combinations: int = DEFAULT_MAX_COMBINATIONS,
) -> FactorizationResult:
    """Threshold-loop factorization for targets holding any number of objects.

    Each loop iteration unbinds the other labels per class, keeps items whose
    similarity exceeds the threshold, and scores every one-item-per-class
    combination (the product of the item vectors) against the residual.

    ``acceptance="batch"``: all combinations above the threshold against the
    residual at the start of the iteration are descended and excluded, in
    enumeration order (class-lexicographic, candidates by descending score).

    ``acceptance="sequential"``: accepted combinations are visited by
    descending score and each is re-checked (and descended) against the live
    residual, so objects excluded earlier in the iteration cannot leave
    spurious matches behind.

    The loop stops when nothing is accepted or ``max_objects`` objects have
    been excluded; in the latter case ``truncated`` reports whether the
    residual still held a passing combination.
    """
    _require_levels(h)
    if max_objects < 1:
        raise ValueError("max_objects must be >= 1")
    if acceptance not in ("batch", "sequential"):
        raise ValueError(f"unknown acceptance policy {acceptance!r}")
    residual, hint = _target_array(target, h)
    if th_cfg is None:
        th_cfg = ThresholdConfig.auto()
    elif isinstance(th_cfg, (int, float)):
        th_cfg = ThresholdConfig.fixed(th_cfg)
    th = th_cfg.resolve(h, hint)

    counters = Counters()
    decoder = _MultiDecoder(h, th, counters, max_combinations)
    classes = range(h.num_classes)
    objects: list[DecodedObject] = []
    truncated = False

    while True:
        unbound = _unbound_all(residual, h, classes)
        if len(objects) >= max_objects:
            # probe only: is anything left that would have been accepted?
            truncated = bool(decoder.level_one(residual, unbound))
            break
        counters.loop_iterations += 1
        heads = decoder.level_one(residual, unbound)
        if not heads:
            break
        excluded = 0
        if acceptance == "batch":
            full = []
            for prefix, _ in heads:
                full.extend(decoder.descend(residual, unbound, prefix))
            for assignment in full:
                if len(objects) >= max_objects:
                    truncated = True
                    break
                obj_arr = object_array(h, assignment)
                objects.append(DecodedObject(assignment, _similarity_to(residual, obj_arr)))
                residual = residual - obj_arr
                excluded += 1
        else:
            for prefix, _ in sorted(heads, key=lambda t: -t[1]):
                if len(objects) >= max_objects:
                    break
                rows = np.stack([h.null if a is NULL else h.item_row(c, a) for c, a in enumerate(prefix)])
                counters.combinations_tested += 1
                if kernels.combo_scores(residual, rows, [1] * h.num_classes)[0] <= decoder.th_dot:
                    continue
                live_unbound = _unbound_all(residual, h, classes)
                for assignment in decoder.descend(residual, live_unbound, prefix):
                    if len(objects) >= max_objects:
                        break
                    obj_arr = object_array(h, assignment)
                    objects.append(DecodedObject(assignment, _similarity_to(residual, obj_arr)))
                    residual = residual - obj_arr
                    excluded += 1
        if excluded == 0:
            break

    return FactorizationResult(objects, Hypervector(residual, Domain.INTEGER), counters, truncated)


def reconstruct_and_exclude(residual, h: Hierarchy, obj) -> Hypervector:
    """``residual`` minus the encoding of ``obj`` (a DecodedObject or object description)."""
    arr, _ = _target_array(residual, h)
    assignments = obj.assignments if isinstance(obj, DecodedObject) else obj
    return Hypervector(arr - object_array(h, assignments), Domain.INTEGER)
