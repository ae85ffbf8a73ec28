"""Bundling-binding-bundling encoding of objects and scenes.

One object: for every class, clip(LABEL + items along its path) (or
clip(LABEL + NULL) when the class is absent), then bind the class clauses.
A scene is the unclipped sum of its objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codebook import NULL, Hierarchy, ItemPath
from .errors import EmptyInputError, PathNotFoundError
from .vsa import Domain, Hypervector


@dataclass(frozen=True)
class ObjectDescription:
    """Per-class item path (tuple of level indices, depth >= 1) or NULL.

    An int is shorthand for a depth-1 path and an ``ItemPath`` is accepted
    as long as its class index matches its position.
    """

    assignments: tuple

    def __post_init__(self):
        norm = []
        for c, a in enumerate(self.assignments):
            if a is NULL or a is None:
                norm.append(NULL)
                continue
            if isinstance(a, ItemPath):
                if a.class_index != c:
                    raise PathNotFoundError(f"path for class {a.class_index} given at position {c}")
                a = a.levels
            elif isinstance(a, (int, np.integer)):
                a = (a,)
            a = tuple(int(i) for i in a)
            if not a:
                raise PathNotFoundError(f"class {c}: empty path; use NULL for an absent class")
            norm.append(a)
        object.__setattr__(self, "assignments", tuple(norm))

    def __len__(self) -> int:
        return len(self.assignments)

    def path(self, class_index: int):
        a = self.assignments[class_index]
        return NULL if a is NULL else ItemPath(class_index, a)


def _as_description(obj) -> ObjectDescription:
    return obj if isinstance(obj, ObjectDescription) else ObjectDescription(tuple(obj))


@dataclass(frozen=True, eq=False)
class EncodedTarget:
    hv: Hypervector
    hierarchy: Hierarchy
    num_objects_hint: int | None = None


def clause(h: Hierarchy, class_index: int, assignment) -> np.ndarray:
    """Clipped bundle of the class label with its path items (or with NULL)."""
    total = h.labels[class_index].astype(np.int16)
    if assignment is NULL:
        total = total + h.null
    else:
        for depth in range(1, len(assignment) + 1):
            total = total + h.item_row(class_index, assignment[:depth])
    return np.sign(total).astype(np.int8)


def object_array(h: Hierarchy, obj) -> np.ndarray:
    """Raw int8 encoding of one object (the fast path behind :func:`encode_object`)."""
    obj = _as_description(obj)
    if len(obj) != h.num_classes:
        raise PathNotFoundError(f"object has {len(obj)} class entries, hierarchy has {h.num_classes}")
    out = np.ones(h.dim, dtype=np.int8)
    for c, a in enumerate(obj.assignments):
        if a is not NULL and len(a) > h.num_levels:
            raise PathNotFoundError(f"class {c}: path depth {len(a)} exceeds {h.num_levels} levels")
        out *= clause(h, c, a)
    return out


def encode_object(h: Hierarchy, obj) -> Hypervector:
    return Hypervector(object_array(h, obj), Domain.TERNARY)


def encode_scene(h: Hierarchy, objs: Sequence, with_hint: bool = False) -> EncodedTarget:
    """Unclipped sum of the object encodings."""
    if len(objs) == 0:
        raise EmptyInputError("a scene needs at least one object")
    hint = len(objs) if with_hint else None
    if len(objs) == 1:
        return EncodedTarget(encode_object(h, objs[0]), h, hint)
    total = np.zeros(h.dim, dtype=np.int32)
    for obj in objs:
        total += object_array(h, obj)
    return EncodedTarget(Hypervector(total, Domain.INTEGER), h, hint)
