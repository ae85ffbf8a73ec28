"""Class-subclass codebooks: per-class label vectors, item trees, and the shared NULL vector.

Items are stored level by level. Level ``k`` of class ``c`` is an int8 array of
shape ``(prod(branching[:k+1]), D)`` indexed by the flattened path, so the
children of flat index ``p`` at the next level occupy the contiguous block
``p * M_next : (p + 1) * M_next``.

File layout (little-endian)::

    b"FHD1" | version:u8 | dim:u32 | classes:u32 | levels:u32 | branching:u32*levels | seed:u64
    then, per class: label, then the item tree depth-first; finally NULL.
    Every vector uses the ``Hypervector.to_bytes`` encoding.
"""

from __future__ import annotations

import io
import math
import os
import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterator, Sequence

import numpy as np

from .errors import CorruptCodebookError, InvalidDimensionError, InvalidShapeError, PathNotFoundError
from .vsa import Domain, Hypervector, random_bipolar

MAGIC = b"FHD1"
FORMAT_VERSION = 1


class _Null:
    """Marker for an absent class (the object has no item of that class)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NULL"

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()


@dataclass(frozen=True)
class ItemPath:
    """Address of a node in one class tree; an empty ``levels`` addresses the class label."""

    class_index: int
    levels: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(i) for i in self.levels))

    @property
    def depth(self) -> int:
        return len(self.levels)

    def child(self, index: int) -> ItemPath:
        return ItemPath(self.class_index, self.levels + (int(index),))


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the stream ``key`` under ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(key))))


@dataclass(frozen=True, eq=False)
class Hierarchy:
    dim: int
    num_classes: int
    branching: tuple[int, ...]
    seed: int
    labels: np.ndarray  # (F, D) int8
    levels: tuple[np.ndarray, ...]  # levels[k]: (F, prod(branching[:k+1]), D) int8
    null: np.ndarray  # (D,) int8

    def __post_init__(self):
        for arr in (self.labels, self.null, *self.levels):
            arr.setflags(write=False)

    @property
    def num_levels(self) -> int:
        return len(self.branching)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hierarchy):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.num_classes == other.num_classes
            and self.branching == other.branching
            and self.seed == other.seed
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.null, other.null)
            and all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))
        )

    __hash__ = None

    def flat_index(self, levels: Sequence[int]) -> int:
        """Flattened row of an item path within its level array (bounds-checked)."""
        if len(levels) > self.num_levels:
            raise PathNotFoundError(f"path depth {len(levels)} exceeds {self.num_levels} levels")
        flat = 0
        for k, i in enumerate(levels):
            if not 0 <= i < self.branching[k]:
                raise PathNotFoundError(f"index {i} out of range at level {k + 1} (size {self.branching[k]})")
            flat = flat * self.branching[k] + i
        return flat

    def children(self, class_index: int, parent: Sequence[int]) -> np.ndarray:
        """Rows of the children of ``parent`` (empty parent = level-1 items)."""
        depth = len(parent)
        if depth >= self.num_levels:
            raise PathNotFoundError(f"items at depth {depth} have no children")
        base = self.flat_index(parent) * self.branching[depth]
        return self.levels[depth][class_index, base : base + self.branching[depth]]

    def item_row(self, class_index: int, levels: Sequence[int]) -> np.ndarray:
        if not levels:
            return self.labels[class_index]
        flat = self.flat_index(levels)
        return self.levels[len(levels) - 1][class_index, flat]

    def vector(self, path) -> np.ndarray:
        """Raw int8 row for a path or NULL."""
        if path is NULL:
            return self.null
        if not isinstance(path, ItemPath):
            raise PathNotFoundError(f"not an item path: {path!r}")
        if not 0 <= path.class_index < self.num_classes:
            raise PathNotFoundError(f"class {path.class_index} out of range (have {self.num_classes})")
        return self.item_row(path.class_index, path.levels)

    def item_count(self) -> int:
        return self.num_classes * sum(level.shape[1] for level in self.levels)


def generate_hierarchy(dim: int, num_classes: int, branching: Sequence[int], seed: int) -> Hierarchy:
    """Draw every label, item and the NULL vector independently from streams of ``seed``."""
    if dim < 1:
        raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
    if num_classes < 1:
        raise InvalidShapeError(f"num_classes must be >= 1, got {num_classes}")
    branching = tuple(int(m) for m in branching)
    if any(m < 1 for m in branching):
        raise InvalidShapeError(f"every branching entry must be >= 1, got {branching}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")

    labels = random_bipolar(make_rng(seed, 0), (num_classes, dim))
    null = random_bipolar(make_rng(seed, 1), dim)
    levels = []
    for k in range(len(branching)):
        rows = math.prod(branching[: k + 1])
        per_class = [random_bipolar(make_rng(seed, 2, c, k), (rows, dim)) for c in range(num_classes)]
        levels.append(np.stack(per_class))
    return Hierarchy(dim, num_classes, branching, seed, labels, tuple(levels), null)


def lookup(h: Hierarchy, path) -> Hypervector:
    """Stored vector for an item path, the class label (empty path) or NULL."""
    return Hypervector(h.vector(path), Domain.BIPOLAR)


def _tree_rows(h: Hierarchy, class_index: int) -> Iterator[np.ndarray]:
    def walk(prefix: tuple[int, ...]):
        depth = len(prefix)
        if depth == h.num_levels:
            return
        for i in range(h.branching[depth]):
            path = prefix + (i,)
            yield h.item_row(class_index, path)
            yield from walk(path)

    yield h.labels[class_index]
    yield from walk(())


def save(h: Hierarchy, sink: BinaryIO | str | os.PathLike) -> None:
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as fh:
            save(h, fh)
        return
    header = MAGIC + struct.pack("<BIII", FORMAT_VERSION, h.dim, h.num_classes, h.num_levels)
    header += struct.pack(f"<{h.num_levels}I", *h.branching) + struct.pack("<Q", h.seed)
    sink.write(header)
    for c in range(h.num_classes):
        for row in _tree_rows(h, c):
            sink.write(Hypervector(row, Domain.BIPOLAR).to_bytes())
    sink.write(Hypervector(h.null, Domain.BIPOLAR).to_bytes())


def _read_exact(stream: BinaryIO, n: int) -> bytes:
    data = stream.read(n)
    if len(data) != n:
        raise CorruptCodebookError("codebook file is truncated")
    return data


def load(source: BinaryIO | str | os.PathLike | bytes) -> Hierarchy:
    if isinstance(source, bytes):
        return load(io.BytesIO(source))
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return load(fh)

    if _read_exact(source, 4) != MAGIC:
        raise CorruptCodebookError("bad magic; not a codebook file")
    version, dim, num_classes, num_levels = struct.unpack("<BIII", _read_exact(source, 13))
    if version != FORMAT_VERSION:
        raise CorruptCodebookError(f"unsupported codebook format version {version}")
    branching = struct.unpack(f"<{num_levels}I", _read_exact(source, 4 * num_levels))
    (seed,) = struct.unpack("<Q", _read_exact(source, 8))
    if dim < 1 or num_classes < 1 or any(m < 1 for m in branching):
        raise CorruptCodebookError("codebook header describes an empty shape")

    def read_row() -> np.ndarray:
        try:
            hv = Hypervector.read_from(source)
        except (EOFError, ValueError) as exc:
            raise CorruptCodebookError(str(exc)) from None
        if hv.dim != dim or hv.domain is not Domain.BIPOLAR:
            raise CorruptCodebookError("stored vector does not match the header")
        return hv.components

    labels = np.empty((num_classes, dim), dtype=np.int8)
    levels = [np.empty((num_classes, math.prod(branching[: k + 1]), dim), dtype=np.int8) for k in range(num_levels)]

    def fill(c: int, prefix: tuple[int, ...], flat: int):
        depth = len(prefix)
        if depth == num_levels:
            return
        for i in range(branching[depth]):
            child_flat = flat * branching[depth] + i
            levels[depth][c, child_flat] = read_row()
            fill(c, prefix + (i,), child_flat)

    for c in range(num_classes):
        labels[c] = read_row()
        fill(c, (), 0)
    null = read_row()
    if source.read(1):
        raise CorruptCodebookError("trailing bytes after codebook payload")
    return Hierarchy(dim, num_classes, tuple(branching), seed, labels, tuple(levels), null)
