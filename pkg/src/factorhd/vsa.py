"""Hypervector type and the MAP-style algebra (bundle, bind, unbind, permute, similarity).

Bipolar and ternary vectors are stored as int8; integer vectors (sums of
several objects) as int32. All operations are pure and return new vectors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import BinaryIO, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    InvalidDimensionError,
    NonInvertibleUnbinderError,
)


class Domain(IntEnum):
    BIPOLAR = 0
    TERNARY = 1
    INTEGER = 2


_DTYPES = {Domain.BIPOLAR: np.int8, Domain.TERNARY: np.int8, Domain.INTEGER: np.int32}


@dataclass(frozen=True, eq=False)
class Hypervector:
    """Fixed-length integer vector plus the value set it lives in."""

    components: np.ndarray
    domain: Domain = Domain.BIPOLAR

    def __post_init__(self):
        arr = np.asarray(self.components)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise InvalidDimensionError(f"hypervector must be a non-empty 1-d array, got shape {arr.shape}")
        domain = Domain(self.domain)
        arr = arr.astype(_DTYPES[domain], copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)
        object.__setattr__(self, "domain", domain)

    @classmethod
    def from_values(cls, values, domain: Domain | None = None) -> Hypervector:
        """Build from arbitrary integers, inferring the tightest domain when not given."""
        arr = np.asarray(values)
        if domain is None:
            domain = _infer_domain(arr)
        elif domain is Domain.BIPOLAR and not np.all(np.abs(arr) == 1):
            raise ValueError("bipolar hypervector components must be -1 or +1")
        elif domain is Domain.TERNARY and not np.all(np.abs(arr) <= 1):
            raise ValueError("ternary hypervector components must be in {-1, 0, +1}")
        return cls(arr, domain)

    @property
    def dim(self) -> int:
        return int(self.components.shape[0])

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypervector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.components, other.components))

    def __hash__(self):
        return hash((self.dim, self.components.tobytes()))

    def __neg__(self) -> Hypervector:
        return negate(self)

    def __repr__(self) -> str:
        return f"Hypervector(dim={self.dim}, domain={self.domain.name.lower()})"

    def to_bytes(self) -> bytes:
        """Little-endian ``<dim:u32><domain:u8>`` followed by the raw components."""
        dtype = "<i1" if self.domain is not Domain.INTEGER else "<i4"
        return struct.pack("<IB", self.dim, int(self.domain)) + self.components.astype(dtype).tobytes()

    @classmethod
    def read_from(cls, stream: BinaryIO) -> Hypervector:
        header = stream.read(5)
        if len(header) != 5:
            raise EOFError("truncated hypervector header")
        dim, tag = struct.unpack("<IB", header)
        try:
            domain = Domain(tag)
        except ValueError:
            raise ValueError(f"unknown hypervector domain tag {tag}") from None
        width = 1 if domain is not Domain.INTEGER else 4
        payload = stream.read(dim * width)
        if len(payload) != dim * width:
            raise EOFError("truncated hypervector payload")
        dtype = "<i1" if width == 1 else "<i4"
        return cls(np.frombuffer(payload, dtype=dtype), domain)

    @classmethod
    def from_bytes(cls, data: bytes) -> Hypervector:
        import io

        return cls.read_from(io.BytesIO(data))


def _infer_domain(arr: np.ndarray) -> Domain:
    mag = np.abs(arr)
    if np.all(mag == 1):
        return Domain.BIPOLAR
    if np.all(mag <= 1):
        return Domain.TERNARY
    return Domain.INTEGER


def _check_dims(vs: Sequence[Hypervector]) -> int:
    if len(vs) == 0:
        raise EmptyInputError("operation needs at least one hypervector")
    dim = vs[0].dim
    for v in vs[1:]:
        if v.dim != dim:
            raise DimensionMismatchError(f"dimension mismatch: {dim} vs {v.dim}")
    return dim


def random_hv(dim: int, rng: np.random.Generator) -> Hypervector:
    """Bipolar vector with i.i.d. fair +-1 components drawn from ``rng``."""
    return Hypervector(random_bipolar(rng, dim), Domain.BIPOLAR)


def random_bipolar(rng: np.random.Generator, shape) -> np.ndarray:
    """Raw int8 array of fair +-1 draws (codebook generation uses this directly)."""
    if np.any(np.asarray(shape) < 1):
        raise InvalidDimensionError(f"dimension must be >= 1, got {shape}")
    bits = rng.integers(0, 2, size=shape, dtype=np.int8)
    return (bits * 2 - 1).astype(np.int8)


def bundle(vs: Sequence[Hypervector], clip: bool) -> Hypervector:
    """Component-wise sum; with ``clip`` each component is replaced by its sign."""
    _check_dims(vs)
    total = np.sum([v.components.astype(np.int32) for v in vs], axis=0, dtype=np.int32)
    if clip:
        return Hypervector(np.sign(total), Domain.TERNARY)
    if len(vs) == 1:
        return vs[0]
    return Hypervector(total, _integer_or_tighter(total))


def _integer_or_tighter(arr: np.ndarray) -> Domain:
    # Unclipped sums are Z^D; keep the narrow tag only when the values allow it.
    return Domain.INTEGER if np.any(np.abs(arr) > 1) else _infer_domain(arr)


def bind(vs: Sequence[Hypervector]) -> Hypervector:
    """Component-wise product."""
    _check_dims(vs)
    if any(v.domain is Domain.INTEGER for v in vs):
        out = np.ones(vs[0].dim, dtype=np.int64)
        for v in vs:
            out *= v.components
        return Hypervector(out, Domain.INTEGER)
    out = np.ones(vs[0].dim, dtype=np.int8)
    for v in vs:
        out *= v.components
    domain = Domain.BIPOLAR if all(v.domain is Domain.BIPOLAR for v in vs) else Domain.TERNARY
    return Hypervector(out, domain)


def unbind(a: Hypervector, b: Hypervector) -> Hypervector:
    """Undo a binding with ``b``; only bipolar unbinders are self-inverse."""
    _check_dims([a, b])
    if np.any(b.components == 0):
        raise NonInvertibleUnbinderError("unbinder has zero components")
    return bind([a, b])


def permute(v: Hypervector, shift: int) -> Hypervector:
    """Cyclic rotation by ``shift`` positions (``[a, b, c]`` shifted by 1 is ``[c, a, b]``)."""
    return Hypervector(np.roll(v.components, shift % v.dim), v.domain)


def negate(v: Hypervector) -> Hypervector:
    return Hypervector(-v.components.astype(np.int32), v.domain)


def similarity(a: Hypervector, b: Hypervector) -> float:
    """Dot product divided by the dimension."""
    dim = _check_dims([a, b])
    dot = int(np.dot(a.components.astype(np.int64), b.components.astype(np.int64)))
    return dot / dim


def ones(dim: int) -> Hypervector:
    """Binding identity."""
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    return Hypervector(np.ones(dim, dtype=np.int8), Domain.BIPOLAR)
