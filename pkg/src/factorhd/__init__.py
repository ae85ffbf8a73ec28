"""FactorHD: hyperdimensional encoding and factorization of multi-object, class-subclass representations."""

from .baselines import ResonatorResult, ci_encode, ci_factorize, resonator_factorize
from .codebook import NULL, Hierarchy, ItemPath, generate_hierarchy, load, lookup, save
from .encoder import EncodedTarget, ObjectDescription, encode_object, encode_scene
from .errors import (
    CorruptCodebookError,
    DimensionMismatchError,
    EmptyInputError,
    FactorHDError,
    InvalidDimensionError,
    InvalidShapeError,
    NonInvertibleUnbinderError,
    PathNotFoundError,
    UnsupportedConfigurationError,
)
from .factorizer import (
    Counters,
    DecodedObject,
    FactorizationResult,
    ThresholdConfig,
    auto_threshold,
    candidate_items,
    factorize_multi,
    factorize_single,
    reconstruct_and_exclude,
    unbind_labels,
)
from .vsa import Domain, Hypervector, bind, bundle, negate, permute, random_hv, similarity, unbind

__version__ = "0.1.0"

__all__ = [
    "NULL",
    "CorruptCodebookError",
    "Counters",
    "DecodedObject",
    "DimensionMismatchError",
    "Domain",
    "EmptyInputError",
    "EncodedTarget",
    "FactorHDError",
    "FactorizationResult",
    "Hierarchy",
    "Hypervector",
    "InvalidDimensionError",
    "InvalidShapeError",
    "ItemPath",
    "NonInvertibleUnbinderError",
    "ObjectDescription",
    "PathNotFoundError",
    "ResonatorResult",
    "ThresholdConfig",
    "UnsupportedConfigurationError",
    "auto_threshold",
    "bind",
    "bundle",
    "candidate_items",
    "ci_encode",
    "ci_factorize",
    "encode_object",
    "encode_scene",
    "factorize_multi",
    "factorize_single",
    "generate_hierarchy",
    "load",
    "lookup",
    "negate",
    "permute",
    "random_hv",
    "reconstruct_and_exclude",
    "resonator_factorize",
    "save",
    "similarity",
    "unbind",
    "unbind_labels",
]
