"""Streaming change point detection with fuzzy segment queries."""

from ._core import (
    FcpdError,
    InsufficientData,
    InvalidConfiguration,
    InvalidData,
    MissingFeature,
    QueryError,
    __version__,
    change_point_offsets,
    evaluate,
    fit,
    format_query,
    generate_cycle,
    kmeans,
    query,
    segment,
    sensitivity_bounds,
)

__all__ = [
    "FcpdError",
    "InsufficientData",
    "InvalidConfiguration",
    "InvalidData",
    "MissingFeature",
    "QueryError",
    "__version__",
    "change_point_offsets",
    "evaluate",
    "fit",
    "format_query",
    "generate_cycle",
    "kmeans",
    "query",
    "segment",
    "sensitivity_bounds",
]
