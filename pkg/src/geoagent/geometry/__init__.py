"""Planar vector geometry: model, boolean overlay and analysis operations."""

from .model import (
    SNAP_EPS,
    DimensionMismatch,
    DimensionRuleViolation,
    EmptyInput,
    Feature,
    FeatureCollection,
    Geometry,
    GeometryError,
    InvalidGeometry,
    NonPositiveDistance,
    signed_area,
    validate,
)
from .ops import (
    CIRCLE_SEGMENTS,
    buffer,
    buffer_area_bounds,
    check_clip_dimensions,
    clip,
    erase,
    intersect,
    point_in_polygon,
    regular_polygon,
    union,
)
from .overlay import contains_points, overlay, winding_numbers

__all__ = [
    "SNAP_EPS",
    "CIRCLE_SEGMENTS",
    "DimensionMismatch",
    "DimensionRuleViolation",
    "EmptyInput",
    "Feature",
    "FeatureCollection",
    "Geometry",
    "GeometryError",
    "InvalidGeometry",
    "NonPositiveDistance",
    "buffer",
    "buffer_area_bounds",
    "check_clip_dimensions",
    "clip",
    "contains_points",
    "erase",
    "intersect",
    "overlay",
    "point_in_polygon",
    "regular_polygon",
    "signed_area",
    "union",
    "validate",
    "winding_numbers",
]
