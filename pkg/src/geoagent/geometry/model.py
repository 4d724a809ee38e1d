"""Planar geometry model: typed geometries, features and feature collections.

Coordinates are (x, y) pairs in a planar frame (meters east, meters north for
the analysis fixtures). Polygon rings are stored closed, outer rings
counterclockwise and holes clockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

SNAP_EPS = 1e-9

POINT_KINDS = ("Point", "MultiPoint")
LINE_KINDS = ("LineString", "MultiLineString")
POLYGON_KINDS = ("Polygon", "MultiPolygon")
GEOMETRY_KINDS = POINT_KINDS + LINE_KINDS + POLYGON_KINDS

_DIMENSION = {k: 0 for k in POINT_KINDS} | {k: 1 for k in LINE_KINDS} | {k: 2 for k in POLYGON_KINDS}


class GeometryError(ValueError):
    """Base class for geometry-level failures."""


class InvalidGeometry(GeometryError):
    pass


class EmptyInput(GeometryError):
    pass


class NonPositiveDistance(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class DimensionRuleViolation(GeometryError):
    """Clip boundary has a lower geometric dimension than the clipped dataset."""


def _pair(p) -> tuple[float, float]:
    x, y = float(p[0]), float(p[1])
    if not (np.isfinite(x) and np.isfinite(y)):
        raise InvalidGeometry(f"non-finite coordinate {p!r}")
    # collapse negative zero so equal geometries serialize identically
    return (x + 0.0, y + 0.0)


def signed_area(ring: Sequence[Sequence[float]] | np.ndarray) -> float:
    """Shoelace area; positive for counterclockwise rings. Ring may be open or closed."""
    a = np.asarray(ring, dtype=float)
    if len(a) < 3:
        return 0.0
    x, y = a[:, 0], a[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _close_ring(points: Iterable, ccw: bool) -> tuple[tuple[float, float], ...]:
    pts = [_pair(p) for p in points]
    if pts and pts[0] != pts[-1]:
        pts.append(pts[0])
    if len(pts) < 4:
        raise InvalidGeometry(f"ring needs at least 4 vertices (closed), got {len(pts)}")
    area = signed_area(pts)
    if area == 0.0:
        raise InvalidGeometry("degenerate ring with zero area")
    if (area > 0) != ccw:
        pts.reverse()
    return tuple(pts)


@dataclass(frozen=True)
class Geometry:
    """A single geometry. ``coords`` nesting follows the GeoJSON layout for ``kind``."""

    kind: str
    coords: tuple

    def __post_init__(self):
        if self.kind not in GEOMETRY_KINDS:
            raise InvalidGeometry(f"unknown geometry kind {self.kind!r}")

    @property
    def dimension(self) -> int:
        return _DIMENSION[self.kind]

    # constructors normalize coordinates, closure and ring orientation

    @classmethod
    def point(cls, x: float, y: float) -> Geometry:
        return cls("Point", _pair((x, y)))

    @classmethod
    def multipoint(cls, points: Iterable) -> Geometry:
        pts = tuple(_pair(p) for p in points)
        if not pts:
            raise InvalidGeometry("empty MultiPoint")
        return cls("MultiPoint", pts)

    @classmethod
    def linestring(cls, points: Iterable) -> Geometry:
        pts = tuple(_pair(p) for p in points)
        if len(pts) < 2:
            raise InvalidGeometry("LineString needs at least 2 vertices")
        return cls("LineString", pts)

    @classmethod
    def multilinestring(cls, lines: Iterable) -> Geometry:
        parts = tuple(cls.linestring(line).coords for line in lines)
        if not parts:
            raise InvalidGeometry("empty MultiLineString")
        return cls("MultiLineString", parts)

    @classmethod
    def polygon(cls, outer: Iterable, holes: Iterable = ()) -> Geometry:
        rings = (_close_ring(outer, ccw=True),) + tuple(_close_ring(h, ccw=False) for h in holes)
        return cls("Polygon", rings)

    @classmethod
    def multipolygon(cls, polygons: Iterable) -> Geometry:
        parts = []
        for poly in polygons:
            if isinstance(poly, Geometry):
                parts.append(poly.coords)
            else:
                outer, *holes = poly
                parts.append(cls.polygon(outer, holes).coords)
        if not parts:
            raise InvalidGeometry("empty MultiPolygon")
        return cls("MultiPolygon", tuple(parts))

    @classmethod
    def from_polygons(cls, polygons: Sequence) -> Geometry:
        """Polygon when there is one part, MultiPolygon otherwise."""
        if len(polygons) == 1:
            outer, *holes = polygons[0]
            return cls.polygon(outer, holes)
        return cls.multipolygon(polygons)

    def polygons(self) -> list[tuple]:
        """Polygon parts as tuples of rings; empty for non-polygonal kinds."""
        if self.kind == "Polygon":
            return [self.coords]
        if self.kind == "MultiPolygon":
            return list(self.coords)
        return []

    def lines(self) -> list[tuple]:
        if self.kind == "LineString":
            return [self.coords]
        if self.kind == "MultiLineString":
            return list(self.coords)
        return []

    def points(self) -> list[tuple[float, float]]:
        if self.kind == "Point":
            return [self.coords]
        if self.kind == "MultiPoint":
            return list(self.coords)
        return []

    def rings(self) -> Iterator[tuple]:
        for poly in self.polygons():
            yield from poly

    def vertices(self) -> Iterator[tuple[float, float]]:
        if self.dimension == 0:
            yield from self.points()
        elif self.dimension == 1:
            for line in self.lines():
                yield from line
        else:
            for ring in self.rings():
                yield from ring

    def area(self) -> float:
        return sum(signed_area(r) for r in self.rings())

    def bounds(self) -> tuple[float, float, float, float]:
        a = np.array(list(self.vertices()), dtype=float)
        return (float(a[:, 0].min()), float(a[:, 1].min()), float(a[:, 0].max()), float(a[:, 1].max()))


@dataclass(frozen=True)
class Feature:
    geometry: Geometry
    attributes: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for key, value in self.attributes.items():
            if not isinstance(key, str):
                raise InvalidGeometry(f"attribute names must be strings, got {key!r}")
            if value is not None and not isinstance(value, (str, int, float)):
                raise InvalidGeometry(f"attribute {key!r} is not a scalar: {value!r}")
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))

    def __eq__(self, other):
        if not isinstance(other, Feature):
            return NotImplemented
        return self.geometry == other.geometry and dict(self.attributes) == dict(other.attributes)


@dataclass(frozen=True, eq=False)
class FeatureCollection:
    """Ordered features sharing one planar frame.

    ``dimension`` is the maximum geometric dimension of the features. An empty
    collection keeps whatever dimension it was created with (default 0), so an
    empty overlay result still reads as polygonal downstream.
    """

    features: tuple[Feature, ...] = ()
    dimension: int | None = None

    def __post_init__(self):
        feats = tuple(self.features)
        object.__setattr__(self, "features", feats)
        if feats:
            dim = max(f.geometry.dimension for f in feats)
            if self.dimension is not None and self.dimension != dim:
                raise InvalidGeometry(f"declared dimension {self.dimension} but features have {dim}")
            object.__setattr__(self, "dimension", dim)
        elif self.dimension is None:
            object.__setattr__(self, "dimension", 0)
        elif self.dimension not in (0, 1, 2):
            raise InvalidGeometry(f"bad dimension {self.dimension}")

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self) -> Iterator[Feature]:
        return iter(self.features)

    def __eq__(self, other):
        if not isinstance(other, FeatureCollection):
            return NotImplemented
        return self.dimension == other.dimension and self.features == other.features

    @classmethod
    def from_geometries(cls, geoms: Iterable[Geometry], dimension: int | None = None) -> FeatureCollection:
        return cls(tuple(Feature(g, {}) for g in geoms), dimension)

    @property
    def geometries(self) -> list[Geometry]:
        return [f.geometry for f in self.features]

    def area(self) -> float:
        return sum(f.geometry.area() for f in self.features)

    def bounds(self) -> tuple[float, float, float, float]:
        if not self.features:
            raise EmptyInput("empty collection has no bounds")
        b = np.array([f.geometry.bounds() for f in self.features])
        return (float(b[:, 0].min()), float(b[:, 1].min()), float(b[:, 2].max()), float(b[:, 3].max()))

    def polygon_rings(self) -> list[np.ndarray]:
        """Every polygon ring as an open (n, 2) array, orientation preserved."""
        return [np.asarray(r[:-1], dtype=float) for g in self.geometries for r in g.rings()]


def _segments_cross(p, q, r, s) -> bool:
    """Proper or touching intersection between segments pq and rs (non-adjacent use)."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) <= SNAP_EPS * SNAP_EPS else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a[0], b[0]) - SNAP_EPS <= c[0] <= max(a[0], b[0]) + SNAP_EPS and min(
            a[1], b[1]
        ) - SNAP_EPS <= c[1] <= max(a[1], b[1]) + SNAP_EPS

    o1, o2, o3, o4 = orient(p, q, r), orient(p, q, s), orient(r, s, p), orient(r, s, q)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return (
        (o1 == 0 and on_seg(p, q, r))
        or (o2 == 0 and on_seg(p, q, s))
        or (o3 == 0 and on_seg(r, s, p))
        or (o4 == 0 and on_seg(r, s, q))
    )


def ring_problems(ring: Sequence, expect_ccw: bool) -> list[str]:
    problems = []
    if len(ring) < 4:
        problems.append("ring has fewer than 4 vertices")
        return problems
    if tuple(ring[0]) != tuple(ring[-1]):
        problems.append("ring is not closed")
    area = signed_area(ring)
    if expect_ccw and area <= 0:
        problems.append("outer ring is not counterclockwise")
    if not expect_ccw and area >= 0:
        problems.append("hole ring is not clockwise")
    n = len(ring) - 1
    if n <= 200:
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1]):
                    problems.append(f"ring self-intersects between edges {i} and {j}")
                    return problems
    return problems


def validate(obj: Geometry | Feature | FeatureCollection) -> list[str]:
    """Return a list of invariant violations (empty when valid).

    Self-intersection is only checked for rings of at most 200 vertices; larger
    rings would make the pairwise check too slow for routine use.
    """
    if isinstance(obj, FeatureCollection):
        out = []
        for i, f in enumerate(obj.features):
            out += [f"feature {i}: {p}" for p in validate(f.geometry)]
        if obj.features and obj.dimension != max(f.geometry.dimension for f in obj.features):
            out.append("dimension does not match contents")
        return out
    if isinstance(obj, Feature):
        return validate(obj.geometry)
    out = []
    for poly in obj.polygons():
        for k, ring in enumerate(poly):
            out += ring_problems(ring, expect_ccw=(k == 0))
    return out
