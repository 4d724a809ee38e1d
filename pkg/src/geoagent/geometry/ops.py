"""Dataset-level vector analysis: buffer, intersect, erase, union, clip."""

from __future__ import annotations

import math

import numpy as np

from .model import (
    SNAP_EPS,
    DimensionMismatch,
    DimensionRuleViolation,
    EmptyInput,
    Feature,
    FeatureCollection,
    Geometry,
    NonPositiveDistance,
)
from .overlay import _split_points, contains_points, near_boundary, overlay, rings_to_edges

CIRCLE_SEGMENTS = 32


def regular_polygon(cx: float, cy: float, radius: float, segments: int = CIRCLE_SEGMENTS) -> np.ndarray:
    """Open CCW ring of ``segments`` vertices on the circle (inscribed approximation)."""
    ang = 2.0 * np.pi * np.arange(segments) / segments
    return np.column_stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)])


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew's monotone chain; returns an open CCW ring without collinear points."""
    pts = sorted(set(map(tuple, np.asarray(points, float))))
    if len(pts) <= 2:
        return np.array(pts)

    def half(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2:
                (ax, ay), (bx, by) = out[-2], out[-1]
                if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) > 0:
                    break
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return np.array(lower[:-1] + upper[:-1])


def _capsule(p, q, radius: float, segments: int) -> np.ndarray:
    return convex_hull(np.vstack([regular_polygon(p[0], p[1], radius, segments), regular_polygon(q[0], q[1], radius, segments)]))


def _polys_to_fc(polys, attributes: dict | None = None) -> FeatureCollection:
    if not polys:
        return FeatureCollection((), dimension=2)
    geom = Geometry.from_polygons(polys)
    return FeatureCollection((Feature(geom, attributes if attributes is not None else {"id": 0}),))


def _require(fc: FeatureCollection, what: str) -> None:
    if not len(fc):
        raise EmptyInput(f"{what} is empty")


def _polygonal(fc: FeatureCollection, what: str) -> list[np.ndarray]:
    if fc.dimension != 2:
        raise DimensionMismatch(f"{what} must be polygonal, got dimension {fc.dimension}")
    return fc.polygon_rings()


def buffer(fc: FeatureCollection, distance: float, segments: int = CIRCLE_SEGMENTS) -> FeatureCollection:
    """Dissolved dilation of every feature by ``distance``.

    Points become regular ``segments``-gons inscribed in the disc, segments
    become the convex hull of the two end polygons, and polygons keep their own
    area plus a capsule along every ring edge.
    """
    distance = float(distance)
    if not distance > 0:
        raise NonPositiveDistance(f"buffer distance must be positive, got {distance}")
    _require(fc, "buffer input")
    rings: list[np.ndarray] = []
    for geom in fc.geometries:
        for x, y in geom.points():
            rings.append(regular_polygon(x, y, distance, segments))
        for line in geom.lines():
            for p, q in zip(line[:-1], line[1:]):
                rings.append(_capsule(p, q, distance, segments))
        for poly in geom.polygons():
            for ring in poly:
                rings.append(np.asarray(ring[:-1], float))
                for p, q in zip(ring[:-1], ring[1:]):
                    rings.append(_capsule(p, q, distance, segments))
    return _polys_to_fc(overlay(rings, (), "dissolve"))


def intersect(a: FeatureCollection, b: FeatureCollection) -> FeatureCollection:
    ra, rb = _polygonal(a, "first input"), _polygonal(b, "second input")
    return _polys_to_fc(overlay(ra, rb, "intersection"))


def erase(a: FeatureCollection, b: FeatureCollection) -> FeatureCollection:
    ra, rb = _polygonal(a, "first input"), _polygonal(b, "second input")
    return _polys_to_fc(overlay(ra, rb, "difference"))


def union(a: FeatureCollection, b: FeatureCollection) -> FeatureCollection:
    ra, rb = _polygonal(a, "first input"), _polygonal(b, "second input")
    return _polys_to_fc(overlay(ra, rb, "union"))


def point_in_polygon(p, poly: Geometry, eps: float = SNAP_EPS) -> bool:
    """Even-odd membership; points within ``eps`` of the boundary count as inside."""
    rings = [np.asarray(r[:-1], float) for r in poly.rings()]
    x, y = float(p[0]), float(p[1])
    s, e = rings_to_edges(rings)
    if len(s) == 0:
        return False
    if near_boundary(np.array([x]), np.array([y]), s[:, 0], s[:, 1], e[:, 0], e[:, 1], eps)[0]:
        return True
    xs, ys, xe, ye = s[:, 0], s[:, 1], e[:, 0], e[:, 1]
    spans = (ys <= y) != (ye <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = xs + (y - ys) * (xe - xs) / (ye - ys)
    return bool(np.count_nonzero(spans & (xc > x)) % 2)


# ---------------------------------------------------------------------------
# clip


def check_clip_dimensions(a: FeatureCollection, b: FeatureCollection) -> None:
    """The clip boundary must have at least the dimension of the clipped data."""
    if b.dimension < a.dimension:
        raise DimensionRuleViolation(
            f"clip boundary has dimension {b.dimension}, lower than the clipped dataset ({a.dimension})"
        )


def _segment_edges(fc: FeatureCollection) -> tuple[np.ndarray, np.ndarray]:
    s, e = [], []
    for geom in fc.geometries:
        for line in geom.lines():
            arr = np.asarray(line, float)
            s.append(arr[:-1])
            e.append(arr[1:])
    if not s:
        return np.zeros((0, 2)), np.zeros((0, 2))
    return np.concatenate(s), np.concatenate(e)


def _trim_line(line, cut_s, cut_e, keep_fn, eps) -> list[list[tuple[float, float]]]:
    """Split a polyline at every crossing with the cut edges and keep pieces
    whose midpoints satisfy ``keep_fn``; adjacent kept pieces stay joined."""
    arr = np.asarray(line, float)
    ls, le = arr[:-1], arr[1:]
    n = len(ls)
    idx, pts = _split_points(np.vstack([ls, cut_s]), np.vstack([le, cut_e]), eps)
    own = idx < n
    idx, pts = idx[own], pts[own]
    all_idx = np.concatenate([np.arange(n), idx, np.arange(n)])
    all_pts = np.concatenate([ls, pts, le])
    d = le[all_idx] - ls[all_idx]
    dd = (d * d).sum(axis=1)
    t = ((all_pts - ls[all_idx]) * d).sum(axis=1) / np.where(dd > 0, dd, 1.0)
    order = np.lexsort((t, all_idx))
    seq = all_pts[order]
    same = np.hypot(*(seq[1:] - seq[:-1]).T) > eps
    a, b = seq[:-1][same], seq[1:][same]
    if len(a) == 0:
        return []
    keep = keep_fn(0.5 * (a + b))
    pieces: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    for k in range(len(a)):
        if keep[k]:
            if not current:
                current = [tuple(a[k])]
            elif np.hypot(*(np.asarray(current[-1]) - a[k])) > eps:
                pieces.append(current)
                current = [tuple(a[k])]
            current.append(tuple(b[k]))
        elif current:
            pieces.append(current)
            current = []
    if current:
        pieces.append(current)
    return pieces


def clip(a: FeatureCollection, b: FeatureCollection, eps: float = SNAP_EPS) -> FeatureCollection:
    """Keep the parts of ``a`` inside ``b``; attributes of ``a`` survive."""
    _require(a, "clip input")
    _require(b, "clip boundary")
    check_clip_dimensions(a, b)

    if b.dimension == 2:
        b_rings = b.polygon_rings()
        cut_s, cut_e = rings_to_edges(b_rings)

        def inside(pts):
            return contains_points(pts, b_rings, eps)

    elif b.dimension == 1:
        cut_s, cut_e = _segment_edges(b)

        def inside(pts):
            pts = np.asarray(pts, float).reshape(-1, 2)
            return near_boundary(pts[:, 0], pts[:, 1], cut_s[:, 0], cut_s[:, 1], cut_e[:, 0], cut_e[:, 1], eps)

    else:
        b_pts = np.array([p for g in b.geometries for p in g.points()], float)
        cut_s = cut_e = np.zeros((0, 2))

        def inside(pts):
            pts = np.asarray(pts, float).reshape(-1, 2)
            d = np.hypot(pts[:, None, 0] - b_pts[None, :, 0], pts[:, None, 1] - b_pts[None, :, 1])
            return (d <= eps).any(axis=1)

    out: list[Feature] = []
    for feat in a.features:
        geom = feat.geometry
        new: Geometry | None = None
        if geom.dimension == 0:
            pts = geom.points()
            mask = inside(np.array(pts, float))
            kept = [p for p, m in zip(pts, mask) if m]
            if kept:
                new = Geometry.point(*kept[0]) if geom.kind == "Point" else Geometry.multipoint(kept)
        elif geom.dimension == 1:
            pieces = [piece for line in geom.lines() for piece in _trim_line(line, cut_s, cut_e, inside, eps)]
            if len(pieces) == 1:
                new = Geometry.linestring(pieces[0])
            elif pieces:
                new = Geometry.multilinestring(pieces)
        else:
            rings = [np.asarray(r[:-1], float) for r in geom.rings()]
            polys = overlay(rings, b.polygon_rings(), "intersection")
            if polys:
                new = Geometry.from_polygons(polys)
        if new is not None:
            out.append(Feature(new, dict(feat.attributes)))
    return FeatureCollection(tuple(out), dimension=a.dimension if not out else None)


def buffer_area_bounds(distance: float, segments: int = CIRCLE_SEGMENTS) -> tuple[float, float]:
    """(inscribed polygon area, disc area) for a single point buffer."""
    inscribed = 0.5 * segments * distance * distance * math.sin(2.0 * math.pi / segments)
    return inscribed, math.pi * distance * distance
