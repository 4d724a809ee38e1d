"""On-disk formats for vector datasets, POI tables and output manifests.

Vector files are GeoJSON FeatureCollection documents restricted to the six
geometry kinds, plus one extra top-level member, ``dimension``, so an empty
overlay result still reads back as polygonal. Numbers are written with nine
decimals (falling back to the shortest exact repr when nine would round) and
object keys in a stable order, so output is byte-for-byte reproducible and
reads back to the same floats. The file name (``.shp``, ``.tif``...) is only a
naming convention; the kind of a file is taken from its content.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable

from .geometry import Feature, FeatureCollection, Geometry, GeometryError

VECTOR = "Vector"
RASTER = "Raster"
TABLE = "Table"
IMAGE = "Image"
KINDS = (VECTOR, RASTER, TABLE, IMAGE)

MANIFEST_NAME = "manifest.json"
POI_HEADER = ("name", "category", "lon", "lat", "city")

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class FormatError(ValueError):
    """A file exists but does not parse as the expected format."""

    def __init__(self, reason: str, offset: int | None = None, line: int | None = None):
        self.reason = reason
        self.offset = offset
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{reason} ({', '.join(where)})" if where else reason)


@dataclass(frozen=True)
class DatasetPath:
    path: str
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dataset kind {self.kind!r}")

    def __str__(self) -> str:
        return self.path


# ---------------------------------------------------------------------------
# helpers shared by every writer


def format_number(v: float | int) -> str:
    if isinstance(v, bool):
        raise TypeError("booleans are not valid numeric attributes")
    if isinstance(v, int):
        return str(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite number {v!r}")
    v = float(v)
    if v == 0.0:
        return "0.000000000"
    s = f"{v:.9f}"
    # nine decimals whenever they are exact (all snap-grid output); otherwise
    # the shortest repr, so reading back always gives the same float
    return s if float(s) == v else repr(v)


def archive_existing(path: str | os.PathLike, clock=datetime.now) -> Path | None:
    """Move an existing file aside under a timestamp suffix; returns the new name."""
    p = Path(path)
    if not p.exists():
        return None
    stamp = clock().strftime("%Y%m%dT%H%M%S")
    target = p.with_name(f"{p.name}.{stamp}")
    n = 1
    while target.exists():
        target = p.with_name(f"{p.name}.{stamp}-{n}")
        n += 1
    p.rename(target)
    return target


def record_kind(path: str | os.PathLike, kind: str) -> None:
    """Register ``path`` with ``kind`` in the manifest of its directory."""
    p = Path(path)
    manifest = p.parent / MANIFEST_NAME
    entries: dict[str, str] = {}
    if manifest.exists():
        try:
            entries = json.loads(manifest.read_text(encoding="utf-8")).get("files", {})
        except (json.JSONDecodeError, AttributeError):
            entries = {}
    entries[p.name] = kind
    text = json.dumps({"files": dict(sorted(entries.items()))}, indent=2, ensure_ascii=False) + "\n"
    manifest.write_text(text, encoding="utf-8")


def read_manifest(directory: str | os.PathLike) -> dict[str, str]:
    manifest = Path(directory) / MANIFEST_NAME
    if not manifest.exists():
        return {}
    return json.loads(manifest.read_text(encoding="utf-8")).get("files", {})


def sniff_kind(path: str | os.PathLike) -> str:
    """Infer the dataset kind from the first bytes of the file."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(str(path))
    with open(p, "rb") as fh:
        head = fh.read(256)
    if head.startswith(_PNG_MAGIC):
        return IMAGE
    text = head.decode("utf-8", errors="replace").lstrip("﻿")
    stripped = text.lstrip()
    if stripped.startswith("<?xml") or stripped.startswith("<svg"):
        return IMAGE
    if stripped.startswith("{"):
        compact = stripped.replace(" ", "").replace("\n", "")
        if compact.startswith('{"type":"FeatureCollection"'):
            return VECTOR
        if compact.startswith('{"type":"RasterGrid"'):
            return RASTER
    if text.split("\n", 1)[0].rstrip("\r") == ",".join(POI_HEADER):
        return TABLE
    raise FormatError("unrecognised dataset content", offset=0)


# ---------------------------------------------------------------------------
# vector


def _coords_text(kind: str, coords) -> str:
    def pt(p):
        return f"[{format_number(p[0])}, {format_number(p[1])}]"

    def seq(ps):
        return "[" + ", ".join(pt(p) for p in ps) + "]"

    if kind == "Point":
        return pt(coords)
    if kind in ("MultiPoint", "LineString"):
        return seq(coords)
    if kind in ("MultiLineString", "Polygon"):
        return "[" + ", ".join(seq(r) for r in coords) + "]"
    return "[" + ", ".join("[" + ", ".join(seq(r) for r in poly) + "]" for poly in coords) + "]"


def _value_text(v: Any) -> str:
    if v is None or isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    return format_number(v)


def dumps_vector(fc: FeatureCollection) -> str:
    lines = [f'{{"type": "FeatureCollection", "dimension": {fc.dimension}, "features": [']
    for k, feat in enumerate(fc.features):
        props = ", ".join(f"{json.dumps(key, ensure_ascii=False)}: {_value_text(feat.attributes[key])}" for key in sorted(feat.attributes))
        g = feat.geometry
        sep = "," if k < len(fc.features) - 1 else ""
        lines.append(
            f'{{"type": "Feature", "properties": {{{props}}}, '
            f'"geometry": {{"type": "{g.kind}", "coordinates": {_coords_text(g.kind, g.coords)}}}}}{sep}'
        )
    lines.append("]}")
    return "\n".join(lines) + "\n"


def write_vector(fc: FeatureCollection, path: str | os.PathLike) -> DatasetPath:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps_vector(fc))
    except OSError as exc:
        raise OSError(f"cannot write vector dataset {path}: {exc}") from exc
    record_kind(p, VECTOR)
    return DatasetPath(str(path), VECTOR)


def _check_keys(obj: dict, allowed: set[str], required: set[str], what: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise FormatError(f"{what} has foreign members {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise FormatError(f"{what} lacks members {sorted(missing)}")


def _geometry_from_json(obj: Any) -> Geometry:
    if not isinstance(obj, dict):
        raise FormatError("geometry must be an object")
    _check_keys(obj, {"type", "coordinates"}, {"type", "coordinates"}, "geometry")
    kind, c = obj["type"], obj["coordinates"]
    try:
        if kind == "Point":
            return Geometry.point(*c)
        if kind == "MultiPoint":
            return Geometry.multipoint(c)
        if kind == "LineString":
            return Geometry.linestring(c)
        if kind == "MultiLineString":
            return Geometry.multilinestring(c)
        if kind == "Polygon":
            return Geometry.polygon(c[0], c[1:])
        if kind == "MultiPolygon":
            return Geometry.multipolygon(c)
    except (GeometryError, TypeError, IndexError, ValueError) as exc:
        raise FormatError(f"invalid {kind} coordinates: {exc}") from exc
    raise FormatError(f"unsupported geometry type {kind!r}")


def loads_vector(text: str) -> FeatureCollection:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, offset=exc.pos, line=exc.lineno) from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FormatError("document is not a FeatureCollection", offset=0)
    _check_keys(doc, {"type", "features", "dimension"}, {"type", "features"}, "FeatureCollection")
    if not isinstance(doc["features"], list):
        raise FormatError("features must be an array")
    feats = []
    for i, f in enumerate(doc["features"]):
        if not isinstance(f, dict) or f.get("type") != "Feature":
            raise FormatError(f"feature {i} is not a Feature object")
        _check_keys(f, {"type", "properties", "geometry"}, {"type", "geometry"}, f"feature {i}")
        props = f.get("properties") or {}
        if not isinstance(props, dict):
            raise FormatError(f"feature {i} properties must be an object")
        try:
            feats.append(Feature(_geometry_from_json(f["geometry"]), props))
        except GeometryError as exc:
            raise FormatError(f"feature {i}: {exc}") from exc
    dim = doc.get("dimension")
    try:
        return FeatureCollection(tuple(feats), dim)
    except GeometryError as exc:
        raise FormatError(str(exc)) from exc


def read_vector(path: str | os.PathLike) -> FeatureCollection:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(str(path))
    raw = p.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError("not UTF-8 text", offset=exc.start) from exc
    return loads_vector(text)


# ---------------------------------------------------------------------------
# POI tables


@dataclass(frozen=True)
class PoiRow:
    name: str
    category: str
    lon: float
    lat: float
    city: str

    def __post_init__(self):
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")


def write_poi_csv(rows: Iterable[PoiRow], path: str | os.PathLike) -> DatasetPath:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(POI_HEADER)
    for r in rows:
        w.writerow([r.name, r.category, repr(float(r.lon)), repr(float(r.lat)), r.city])
    with open(p, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    record_kind(p, TABLE)
    return DatasetPath(str(path), TABLE)


def read_poi_csv(path: str | os.PathLike) -> list[PoiRow]:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(str(path))
    text = p.read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != POI_HEADER:
        raise FormatError(f"bad POI header {header!r}", line=1, offset=0)
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(POI_HEADER):
            raise FormatError(f"expected {len(POI_HEADER)} fields, got {len(rec)}", line=lineno)
        try:
            rows.append(PoiRow(rec[0], rec[1], float(rec[2]), float(rec[3]), rec[4]))
        except ValueError as exc:
            raise FormatError(f"bad coordinates: {exc}", line=lineno) from exc
    return rows
