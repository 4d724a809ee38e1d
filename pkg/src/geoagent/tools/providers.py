"""Data-collection services behind small provider interfaces.

Every provider has a fixture-backed mock (deterministic, offline, the default)
and a live implementation that speaks HTTP+JSON to a configured base URL.
Coordinates coming from providers are (lon, lat) degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Protocol, Sequence

import httpx
import numpy as np

from ..geometry import Feature, FeatureCollection, Geometry, clip, signed_area
from ..geometry.overlay import contains_points
from ..raster import RasterGrid, parse_ascii_grid, read_raster, write_raster
from ..vector_io import PoiRow, read_poi_csv, read_vector


class ProviderError(RuntimeError):
    """A provider could not answer the request."""


class PoiProvider(Protocol):
    def search(self, city: str, categories: Sequence[str]) -> list[PoiRow]: ...

    def within(self, ring: Sequence[tuple[float, float]]) -> list[PoiRow]: ...


class RoadProvider(Protocol):
    def roads(self, x1: float, x2: float, y1: float, y2: float) -> FeatureCollection: ...


class RsProvider(Protocol):
    def download(self, province: str, city: str, start: date, end: date, dest: Path) -> list[Path]: ...


class Geocoder(Protocol):
    def locate(self, name: str) -> tuple[float, float] | None: ...


@dataclass(frozen=True)
class ProviderBinding:
    poi_provider: PoiProvider
    road_provider: RoadProvider
    rs_provider: RsProvider
    geocoder: Geocoder


def category_matches(category: str, keyword: str) -> bool:
    """Loose keyword match: case-insensitive, tolerating English plurals."""
    c, k = category.strip().lower(), keyword.strip().lower()
    if not k:
        return False
    return k in (c, c + "s", c + "es") or (c.endswith("y") and k == c[:-1] + "ies")


def rows_within(rows: Sequence[PoiRow], ring: Sequence[tuple[float, float]]) -> list[PoiRow]:
    if not rows:
        return []
    pts = np.array([(r.lon, r.lat) for r in rows], float)
    outer = np.asarray(ring, float)[:-1]
    if signed_area(outer) < 0:
        outer = outer[::-1]
    inside = contains_points(pts, [outer])
    return [r for r, m in zip(rows, inside) if m]


def bbox_clip(fc: FeatureCollection, x1: float, x2: float, y1: float, y2: float) -> FeatureCollection:
    box = Geometry.polygon([(x1, y1), (x2, y1), (x2, y2), (x1, y2), (x1, y1)])
    if not len(fc):
        return FeatureCollection((), dimension=1)
    out = clip(fc, FeatureCollection((Feature(box, {}),)))
    return out if len(out) else FeatureCollection((), dimension=fc.dimension)


# ---------------------------------------------------------------------------
# fixture-backed mocks


class Gazetteer:
    """Place-name lookup from a ``name<TAB>lon<TAB>lat`` file.

    Exact match wins, then a case-insensitive one; duplicate names resolve to
    the first occurrence.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.entries: dict[str, tuple[float, float]] = {}
        self._folded: dict[str, tuple[float, float]] = {}
        for lineno, line in enumerate(self.path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{self.path}:{lineno}: expected name<TAB>lon<TAB>lat")
            name, lon, lat = parts[0].strip(), float(parts[1]), float(parts[2])
            self.entries.setdefault(name, (lon, lat))
            self._folded.setdefault(name.casefold(), (lon, lat))

    def locate(self, name: str) -> tuple[float, float] | None:
        name = name.strip()
        return self.entries.get(name) or self._folded.get(name.casefold())


class MockPoiProvider:
    def __init__(self, path: str | Path):
        self.rows = read_poi_csv(path)

    def search(self, city: str, categories: Sequence[str]) -> list[PoiRow]:
        hits = [r for r in self.rows if r.city.casefold() == city.strip().casefold()]
        cats = [c for c in categories if c.strip()]
        if cats:
            hits = [r for r in hits if any(category_matches(r.category, k) for k in cats)]
        return hits

    def within(self, ring):
        return rows_within(self.rows, ring)


class MockRoadProvider:
    def __init__(self, path: str | Path):
        self.network = read_vector(path)

    def roads(self, x1, x2, y1, y2):
        return bbox_clip(self.network, x1, x2, y1, y2)


class MockRsProvider:
    """Serves scenes listed in ``index.tsv`` (city, date, file) of a directory."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.scenes: list[tuple[str, date, Path]] = []
        for line in (self.directory / "index.tsv").read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            city, day, name = line.split("\t")
            self.scenes.append((city.strip(), date.fromisoformat(day.strip()), self.directory / name.strip()))

    def download(self, province, city, start, end, dest):
        dest = Path(dest)
        dest.mkdir(parents=True, exist_ok=True)
        out = []
        for c, day, src in self.scenes:
            if c.casefold() == city.strip().casefold() and start <= day <= end:
                target = dest / src.name
                write_raster(read_raster(src), target)
                out.append(target)
        return out


def mock_providers(fixtures: str | Path) -> ProviderBinding:
    root = Path(fixtures) / "providers"
    return ProviderBinding(
        MockPoiProvider(root / "poi.csv"),
        MockRoadProvider(root / "roads.geojson"),
        MockRsProvider(root / "rs"),
        Gazetteer(Path(fixtures) / "gazetteer.tsv"),
    )


# ---------------------------------------------------------------------------
# live HTTP providers


class _Http:
    def __init__(self, base_url: str, client: httpx.Client | None = None, timeout: float = 30.0):
        self.client = client or httpx.Client(base_url=base_url, timeout=timeout)

    def get_json(self, path: str, **params):
        try:
            resp = self.client.get(path, params=params)
            resp.raise_for_status()
            data = resp.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise ProviderError(f"GET {path} failed: {exc}") from exc
        if not isinstance(data, list):
            raise ProviderError(f"GET {path}: expected a JSON array")
        return data


def _poi_rows(records) -> list[PoiRow]:
    try:
        return [PoiRow(str(r["name"]), str(r["category"]), float(r["lon"]), float(r["lat"]), str(r.get("city", ""))) for r in records]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProviderError(f"malformed POI record: {exc}") from exc


class LivePoiProvider(_Http):
    def search(self, city, categories):
        return _poi_rows(self.get_json("/poi", city=city, keywords=",".join(categories)))

    def within(self, ring):
        polygon = "|".join(f"{lat!r},{lon!r}" for lon, lat in ring)
        return rows_within(_poi_rows(self.get_json("/poi", polygon=polygon)), ring)


class LiveRoadProvider(_Http):
    def roads(self, x1, x2, y1, y2):
        records = self.get_json("/roads", bbox=f"{x1!r},{y1!r},{x2!r},{y2!r}")
        try:
            feats = tuple(Feature(Geometry.linestring(r["coordinates"]), {"name": str(r.get("name", ""))}) for r in records)
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed road record: {exc}") from exc
        return bbox_clip(FeatureCollection(feats, dimension=1), x1, x2, y1, y2)


class LiveRsProvider(_Http):
    """Scene records are ``{"name": ..., "url": ...}``; each url serves an ASCII grid."""

    def download(self, province, city, start, end, dest):
        records = self.get_json("/rs", province=province, city=city, start=start.isoformat(), end=end.isoformat())
        dest = Path(dest)
        dest.mkdir(parents=True, exist_ok=True)
        out = []
        for r in records:
            try:
                resp = self.client.get(r["url"])
                resp.raise_for_status()
                header, band = parse_ascii_grid(resp.text)
            except (KeyError, TypeError, ValueError, httpx.HTTPError) as exc:
                raise ProviderError(f"scene download failed: {exc}") from exc
            grid = RasterGrid(
                (header["xllcorner"], header["yllcorner"] + header["cellsize"] * band.shape[0]),
                header["cellsize"],
                (band,),
                header.get("nodata_value"),
            )
            target = dest / Path(str(r["name"])).name
            write_raster(grid, target)
            out.append(target)
        return out


class LiveGeocoder(_Http):
    def locate(self, name):
        records = self.get_json("/geocode", name=name)
        if not records:
            return None
        try:
            return float(records[0]["lon"]), float(records[0]["lat"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed geocoder record: {exc}") from exc


def live_providers(base_url: str, client: httpx.Client | None = None) -> ProviderBinding:
    return ProviderBinding(
        LivePoiProvider(base_url, client),
        LiveRoadProvider(base_url, client),
        LiveRsProvider(base_url, client),
        LiveGeocoder(base_url, client),
    )

