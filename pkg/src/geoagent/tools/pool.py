"""The default GIS tool pool: input parsing and adapters for every tool.

Each handler takes the raw ``Action Input`` string, raises on any problem and
returns a ToolResult on success; ``dispatch`` turns exceptions into the
failure templates. Paths in observations are shown relative to the workspace
base (``./data_output/erase.shp``) so traces read the same on every machine.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Callable, Mapping

from ..cartography import MapStyle, NotVector, render_map
from ..geometry import Feature, FeatureCollection, Geometry, buffer, check_clip_dimensions, clip, erase, intersect, union
from ..raster import ClassificationParams, classify_landuse, composite_bands, crop_raster, raster_to_vector, read_raster, write_raster
from ..vector_io import IMAGE, RASTER, TABLE, VECTOR, DatasetPath, archive_existing, read_vector, sniff_kind, write_poi_csv, write_vector
from . import templates as T
from .descriptions import DESCRIPTIONS, EXTRA_DESCRIPTIONS, LOADER_TOOLS
from .providers import Gazetteer, ProviderBinding
from .registry import ToolRegistry, ToolResult, ToolSpec

DEFAULT_LOADER_PATHS = {
    "Subway": "case2/subway_station.shp",
    "Hotel": "case3/hotel.shp",
    "Factory": "case2/factory.shp",
    "Supermarket": "case2/supermarket.shp",
    "RSImage": "case4/data.tif",
    "WuhanMainUrban": "case4/WuhanMainCountry.shp",
}
GAZETTEER_NAME = "gazetteer.tsv"

_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


class MissingFixture(FileNotFoundError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing fixture: {name}")


class ToolInputError(ValueError):
    """The input string does not fit the tool's grammar."""


@dataclass(frozen=True)
class Workspace:
    """Resolution root for relative paths and the directory tools write to."""

    base: Path
    output: Path

    @classmethod
    def at(cls, base: str | Path, output: str | Path | None = None) -> Workspace:
        b = Path(base).resolve()
        o = Path(output).resolve() if output is not None else b / "data_output"
        return cls(b, o)

    def resolve(self, text: str) -> Path:
        p = Path(text)
        return p if p.is_absolute() else self.base / p

    def display(self, path: str | Path) -> str:
        p = Path(path)
        try:
            return "./" + p.relative_to(self.base).as_posix()
        except ValueError:
            return str(p)


def unquote(text: str) -> str:
    return text.strip().strip("\"'`").strip()


def split_args(text: str, count: int | None = None, minimum: int | None = None) -> list[str]:
    parts = [unquote(p) for p in unquote(text).split(",")]
    if count is not None and len(parts) != count:
        raise ToolInputError(f"expected {count} comma-separated values, got {len(parts)}")
    if minimum is not None and len(parts) < minimum:
        raise ToolInputError(f"expected at least {minimum} comma-separated values, got {len(parts)}")
    if any(not p for p in parts):
        raise ToolInputError("empty value in input")
    return parts


def parse_polygon_input(text: str, auto_close: bool = False) -> list[tuple[float, float]]:
    """Parse ``lat,lon|lat,lon|...`` into a closed (lon, lat) ring.

    Pairs are read as latitude first, the order the recorded queries use; a
    string whose first components fall outside [-90, 90] while the second ones
    fit is taken as longitude first instead.
    """
    pairs = []
    for chunk in unquote(text).split("|"):
        vals = [v.strip() for v in chunk.split(",")]
        if len(vals) != 2:
            raise ToolInputError(f"bad coordinate pair {chunk!r}")
        pairs.append((float(vals[0]), float(vals[1])))
    if all(abs(a) <= 90 for a, _ in pairs):
        ring = [(b, a) for a, b in pairs]
    elif all(abs(b) <= 90 for _, b in pairs):
        ring = pairs
    else:
        raise ToolInputError("coordinates out of range")
    if ring[0] != ring[-1]:
        if not auto_close:
            raise ToolInputError("first and last coordinate pairs differ")
        ring.append(ring[0])
    if len(ring) < 4:
        raise ToolInputError("a polygon needs at least four coordinate pairs")
    return ring


def validate_clip_input(a_path: str | Path, b_path: str | Path) -> None:
    """Raise DimensionRuleViolation unless dim(b) >= dim(a)."""
    check_clip_dimensions(read_vector(a_path), read_vector(b_path))


class _Pool:
    """Handler implementations bound to one workspace and provider set."""

    def __init__(self, providers, ws, loaders, auto_close, classification, style, clock, timer):
        self.p = providers
        self.ws = ws
        self.loaders = loaders
        self.auto_close = auto_close
        self.classification = classification
        self.style = style
        self.clock = clock
        self.timer = timer

    # -- output helpers

    def out(self, name: str) -> Path:
        return self.ws.output / name

    def _archive(self, path: Path) -> None:
        archive_existing(path, self.clock)

    def save_vector(self, fc: FeatureCollection, path: Path) -> DatasetPath:
        self._archive(path)
        write_vector(fc, path)
        return DatasetPath(self.ws.display(path), VECTOR)

    def save_raster(self, grid, path: Path) -> DatasetPath:
        for old in [path, *sorted(path.parent.glob(f"{glob_escape(path.name)}.band*.asc"))]:
            self._archive(old)
        write_raster(grid, path)
        return DatasetPath(self.ws.display(path), RASTER)

    def vector_arg(self, text: str) -> tuple[str, FeatureCollection]:
        return text, read_vector(self.ws.resolve(text))

    # -- data collection

    def poi_by_keywords(self, text: str) -> ToolResult:
        parts = [unquote(p) for p in unquote(text).split(",")]
        city, cats = parts[0], [c for c in parts[1:] if c]
        if not city:
            raise ToolInputError("a city name is required")
        rows = self.p.poi_provider.search(city, cats)
        return self._poi(rows)

    def poi_by_polygon(self, text: str) -> ToolResult:
        ring = parse_polygon_input(text, self.auto_close)
        return self._poi(self.p.poi_provider.within(ring))

    def _poi(self, rows) -> ToolResult:
        path = self.out("POI/POI.csv")
        self._archive(path)
        write_poi_csv(rows, path)
        shown = self.ws.display(path)
        return ToolResult(T.POI_OK.format(path=shown), (DatasetPath(shown, TABLE),))

    def road_network(self, text: str) -> ToolResult:
        x1, x2, y1, y2 = (float(v) for v in split_args(text, 4))
        if not (x1 < x2 and y1 < y2):
            raise ToolInputError("rectangle ranges must be increasing")
        t0 = self.timer()
        roads = self.p.road_provider.roads(x1, x2, y1, y2)
        art = self.save_vector(roads, self.out("road_network"))
        elapsed = self.timer() - t0
        return ToolResult(T.ROAD_OK.format(seconds=elapsed, path=art.path), (art,))

    def remote_sensing(self, text: str) -> ToolResult:
        province, city, start, end = split_args(text, 4)
        if not (_DATE.match(start) and _DATE.match(end)):
            raise ToolInputError("dates must be YYYY-MM-DD")
        d0, d1 = date.fromisoformat(start), date.fromisoformat(end)
        if d0 > d1:
            raise ToolInputError("start date after end date")
        dest = self.out("rs_image")
        self._archive(dest)
        files = self.p.rs_provider.download(province, city, d0, d1, dest)
        dest.mkdir(parents=True, exist_ok=True)
        shown = self.ws.display(dest)
        arts = (DatasetPath(shown, RASTER),) + tuple(DatasetPath(self.ws.display(f), RASTER) for f in files)
        return ToolResult(T.RS_DOWNLOAD_OK.format(path=shown), arts)

    def loader(self, kind: str, label: str) -> Callable[[str], ToolResult]:
        def handler(_text: str) -> ToolResult:
            path = self.loaders[kind]
            if not path.is_file():
                raise FileNotFoundError(str(path))
            shown = self.ws.display(path)
            return ToolResult(T.LOAD_OK.format(label=label, path=shown), (DatasetPath(shown, RASTER if kind == "RSImage" else VECTOR),))

        return handler

    # -- vector analysis

    def obtain_location(self, text: str) -> ToolResult:
        name = unquote(text)
        if not name or name in (".", "..") or any(c in name for c in "/\\\0"):
            raise ToolInputError("a plain place name is required")
        loc = self.p.geocoder.locate(name)
        if loc is None:
            raise LookupError(f"unknown place {name!r}")
        fc = FeatureCollection((Feature(Geometry.point(*loc), {"name": name}),))
        art = self.save_vector(fc, self.out(f"{name}.shp"))
        return ToolResult(T.LOCATION_OK.format(name=name, path=art.path), (art,))

    def buffer(self, text: str) -> ToolResult:
        body = unquote(text)
        if "," not in body:
            raise ToolInputError("expected 'shapefile, number'")
        src, dist_text = (unquote(p) for p in body.rsplit(",", 1))
        distance = float(dist_text)
        _, fc = self.vector_arg(src)
        result = buffer(fc, distance)
        d = f"{distance:.1f}"
        art = self.save_vector(result, self.out(f"{Path(src).stem}_neighborhood_{d}.shp"))
        return ToolResult(T.BUFFER_OK.format(distance=d, source=src, path=art.path), (art,))

    def _pair(self, text: str):
        a, b = split_args(text, 2)
        return a, b, read_vector(self.ws.resolve(a)), read_vector(self.ws.resolve(b))

    def intersect(self, text: str) -> ToolResult:
        a, b, fa, fb = self._pair(text)
        if fa.dimension == 2 and fb.dimension == 2:
            result = intersect(fa, fb)
        elif fa.dimension == 2 or fb.dimension == 2:
            # one polygonal side: keep the other side's objects inside it
            data, area = (fb, fa) if fa.dimension == 2 else (fa, fb)
            result = clip(data, area)
        else:
            raise ToolInputError("intersect needs at least one polygonal input")
        art = self.save_vector(result, self.out("intersect.shp"))
        return ToolResult(T.INTERSECT_OK.format(first=a, second=b, path=art.path), (art,))

    def clip(self, text: str) -> ToolResult:
        a, b, fa, fb = self._pair(text)
        check_clip_dimensions(fa, fb)
        art = self.save_vector(clip(fa, fb), self.out("clip.shp"))
        return ToolResult(T.CLIP_OK.format(first=a, second=b, path=art.path), (art,))

    def validate_clip(self, text: str) -> None:
        a, b = split_args(text, 2)
        validate_clip_input(self.ws.resolve(a), self.ws.resolve(b))

    def erase(self, text: str) -> ToolResult:
        a, b, fa, fb = self._pair(text)
        art = self.save_vector(erase(fa, fb), self.out("erase.shp"))
        return ToolResult(T.ERASE_OK.format(first=a, second=b, path=art.path), (art,))

    def union(self, text: str) -> ToolResult:
        a, b, fa, fb = self._pair(text)
        art = self.save_vector(union(fa, fb), self.out("union.shp"))
        return ToolResult(T.UNION_OK.format(first=a, second=b, path=art.path), (art,))

    # -- remote sensing

    def crop(self, text: str) -> ToolResult:
        tif, shp = split_args(text, 2)
        grid = read_raster(self.ws.resolve(tif))
        mask = read_vector(self.ws.resolve(shp))
        art = self.save_raster(crop_raster(grid, mask), self.out("RS_crop.tif"))
        return ToolResult(T.CROP_OK.format(path=art.path), (art,))

    def landuse(self, text: str) -> ToolResult:
        grid = read_raster(self.ws.resolve(unquote(text)))
        art = self.save_raster(classify_landuse(grid, self.classification), self.out("lucc.tif"))
        return ToolResult(T.LANDUSE_OK.format(path=art.path), (art,))

    def raster_to_vector(self, text: str) -> ToolResult:
        grid = read_raster(self.ws.resolve(unquote(text)))
        art = self.save_vector(raster_to_vector(grid), self.out("polyone.shp"))
        return ToolResult(T.R2V_OK.format(path=art.path), (art,))

    def composite(self, text: str) -> ToolResult:
        paths = split_args(text, minimum=2)
        grid = composite_bands([read_raster(self.ws.resolve(p)) for p in paths])
        art = self.save_raster(grid, self.out("composite.tif"))
        return ToolResult(T.COMPOSITE_OK.format(count=len(grid.bands), path=art.path), (art,))

    # -- mapping

    def mapping(self, text: str) -> ToolResult:
        src = self.ws.resolve(unquote(text))
        if sniff_kind(src) != VECTOR:
            raise NotVector(f"{src} is not a vector dataset")
        out = self.out("visual_map.png")
        for p in (out, out.with_suffix(".svg")):
            self._archive(p)
        render_map(read_vector(src), self.style, out, png=True)
        shown = self.ws.display(out)
        arts = (DatasetPath(shown, IMAGE), DatasetPath(self.ws.display(out.with_suffix(".svg")), IMAGE))
        return ToolResult(T.MAPPING_OK.format(path=shown), arts)


def glob_escape(name: str) -> str:
    return re.sub(r"([*?\[])", r"[\1]", name)


def register_default_pool(
    providers: ProviderBinding,
    fixtures: str | Path,
    *,
    base: str | Path | None = None,
    output: str | Path | None = None,
    loader_paths: Mapping[str, str] | None = None,
    extras: bool = False,
    wording: str = "verbatim",
    auto_close_polygon: bool = False,
    classification: ClassificationParams = ClassificationParams(),
    map_style: MapStyle = MapStyle(),
    clock: Callable[[], datetime] = datetime.now,
    timer: Callable[[], float] = time.perf_counter,
) -> ToolRegistry:
    """Build the tool registry over a fixture directory.

    ``base`` is the workspace root used to resolve relative tool inputs and to
    display paths (default: the current directory); ``output`` defaults to
    ``{base}/data_output``. ``loader_paths`` overrides the dataset each loader
    returns, relative to ``fixtures``.
    """
    fixtures = Path(fixtures).resolve()
    ws = Workspace.at(base if base is not None else Path.cwd(), output)
    rel = dict(DEFAULT_LOADER_PATHS)
    rel.update(loader_paths or {})
    unknown = set(rel) - set(DEFAULT_LOADER_PATHS)
    if unknown:
        raise ValueError(f"unknown loader kinds {sorted(unknown)}")
    loaders = {k: fixtures / v for k, v in rel.items()}
    for k, path in loaders.items():
        if not path.is_file():
            raise MissingFixture(rel[k])
    if not (fixtures / GAZETTEER_NAME).is_file():
        raise MissingFixture(GAZETTEER_NAME)

    pool = _Pool(providers, ws, loaders, auto_close_polygon, classification, map_style, clock, timer)

    def spec(name, handler, grammar, category, validators=(), failure=T.GENERIC_FAILURE, table=DESCRIPTIONS):
        return ToolSpec(name, table[name], handler, grammar, tuple(validators), failure, category)

    specs = [
        spec("Get_POI_By_Keywords", pool.poi_by_keywords, "city[, category...]", "collection"),
        spec("Get_POI_By_Polygon", pool.poi_by_polygon, "lat,lon|lat,lon|...", "collection"),
        spec("Get_Road_Network_By_Rectangle", pool.road_network, "x1,x2,y1,y2", "collection"),
        spec("Get_Remote_Sensing_Image", pool.remote_sensing, "province, city, start, end", "collection"),
    ]
    for name, (kind, label) in LOADER_TOOLS.items():
        specs.append(spec(name, pool.loader(kind, label), "None", "loader"))
    specs += [
        spec("Obtain location", pool.obtain_location, "place name", "analysis"),
        spec("Buffer", pool.buffer, "shapefile, number", "analysis"),
        spec("Intersect", pool.intersect, "A, B", "analysis"),
        spec("Clip", pool.clip, "A, B", "analysis", validators=[pool.validate_clip]),
        spec("Erase", pool.erase, "A, B", "analysis"),
        spec("Crop_Remote_Sensing_Image", pool.crop, "tif, shapefile", "remote sensing"),
        spec("LandUse_Classification", pool.landuse, "tif", "remote sensing"),
        spec("Raster_to_Vector", pool.raster_to_vector, "tif", "remote sensing"),
        spec("Mapping", pool.mapping, "vector file", "mapping", failure=T.MAPPING_FAILURE),
    ]
    if extras:
        specs += [
            spec("Union", pool.union, "A, B", "analysis", table=EXTRA_DESCRIPTIONS),
            spec("Composite_Bands", pool.composite, "tif, tif[, tif...]", "remote sensing", table=EXTRA_DESCRIPTIONS),
        ]
    return ToolRegistry(specs, wording, ws)


def default_gazetteer(fixtures: str | Path) -> Gazetteer:
    return Gazetteer(Path(fixtures) / GAZETTEER_NAME)
