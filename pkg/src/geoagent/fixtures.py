"""Deterministic synthetic datasets for the loaders, mock providers and demos.

``build_fixtures(dest)`` regenerates the tree shipped under
``geoagent/data/fixtures``:

    case2/   subway_station, supermarket, factory      (facility siting)
    case3/   subway_station, supermarket, hotel        (spatial query)
    case4/   data.tif (3-band image), WuhanMainCountry (urban-area mask)
    gazetteer.tsv
    providers/poi.csv, providers/roads.geojson, providers/rs/

Analysis layers live in one planar frame (meters, an 8 km square); provider
data is in lon/lat degrees around the cities the recorded queries mention.
"""

from __future__ import annotations

import shutil
from pathlib import Path

import numpy as np

from .geometry import Feature, FeatureCollection, Geometry
from .raster import RasterGrid, write_raster
from .vector_io import PoiRow, write_poi_csv, write_vector

SEED = 20230511
FRAME = 8000.0

CATEGORIES = ("restaurant", "hotel", "school", "hospital", "park", "supermarket")


def bundled_fixtures() -> Path:
    return Path(__file__).resolve().parent / "data" / "fixtures"


def _points(xy, prefix: str) -> FeatureCollection:
    feats = [Feature(Geometry.point(round(float(x), 1), round(float(y), 1)), {"id": i, "name": f"{prefix} {i + 1}"}) for i, (x, y) in enumerate(xy)]
    return FeatureCollection(tuple(feats))


def _line_stations(rng, start, end, spacing, jitter):
    start, end = np.asarray(start, float), np.asarray(end, float)
    n = int(np.linalg.norm(end - start) // spacing) + 1
    t = np.linspace(0.0, 1.0, n)[:, None]
    return start + t * (end - start) + rng.normal(0.0, jitter, (n, 2))


def facility_layers(seed: int = SEED) -> dict[str, FeatureCollection]:
    """case2: two metro lines, scattered supermarkets, an industrial corner."""
    rng = np.random.default_rng(seed)
    subway = np.vstack([
        _line_stations(rng, (600, 4000), (7400, 4200), 750, 40),
        _line_stations(rng, (4500, 700), (4300, 7300), 750, 40)[[0, 1, 2, 3, 5, 6, 7, 8]],
    ])
    supermarket = rng.uniform(300, FRAME - 300, (18, 2))
    factory = np.vstack([rng.uniform(200, 2200, (4, 2)), [[7300.0, 7400.0]]])
    return {
        "subway_station": _points(subway, "Station"),
        "supermarket": _points(supermarket, "Supermarket"),
        "factory": _points(factory, "Factory"),
    }


def query_layers(seed: int = SEED + 1) -> dict[str, FeatureCollection]:
    """case3: hotels clustered along the metro, plus supermarkets and stations."""
    rng = np.random.default_rng(seed)
    subway = np.vstack([
        _line_stations(rng, (800, 1500), (7200, 6500), 800, 50),
        _line_stations(rng, (1000, 6800), (7000, 2500), 900, 50),
    ])
    supermarket = rng.uniform(300, FRAME - 300, (15, 2))
    near = subway[rng.integers(len(subway), size=45)] + rng.normal(0, 450, (45, 2))
    hotels = np.vstack([near, rng.uniform(0, FRAME, (15, 2)), rng.normal((4700, 5500), 350, (8, 2))])
    hotels = np.clip(hotels, 50, FRAME - 50)
    return {
        "subway_station": _points(subway, "Station"),
        "supermarket": _points(supermarket, "Supermarket"),
        "hotel": _points(hotels, "Hotel"),
    }


# ---------------------------------------------------------------------------
# case4 imagery

LAND_SIGNATURES = {
    "water": (40, 60, 30),
    "vegetation": (50, 95, 170),
    "urban": (155, 140, 120),
    "bare": (200, 180, 150),
    "farmland": (90, 125, 105),
}


def land_cover_map(height: int = 80, width: int = 80) -> np.ndarray:
    """Integer class map (indices into LAND_SIGNATURES order)."""
    names = list(LAND_SIGNATURES)
    r, c = np.mgrid[0:height, 0:width].astype(float)
    cls = np.full((height, width), names.index("farmland"))
    veg = np.sin(r / 9.0) * np.cos(c / 11.0) > 0.35
    cls[veg] = names.index("vegetation")
    cls[np.hypot(r - 0.45 * height, c - 0.55 * width) < 0.22 * width] = names.index("urban")
    cls[(np.hypot(r - 0.8 * height, c - 0.2 * width) < 0.09 * width) | ((r < 0.15 * height) & (c > 0.75 * width))] = names.index("bare")
    river = np.abs(r - (0.3 * height + 6 * np.sin(c / 8.0))) < 2.5
    lake = np.hypot(r - 0.7 * height, c - 0.72 * width) < 0.1 * width
    cls[river | lake] = names.index("water")
    return cls


def rs_image(seed: int = SEED, height: int = 80, width: int = 80, cell: float = 30.0) -> RasterGrid:
    rng = np.random.default_rng(seed)
    cls = land_cover_map(height, width)
    sig = np.array(list(LAND_SIGNATURES.values()), float)
    bands = []
    for j in range(3):
        v = sig[cls, j] + rng.normal(0, 5, cls.shape)
        bands.append(np.clip(np.rint(v), 0, 255).astype(np.int64))
    return RasterGrid((0.0, height * cell), cell, tuple(bands), -1)


def urban_mask(height: int = 80, width: int = 80, cell: float = 30.0) -> FeatureCollection:
    """Irregular 12-gon covering the middle of the image."""
    cx, cy = 0.5 * width * cell, 0.5 * height * cell
    ang = 2 * np.pi * np.arange(12) / 12
    rad = np.array([0.36, 0.30, 0.40, 0.33, 0.38, 0.29, 0.35, 0.41, 0.31, 0.37, 0.34, 0.39]) * width * cell
    ring = [(round(cx + r * np.cos(a), 1), round(cy + r * np.sin(a), 1)) for a, r in zip(ang, rad)]
    return FeatureCollection((Feature(Geometry.polygon(ring + ring[:1]), {"name": "main urban area"}),))


# ---------------------------------------------------------------------------
# provider data (lon/lat)


def poi_rows(seed: int = SEED) -> list[PoiRow]:
    rng = np.random.default_rng(seed)
    rows = []
    for city, (lon0, lon1, lat0, lat1), n in (("Beijing", (116.20, 116.55, 39.78, 40.03), 90), ("Wuhan", (114.20, 114.45, 30.48, 30.65), 30)):
        for i in range(n):
            cat = CATEGORIES[int(rng.integers(len(CATEGORIES)))]
            lon = round(float(rng.uniform(lon0, lon1)), 6)
            lat = round(float(rng.uniform(lat0, lat1)), 6)
            rows.append(PoiRow(f"{city} {cat} {i + 1}", cat, lon, lat, city))
    return rows


def road_network(seed: int = SEED) -> FeatureCollection:
    rng = np.random.default_rng(seed)
    feats = []
    for i, lat in enumerate(np.arange(41.02, 41.24, 0.025)):
        wiggle = rng.normal(0, 0.002, 7)
        pts = [(round(float(lon), 6), round(float(lat + w), 6)) for lon, w in zip(np.linspace(-8.76, -8.46, 7), wiggle)]
        feats.append(Feature(Geometry.linestring(pts), {"name": f"Rua {i + 1}"}))
    for i, lon in enumerate(np.arange(-8.74, -8.46, 0.03)):
        wiggle = rng.normal(0, 0.002, 6)
        pts = [(round(float(lon + w), 6), round(float(lat), 6)) for lat, w in zip(np.linspace(41.0, 41.25, 6), wiggle)]
        feats.append(Feature(Geometry.linestring(pts), {"name": f"Avenida {i + 1}"}))
    feats.append(Feature(Geometry.linestring([(-8.75, 41.01), (-8.6, 41.12), (-8.47, 41.24)]), {"name": "Via Diagonal"}))
    return FeatureCollection(tuple(feats))


RS_SCENES = (
    ("Wuhan", "2015-02-12", "LC8_wuhan_20150212.tif"),
    ("Wuhan", "2015-02-18", "LC8_wuhan_20150218.tif"),
    ("Wuhan", "2015-03-05", "LC8_wuhan_20150305.tif"),
    ("Beijing", "2015-02-15", "LC8_beijing_20150215.tif"),
)

GAZETTEER = (
    # place names used by the case-study layers carry planar coordinates in
    # the analysis frame; city names carry lon/lat
    ("Hubei University", 4750.0, 5600.0),
    ("Subway Stations", 4000.0, 4000.0),
    ("Wuhan University", 2300.0, 3100.0),
    ("Beijing", 116.4074, 39.9042),
    ("Wuhan", 114.3055, 30.5928),
    ("Porto", -8.6291, 41.1579),
    ("Shanghai", 121.4737, 31.2304),
)


def build_fixtures(dest: str | Path) -> Path:
    dest = Path(dest)
    if dest.exists():
        shutil.rmtree(dest)
    for name, fc in facility_layers().items():
        write_vector(fc, dest / "case2" / f"{name}.shp")
    for name, fc in query_layers().items():
        write_vector(fc, dest / "case3" / f"{name}.shp")
    write_raster(rs_image(), dest / "case4" / "data.tif")
    write_vector(urban_mask(), dest / "case4" / "WuhanMainCountry.shp")
    lines = [f"{n}\t{x!r}\t{y!r}" for n, x, y in GAZETTEER]
    (dest / "gazetteer.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    prov = dest / "providers"
    write_poi_csv(poi_rows(), prov / "poi.csv")
    write_vector(road_network(), prov / "roads.geojson")
    rs = prov / "rs"
    for k, (city, day, name) in enumerate(RS_SCENES):
        write_raster(rs_image(SEED + 10 + k, 20, 20, 60.0), rs / name)
    index = [f"{city}\t{day}\t{name}" for city, day, name in RS_SCENES]
    (rs / "index.tsv").write_text("\n".join(index) + "\n", encoding="utf-8", newline="\n")
    return dest


def prepare_workspace(base: str | Path, fixtures: str | Path | None = None) -> Path:
    """Copy the fixture tree to ``{base}/data_use`` and return that path."""
    src = Path(fixtures) if fixtures is not None else bundled_fixtures()
    target = Path(base) / "data_use"
    shutil.copytree(src, target, dirs_exist_ok=True)
    return target


if __name__ == "__main__":
    print(build_fixtures(bundled_fixtures()))
