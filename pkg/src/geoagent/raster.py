"""Raster grids and the remote-sensing operations of the tool pool.

A raster file is a small JSON header (``{"type": "RasterGrid", ...}``) stored
under the dataset's own name, with one ESRI ASCII grid per band next to it
(``<name>.band1.asc``, ``<name>.band2.asc``, ...).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import ndimage

from .geometry import DimensionMismatch, Feature, FeatureCollection, Geometry
from .geometry.overlay import assemble_polygons, contains_points, link_rings
from .vector_io import RASTER, FormatError, archive_existing, record_kind

LABEL_NODATA = -9999


class RasterError(ValueError):
    pass


class EmptyOverlap(RasterError):
    pass


class TooFewDistinctPixels(RasterError):
    pass


class NotLabelRaster(RasterError):
    pass


class GridMismatch(RasterError):
    pass


@dataclass(frozen=True, eq=False)
class RasterGrid:
    """Georeferenced grid. ``origin`` is the upper-left corner; bands are (height, width)."""

    origin: tuple[float, float]
    cell_size: float
    bands: tuple[np.ndarray, ...]
    nodata: float = LABEL_NODATA

    def __post_init__(self):
        bands = tuple(np.array(b, copy=True) for b in self.bands)
        if not bands:
            raise RasterError("raster needs at least one band")
        shape = bands[0].shape
        if len(shape) != 2 or min(shape) < 1:
            raise RasterError(f"bad band shape {shape}")
        if any(b.shape != shape for b in bands):
            raise RasterError("all bands must share dimensions")
        if not self.cell_size > 0:
            raise RasterError("cell_size must be positive")
        for b in bands:
            b.setflags(write=False)
        object.__setattr__(self, "bands", bands)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def height(self) -> int:
        return self.bands[0].shape[0]

    @property
    def width(self) -> int:
        return self.bands[0].shape[1]

    @property
    def extent(self) -> tuple[float, float, float, float]:
        x0, y1 = self.origin
        return (x0, y1 - self.height * self.cell_size, x0 + self.width * self.cell_size, y1)

    def valid_mask(self) -> np.ndarray:
        mask = np.ones((self.height, self.width), dtype=bool)
        for b in self.bands:
            mask &= b != self.nodata
        return mask

    def cell_centers(self) -> np.ndarray:
        """(height*width, 2) array of cell-center coordinates in row-major order."""
        cols = self.origin[0] + (np.arange(self.width) + 0.5) * self.cell_size
        rows = self.origin[1] - (np.arange(self.height) + 0.5) * self.cell_size
        xx, yy = np.meshgrid(cols, rows)
        return np.column_stack([xx.ravel(), yy.ravel()])

    def same_grid(self, other: RasterGrid) -> bool:
        return (
            self.width == other.width
            and self.height == other.height
            and self.origin == other.origin
            and self.cell_size == other.cell_size
            and self.nodata == other.nodata
        )

    def __eq__(self, other):
        if not isinstance(other, RasterGrid):
            return NotImplemented
        return (
            self.same_grid(other)
            and len(self.bands) == len(other.bands)
            and all(np.array_equal(a, b) for a, b in zip(self.bands, other.bands))
        )


@dataclass(frozen=True)
class ClassificationParams:
    k: int = 5
    seed: int = 42
    max_iters: int = 100

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


# ---------------------------------------------------------------------------
# crop


def crop_raster(r: RasterGrid, mask: FeatureCollection) -> RasterGrid:
    """Trim to the mask bounding box and blank cells whose centers fall outside it."""
    if mask.dimension != 2:
        raise DimensionMismatch("crop mask must be polygonal")
    if not len(mask):
        raise EmptyOverlap("crop mask is empty")
    bx0, by0, bx1, by1 = mask.bounds()
    ox, oy = r.origin
    cs = r.cell_size
    tol = 1e-9
    c0 = max(0, math.floor((bx0 - ox) / cs + tol))
    c1 = min(r.width, math.ceil((bx1 - ox) / cs - tol))
    r0 = max(0, math.floor((oy - by1) / cs + tol))
    r1 = min(r.height, math.ceil((oy - by0) / cs - tol))
    if c0 >= c1 or r0 >= r1:
        raise EmptyOverlap("mask does not overlap the raster extent")
    sub = RasterGrid(
        (ox + c0 * cs, oy - r0 * cs),
        cs,
        tuple(b[r0:r1, c0:c1] for b in r.bands),
        r.nodata,
    )
    inside = contains_points(sub.cell_centers(), mask.polygon_rings()).reshape(sub.height, sub.width)
    if not inside.any():
        raise EmptyOverlap("no cell center falls inside the mask")
    bands = []
    for b in sub.bands:
        out = b.copy()
        out[~inside] = r.nodata
        bands.append(out)
    return RasterGrid(sub.origin, cs, tuple(bands), r.nodata)


# ---------------------------------------------------------------------------
# k-means land-use classification


@dataclass
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: list[float] = field(default_factory=list)
    n_iter: int = 0


def _assign(data: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = ((data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(data)), labels]


def kmeans_pp_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centroids = [data[rng.integers(len(data))]]
    closest = ((data - centroids[0]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(len(data))
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, len(data) - 1)
        centroids.append(data[idx])
        closest = np.minimum(closest, ((data - data[idx]) ** 2).sum(axis=1))
    return np.array(centroids, dtype=float)


def kmeans(data: np.ndarray, k: int, seed: int = 42, max_iters: int = 100) -> KMeansResult:
    """Lloyd iterations from a seeded k-means++ start; stops once assignments are stable."""
    data = np.asarray(data, dtype=float)
    rng = np.random.default_rng(seed)
    centroids = kmeans_pp_init(data, k, rng)
    labels, d2 = _assign(data, centroids)
    result = KMeansResult(labels, centroids, [float(d2.sum())], 0)
    for it in range(1, max_iters + 1):
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, data)
        counts = np.bincount(labels, minlength=k)
        filled = counts > 0
        centroids = centroids.copy()
        centroids[filled] = sums[filled] / counts[filled, None]
        new_labels, d2 = _assign(data, centroids)
        result.inertia.append(float(d2.sum()))
        result.centroids, result.n_iter = centroids, it
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    result.labels = labels
    return result


def classify_landuse(r: RasterGrid, params: ClassificationParams = ClassificationParams()) -> RasterGrid:
    """Unsupervised k-means over per-pixel band vectors.

    Labels are renumbered by ascending centroid norm so identical inputs give
    identical label grids.
    """
    valid = r.valid_mask()
    data = np.stack([b[valid] for b in r.bands], axis=1).astype(float)
    if len(data) == 0 or len(np.unique(data, axis=0)) < params.k:
        raise TooFewDistinctPixels(f"need at least {params.k} distinct pixel vectors")
    res = kmeans(data, params.k, params.seed, params.max_iters)
    norms = np.linalg.norm(res.centroids, axis=1)
    order = np.lexsort(tuple(res.centroids[:, j] for j in range(res.centroids.shape[1] - 1, -1, -1)) + (norms,))
    rank = np.empty(params.k, dtype=np.int64)
    rank[order] = np.arange(params.k)
    nodata = r.nodata if not (0 <= r.nodata < params.k) else LABEL_NODATA
    out = np.full((r.height, r.width), nodata, dtype=np.int64)
    out[valid] = rank[res.labels]
    return RasterGrid(r.origin, r.cell_size, (out,), nodata)


# ---------------------------------------------------------------------------
# polygonization


def _is_label_raster(r: RasterGrid) -> bool:
    if len(r.bands) != 1:
        return False
    b = r.bands[0]
    if np.issubdtype(b.dtype, np.integer):
        return True
    vals = b[b != r.nodata]
    return bool(np.all(np.isfinite(vals)) and np.all(vals == np.round(vals)))


_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


def _component_rings(mask: np.ndarray) -> list[list[tuple[int, int]]]:
    """Boundary rings of a boolean cell mask in corner keys (col, -row), interior on the left."""
    padded = np.pad(mask, 1)
    inner = padded[1:-1, 1:-1]
    rows, cols = np.nonzero(inner)
    starts, ends = [], []
    # (neighbour offset, edge start corner, edge end corner) per cell side, counterclockwise
    sides = (
        ((1, 0), (0, -1), (1, -1)),  # bottom: left -> right
        ((0, 1), (1, -1), (1, 0)),  # right: bottom -> top
        ((-1, 0), (1, 0), (0, 0)),  # top: right -> left
        ((0, -1), (0, 0), (0, -1)),  # left: top -> bottom
    )
    for (dr, dc), (sx, sy), (ex, ey) in sides:
        open_side = ~padded[rows + 1 + dr, cols + 1 + dc]
        r, c = rows[open_side], cols[open_side]
        starts.append(np.column_stack([c + sx, -r + sy]))
        ends.append(np.column_stack([c + ex, -r + ey]))
    return link_rings(np.concatenate(starts), np.concatenate(ends))


def raster_to_vector(r: RasterGrid, attribute: str = "class") -> FeatureCollection:
    """One polygon feature per 4-connected region of equal labels, traced along cell edges."""
    if not _is_label_raster(r):
        raise NotLabelRaster("raster_to_vector needs a single-band integer label raster")
    band = r.bands[0]
    valid = band != r.nodata
    feats = []
    for value in np.unique(band[valid]):
        comp, n = ndimage.label(valid & (band == value), structure=_CROSS)
        for cid in range(1, n + 1):
            rings = _component_rings(comp == cid)
            polys = assemble_polygons(rings, eps=r.cell_size, offset=r.origin)
            label = int(value)
            feats.append(Feature(Geometry.from_polygons(polys), {attribute: label}))
    return FeatureCollection(tuple(feats), dimension=2)


def rasterize(fc: FeatureCollection, like: RasterGrid, attribute: str = "class") -> np.ndarray:
    """Burn polygon attribute values onto the cell centers of ``like``."""
    out = np.full((like.height, like.width), like.nodata, dtype=np.int64)
    centers = like.cell_centers()
    for feat in fc.features:
        rings = [np.asarray(ring[:-1], float) for ring in feat.geometry.rings()]
        inside = contains_points(centers, rings, eps=0.0).reshape(like.height, like.width)
        out[inside] = feat.attributes[attribute]
    return out


# ---------------------------------------------------------------------------
# compositing


def composite_bands(rs: Sequence[RasterGrid]) -> RasterGrid:
    if len(rs) < 2:
        raise GridMismatch("compositing needs at least two rasters")
    first = rs[0]
    for other in rs[1:]:
        if not first.same_grid(other):
            raise GridMismatch("rasters differ in size, origin, cell size or nodata")
    return RasterGrid(first.origin, first.cell_size, tuple(b for g in rs for b in g.bands), first.nodata)


# ---------------------------------------------------------------------------
# ASCII grid I/O


def _band_name(main: Path, i: int) -> str:
    return f"{main.name}.band{i + 1}.asc"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    return str(int(f)) if f.is_integer() and abs(f) < 1e15 else repr(f)


def dumps_ascii_grid(r: RasterGrid, band: np.ndarray) -> str:
    x0, y0, _, _ = r.extent
    lines = [
        f"ncols {r.width}",
        f"nrows {r.height}",
        f"xllcorner {_fmt(x0)}",
        f"yllcorner {_fmt(y0)}",
        f"cellsize {_fmt(r.cell_size)}",
        f"NODATA_value {_fmt(r.nodata)}",
    ]
    lines += [" ".join(_fmt(v) for v in row) for row in band.tolist()]
    return "\n".join(lines) + "\n"


def parse_ascii_grid(text: str) -> tuple[dict, np.ndarray]:
    lines = text.splitlines()
    header = {}
    keys = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")
    for i, key in enumerate(keys):
        if i >= len(lines):
            raise FormatError("truncated ASCII grid header", line=i + 1)
        parts = lines[i].split()
        if len(parts) != 2 or parts[0].lower() != key:
            raise FormatError(f"expected {key!r} header", line=i + 1)
        header[key] = float(parts[1])
    nrows, ncols = int(header["nrows"]), int(header["ncols"])
    body = lines[6 : 6 + nrows]
    if len(body) != nrows:
        raise FormatError(f"expected {nrows} rows, got {len(body)}", line=len(lines))
    try:
        values = [[float(v) for v in row.split()] for row in body]
    except ValueError as exc:
        raise FormatError(f"non-numeric cell value: {exc}") from exc
    if any(len(row) != ncols for row in values):
        raise FormatError("row length does not match ncols")
    return header, np.array(values, dtype=float)


def write_raster(r: RasterGrid, path: str | os.PathLike, archive: bool = False) -> str:
    main = Path(path)
    main.parent.mkdir(parents=True, exist_ok=True)
    band_names = [_band_name(main, i) for i in range(len(r.bands))]
    if archive:
        for name in [main.name] + band_names:
            archive_existing(main.parent / name)
    integer = all(np.issubdtype(b.dtype, np.integer) for b in r.bands)
    header = {
        "type": "RasterGrid",
        "width": r.width,
        "height": r.height,
        "origin": [r.origin[0], r.origin[1]],
        "cell_size": r.cell_size,
        "nodata": r.nodata,
        "dtype": "int64" if integer else "float64",
        "bands": band_names,
    }
    for name, band in zip(band_names, r.bands):
        (main.parent / name).write_text(dumps_ascii_grid(r, band), encoding="utf-8", newline="\n")
    main.write_text(json.dumps(header) + "\n", encoding="utf-8", newline="\n")
    record_kind(main, RASTER)
    return str(path)


def read_raster(path: str | os.PathLike) -> RasterGrid:
    main = Path(path)
    if not main.is_file():
        raise FileNotFoundError(str(path))
    try:
        header = json.loads(main.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"raster header is not JSON: {exc}", offset=getattr(exc, "pos", None)) from exc
    if not isinstance(header, dict) or header.get("type") != "RasterGrid":
        raise FormatError("not a raster dataset", offset=0)
    dtype = np.int64 if header.get("dtype") == "int64" else np.float64
    bands = []
    for name in header["bands"]:
        band_path = main.parent / name
        if not band_path.is_file():
            raise FileNotFoundError(str(band_path))
        _, values = parse_ascii_grid(band_path.read_text(encoding="utf-8"))
        bands.append(values.astype(dtype))
    grid = RasterGrid(tuple(header["origin"]), float(header["cell_size"]), tuple(bands), header["nodata"])
    if grid.width != header["width"] or grid.height != header["height"]:
        raise FormatError("band dimensions disagree with the raster header")
    return grid
