"""Thematic map rendering to SVG, with an optional PNG produced by a small
scanline rasterizer.

The map carries a legend (right), a north arrow (top right), a scale bar
(bottom left) and an optional graticule. Each element group has a stable
``id`` so tests and downstream tools can find it.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any
from xml.sax.saxutils import escape

import numpy as np

from .geometry import EmptyInput, FeatureCollection
from .vector_io import IMAGE, VECTOR, DatasetPath, read_vector, record_kind, sniff_kind

# colorblind-safe categorical palette (Okabe-Ito followed by Tol muted)
PALETTE = (
    "#E69F00",
    "#56B4E9",
    "#009E73",
    "#F0E442",
    "#0072B2",
    "#D55E00",
    "#CC79A7",
    "#999933",
    "#882255",
    "#44AA99",
    "#332288",
    "#DDCC77",
)
DEFAULT_CLASS = "unclassified"


class NotVector(ValueError):
    """The mapping input is not a vector dataset."""


@dataclass(frozen=True)
class MapStyle:
    width: int = 800
    height: int = 600
    palette: tuple[str, ...] = PALETTE
    legend: bool = True
    north_arrow: bool = True
    scale_bar: bool = True
    grid: bool = False
    class_attribute: str = "class"
    title: str | None = None

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ValueError("canvas must be at least 64x64 pixels")
        if not self.palette:
            raise ValueError("palette needs at least one color")


def nice_number(x: float) -> float:
    """Largest value of the form 1, 2 or 5 times a power of ten not above ``x``."""
    if x <= 0:
        raise ValueError("nice_number needs a positive value")
    exp = math.floor(math.log10(x))
    for m in (5, 2, 1):
        v = m * 10.0**exp
        if v <= x * (1 + 1e-12):
            return v
    return 10.0**exp


@dataclass(frozen=True)
class MapLayout:
    """Affine fit of the data bounds into the canvas margin box."""

    bounds: tuple[float, float, float, float]
    scale: float  # pixels per data unit
    offset_x: float
    offset_y: float
    box: tuple[float, float, float, float]  # margin box in pixels (x0, y0, x1, y1)

    @classmethod
    def fit(cls, bounds, width: int, height: int, margin: float = 0.05) -> MapLayout:
        minx, miny, maxx, maxy = bounds
        dx, dy = maxx - minx, maxy - miny
        if dx <= 0 and dy <= 0:
            dx = dy = 1.0
            minx, miny = minx - 0.5, miny - 0.5
            maxx, maxy = minx + 1.0, miny + 1.0
        box = (margin * width, margin * height, (1 - margin) * width, (1 - margin) * height)
        bw, bh = box[2] - box[0], box[3] - box[1]
        scale = min(bw / dx if dx > 0 else math.inf, bh / dy if dy > 0 else math.inf)
        ox = box[0] + (bw - dx * scale) / 2
        oy = box[1] + (bh - dy * scale) / 2
        return cls((minx, miny, maxx, maxy), scale, ox, oy, box)

    def project(self, pts) -> np.ndarray:
        a = np.asarray(pts, float).reshape(-1, 2)
        minx, miny, _, maxy = self.bounds
        px = self.offset_x + (a[:, 0] - minx) * self.scale
        py = self.offset_y + (maxy - a[:, 1]) * self.scale
        return np.column_stack([px, py])

    @property
    def units_per_pixel(self) -> float:
        return 1.0 / self.scale


def _n(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _class_key(v: Any):
    if v == DEFAULT_CLASS:
        return (2, "")
    if isinstance(v, (int, float)):
        return (0, v)
    return (1, str(v))


def feature_classes(fc: FeatureCollection, attribute: str) -> list:
    return [f.attributes.get(attribute, DEFAULT_CLASS) for f in fc.features]


def class_colors(classes: list, palette) -> dict:
    ordered = sorted(set(classes), key=_class_key)
    return {c: palette[i % len(palette)] for i, c in enumerate(ordered)}


def _path_data(layout: MapLayout, poly) -> str:
    parts = []
    for ring in poly:
        p = layout.project(ring[:-1])
        parts.append("M" + " L".join(f"{_n(x)},{_n(y)}" for x, y in p) + " Z")
    return " ".join(parts)


def _north_arrow(style: MapStyle) -> tuple[list[tuple[float, float]], str]:
    size = max(16.0, 0.06 * min(style.width, style.height))
    cx = style.width - 0.03 * style.width - size / 2
    top = 0.03 * style.height
    tri = [(cx, top), (cx + size / 3, top + size), (cx, top + 0.75 * size), (cx - size / 3, top + size)]
    pts = " ".join(f"{_n(x)},{_n(y)}" for x, y in tri)
    svg = (
        f'<g id="north-arrow"><polygon points="{pts}" fill="#000000"/>'
        f'<text x="{_n(cx)}" y="{_n(top + size + 14)}" text-anchor="middle" font-size="12">N</text></g>'
    )
    return tri, svg


def _scale_bar(style: MapStyle, layout: MapLayout) -> tuple[tuple[float, float, float, float], float, float, str]:
    box_w = layout.box[2] - layout.box[0]
    length_units = nice_number(0.25 * box_w * layout.units_per_pixel)
    length_px = length_units * layout.scale
    x0 = layout.box[0]
    y0 = style.height - 0.03 * style.height - 6
    rect = (x0, y0, length_px, 6.0)
    label = f"{length_units:g}"
    svg = (
        f'<g id="scale-bar" data-length="{label}" data-pixels="{repr(length_px)}" '
        f'data-units-per-pixel="{repr(layout.units_per_pixel)}">'
        f'<rect x="{_n(x0)}" y="{_n(y0)}" width="{_n(length_px)}" height="6" fill="#000000"/>'
        f'<text x="{_n(x0 + length_px / 2)}" y="{_n(y0 - 4)}" text-anchor="middle" font-size="12">{label} m</text></g>'
    )
    return rect, length_units, length_px, svg


def _graticule(layout: MapLayout) -> str:
    minx, miny, maxx, maxy = layout.bounds
    step = nice_number(max(maxx - minx, maxy - miny) / 5)
    bx0, by0, bx1, by1 = layout.box
    lines = []
    x = math.ceil(minx / step) * step
    while x <= maxx + 1e-9 * step:
        px = layout.project([(x, miny)])[0, 0]
        lines.append(f'<line x1="{_n(px)}" y1="{_n(by0)}" x2="{_n(px)}" y2="{_n(by1)}"/>')
        x += step
    y = math.ceil(miny / step) * step
    while y <= maxy + 1e-9 * step:
        py = layout.project([(minx, y)])[0, 1]
        lines.append(f'<line x1="{_n(bx0)}" y1="{_n(py)}" x2="{_n(bx1)}" y2="{_n(py)}"/>')
        y += step
    return f'<g id="graticule" stroke="#888888" stroke-width="0.5" data-step="{step:g}">' + "".join(lines) + "</g>"


def _legend(style: MapStyle, colors: dict) -> tuple[list[tuple[float, float, float, float, str]], str]:
    x = style.width - 0.03 * style.width - 110
    y = 0.03 * style.height + max(16.0, 0.06 * min(style.width, style.height)) + 28
    swatches = []
    rows = []
    for i, (cls, color) in enumerate(colors.items()):
        sy = y + 20 * i
        swatches.append((x, sy, 14.0, 14.0, color))
        rows.append(
            f'<g class="legend-entry" data-class="{escape(str(cls))}">'
            f'<rect x="{_n(x)}" y="{_n(sy)}" width="14" height="14" fill="{color}" stroke="#333333"/>'
            f'<text x="{_n(x + 20)}" y="{_n(sy + 12)}" font-size="12">{escape(str(cls))}</text></g>'
        )
    return swatches, '<g id="legend">' + "".join(rows) + "</g>"


def render_svg(fc: FeatureCollection, style: MapStyle = MapStyle()) -> str:
    return _render(fc, style)[0]


def _render(fc: FeatureCollection, style: MapStyle):
    if not len(fc):
        raise EmptyInput("nothing to map")
    layout = MapLayout.fit(fc.bounds(), style.width, style.height)
    classes = feature_classes(fc, style.class_attribute)
    colors = class_colors(classes, style.palette)
    body = []
    shapes = []  # (kind, pixel data, color) for the raster pass
    for feat, cls in zip(fc.features, classes):
        color = colors[cls]
        g = feat.geometry
        for poly in g.polygons():
            body.append(f'<path d="{_path_data(layout, poly)}" fill="{color}" fill-rule="evenodd" stroke="#333333" stroke-width="0.5"/>')
            shapes.append(("polygon", [layout.project(r[:-1]) for r in poly], color))
        for line in g.lines():
            p = layout.project(line)
            body.append(f'<polyline points="{" ".join(f"{_n(x)},{_n(y)}" for x, y in p)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            shapes.append(("line", p, color))
        for pt in g.points():
            (x, y), = layout.project([pt])
            body.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="3" fill="{color}" stroke="#333333" stroke-width="0.5"/>')
            shapes.append(("point", (x, y), color))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">',
        f'<rect x="0" y="0" width="{style.width}" height="{style.height}" fill="#FFFFFF"/>',
    ]
    if style.title:
        parts.append(f'<text id="title" x="{_n(style.width / 2)}" y="20" text-anchor="middle" font-size="16">{escape(style.title)}</text>')
    if style.grid:
        parts.append(_graticule(layout))
    parts.append('<g id="features">' + "".join(body) + "</g>")
    extras: dict[str, Any] = {}
    if style.legend:
        extras["legend"], svg = _legend(style, colors)
        parts.append(svg)
    if style.north_arrow:
        extras["north_arrow"], svg = _north_arrow(style)
        parts.append(svg)
    if style.scale_bar:
        rect, _, _, svg = _scale_bar(style, layout)
        extras["scale_bar"] = rect
        parts.append(svg)
    parts.append("</svg>")
    return "\n".join(parts) + "\n", shapes, extras


# ---------------------------------------------------------------------------
# PNG


def _hex(color: str) -> tuple[int, int, int, int]:
    c = color.lstrip("#")
    return (int(c[0:2], 16), int(c[2:4], 16), int(c[4:6], 16), 255)


def _fill_polygon(img: np.ndarray, rings: list[np.ndarray], rgba) -> None:
    """Even-odd scanline fill sampled at pixel centers."""
    h, w = img.shape[:2]
    edges = [(r, np.roll(r, -1, axis=0)) for r in rings if len(r) >= 3]
    if not edges:
        return
    a = np.concatenate([e[0] for e in edges])
    b = np.concatenate([e[1] for e in edges])
    y_lo = max(0, int(math.floor(min(a[:, 1].min(), b[:, 1].min()))))
    y_hi = min(h, int(math.ceil(max(a[:, 1].max(), b[:, 1].max()))) + 1)
    for row in range(y_lo, y_hi):
        yc = row + 0.5
        spans = (a[:, 1] <= yc) != (b[:, 1] <= yc)
        if not spans.any():
            continue
        aa, bb = a[spans], b[spans]
        xs = np.sort(aa[:, 0] + (yc - aa[:, 1]) * (bb[:, 0] - aa[:, 0]) / (bb[:, 1] - aa[:, 1]))
        for x0, x1 in zip(xs[0::2], xs[1::2]):
            c0 = max(0, int(math.ceil(x0 - 0.5)))
            c1 = min(w, int(math.floor(x1 - 0.5)) + 1)
            if c1 > c0:
                img[row, c0:c1] = rgba


def _draw_line(img: np.ndarray, p: np.ndarray, rgba) -> None:
    h, w = img.shape[:2]
    for (x0, y0), (x1, y1) in zip(p[:-1], p[1:]):
        n = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
        xs = np.clip(np.round(np.linspace(x0, x1, n + 1) - 0.5).astype(int), 0, w - 1)
        ys = np.clip(np.round(np.linspace(y0, y1, n + 1) - 0.5).astype(int), 0, h - 1)
        img[ys, xs] = rgba


def _fill_rect(img: np.ndarray, x, y, w, h, rgba) -> None:
    H, W = img.shape[:2]
    c0, r0 = max(0, int(round(x))), max(0, int(round(y)))
    c1, r1 = min(W, int(round(x + w))), min(H, int(round(y + h)))
    if c1 > c0 and r1 > r0:
        img[r0:r1, c0:c1] = rgba


def encode_png(img: np.ndarray) -> bytes:
    """Encode an (h, w, 4) uint8 array as an 8-bit RGBA PNG."""
    h, w = img.shape[:2]
    raw = b"".join(b"\x00" + img[row].tobytes() for row in range(h))

    def chunk(tag: bytes, data: bytes) -> bytes:
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    ihdr = struct.pack(">IIBBBBB", w, h, 8, 6, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b"")


def rasterize_map(fc: FeatureCollection, style: MapStyle = MapStyle()) -> np.ndarray:
    _, shapes, extras = _render(fc, style)
    img = np.full((style.height, style.width, 4), 255, dtype=np.uint8)
    for kind, data, color in shapes:
        rgba = _hex(color)
        if kind == "polygon":
            _fill_polygon(img, data, rgba)
        elif kind == "line":
            _draw_line(img, data, rgba)
        else:
            _fill_rect(img, data[0] - 2, data[1] - 2, 5, 5, rgba)
    for x, y, w, h, color in extras.get("legend", []):
        _fill_rect(img, x, y, w, h, _hex(color))
    if "north_arrow" in extras:
        _fill_polygon(img, [np.array(extras["north_arrow"])], (0, 0, 0, 255))
    if "scale_bar" in extras:
        _fill_rect(img, *extras["scale_bar"], (0, 0, 0, 255))
    return img


def render_map(source: FeatureCollection | str | Path, style: MapStyle = MapStyle(), out: str | Path = "map.svg", png: bool | None = None) -> DatasetPath:
    """Render ``source`` (a collection or a vector file path) to ``{stem}.svg``.

    A PNG twin ``{stem}.png`` is written when ``png`` is true, or by default
    when ``out`` itself ends in ``.png``. Returns ``out``.
    """
    if not isinstance(source, FeatureCollection):
        if sniff_kind(source) != VECTOR:
            raise NotVector(f"{source} is not a vector dataset")
        source = read_vector(source)
    out = Path(out)
    if png is None:
        png = out.suffix.lower() == ".png"
    out.parent.mkdir(parents=True, exist_ok=True)
    svg_path = out.with_suffix(".svg")
    svg_path.write_text(render_svg(source, style), encoding="utf-8", newline="\n")
    record_kind(svg_path, IMAGE)
    if png:
        png_path = out.with_suffix(".png")
        png_path.write_bytes(encode_png(rasterize_map(source, style)))
        record_kind(png_path, IMAGE)
    return DatasetPath(str(out), IMAGE)
