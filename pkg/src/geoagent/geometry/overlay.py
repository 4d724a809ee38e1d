"""Polygon boolean operations on a snapped segment arrangement.

Both operands are flattened into oriented edges (outer rings CCW, holes CW),
snapped to a fixed grid and split at every mutual intersection, touching
endpoint and collinear overlap. Each resulting unique segment then carries a
signed multiplicity per operand. Winding numbers on either side of a segment
follow from one ray cast plus that multiplicity, so a segment is kept exactly
when the boolean predicate differs across it. Kept segments are oriented with
the result interior on the left and linked into rings, turning as far left as
possible at shared vertices so pinched regions come out as separate rings.

A region belongs to an operand where its winding number is positive. That makes
overlapping features inside one operand behave as their union, which is what
buffer dissolution relies on.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .model import SNAP_EPS

Polygon = list  # [outer ring, *hole rings], each an open (n, 2) float array

PREDICATES: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "union": lambda a, b: a | b,
    "intersection": lambda a, b: a & b,
    "difference": lambda a, b: a & ~b,
    "dissolve": lambda a, b: a,
}


def snap_keys(coords: np.ndarray, eps: float = SNAP_EPS) -> np.ndarray:
    return np.round(np.asarray(coords, dtype=float) / eps).astype(np.int64)


def rings_to_edges(rings: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Open rings -> (starts, ends) arrays of shape (m, 2)."""
    starts, ends = [], []
    for ring in rings:
        r = np.asarray(ring, dtype=float)
        if len(r) and np.array_equal(r[0], r[-1]):
            r = r[:-1]
        if len(r) < 3:
            continue
        starts.append(r)
        ends.append(np.roll(r, -1, axis=0))
    if not starts:
        return np.zeros((0, 2)), np.zeros((0, 2))
    return np.concatenate(starts), np.concatenate(ends)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


# ---------------------------------------------------------------------------
# strip index: pairs each query ordinate with the edges whose y-span covers it


def _strip_blocks(qy: np.ndarray, ylo: np.ndarray, yhi: np.ndarray, pad: float = 0.0, block: int = 4_000_000):
    """Yield (query_idx, edge_idx) blocks such that every edge with
    ylo - pad <= qy <= yhi + pad appears in the block of that query."""
    n, m = len(qy), len(ylo)
    if n == 0 or m == 0:
        return
    lo_q, hi_q = float(qy.min()), float(qy.max())
    nstrips = int(min(1024, max(1, math.sqrt(m))))
    if hi_q <= lo_q:
        nstrips = 1
    width = (hi_q - lo_q) / nstrips if nstrips > 1 else 1.0

    def strip_of(v):
        if nstrips == 1:
            return np.zeros(np.shape(v), dtype=np.int64)
        return np.clip(np.floor((v - lo_q) / width).astype(np.int64), 0, nstrips - 1)

    q_strip = strip_of(qy)
    live = (yhi + pad >= lo_q) & (ylo - pad <= hi_q)
    e_idx = np.nonzero(live)[0]
    s_lo = strip_of(ylo[e_idx] - pad)
    s_hi = strip_of(yhi[e_idx] + pad)
    counts = s_hi - s_lo + 1
    rep_e = np.repeat(e_idx, counts)
    offsets = np.arange(len(rep_e)) - np.repeat(np.cumsum(counts) - counts, counts)
    rep_s = np.repeat(s_lo, counts) + offsets

    q_order = np.argsort(q_strip, kind="stable")
    q_bounds = np.searchsorted(q_strip[q_order], np.arange(nstrips + 1))
    e_order = np.argsort(rep_s, kind="stable")
    e_bounds = np.searchsorted(rep_s[e_order], np.arange(nstrips + 1))
    for s in range(nstrips):
        qs = q_order[q_bounds[s] : q_bounds[s + 1]]
        es = rep_e[e_order[e_bounds[s] : e_bounds[s + 1]]]
        if len(qs) == 0 or len(es) == 0:
            continue
        step = max(1, block // len(es))
        for k in range(0, len(qs), step):
            yield qs[k : k + step], es


def crossing_sums(qx, qy, ax, ay, bx, by, weights: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Signed crossings of the ray from each query point towards +x.

    An upward edge counts +weight, a downward edge -weight (half-open in y),
    only where the crossing lies strictly more than ``tol`` to the right of
    the query. ``weights`` has shape (m,) or (m, k); the result is (n,) or (n, k).
    """
    qx, qy = np.asarray(qx, float), np.asarray(qy, float)
    w = np.asarray(weights, float)
    squeeze = w.ndim == 1
    if squeeze:
        w = w[:, None]
    out = np.zeros((len(qx), w.shape[1]))
    ylo, yhi = np.minimum(ay, by), np.maximum(ay, by)
    sloped = yhi > ylo
    sign = np.where(by > ay, 1.0, -1.0)
    for qi, ei in _strip_blocks(qy, np.where(sloped, ylo, np.inf), np.where(sloped, yhi, -np.inf)):
        y = qy[qi][:, None]
        spans = (ylo[ei] <= y) & (y < yhi[ei])
        t = (y - ay[ei]) / np.where(sloped[ei], by[ei] - ay[ei], 1.0)
        xc = ax[ei] + t * (bx[ei] - ax[ei])
        hit = spans & (xc > qx[qi][:, None] + tol)
        out[qi] += (hit * sign[ei]) @ w[ei]
    return out[:, 0] if squeeze else out


def near_boundary(qx, qy, ax, ay, bx, by, tol: float = SNAP_EPS) -> np.ndarray:
    """True where a query point lies within ``tol`` of any edge."""
    qx, qy = np.asarray(qx, float), np.asarray(qy, float)
    out = np.zeros(len(qx), dtype=bool)
    ylo, yhi = np.minimum(ay, by), np.maximum(ay, by)
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    for qi, ei in _strip_blocks(qy, ylo, yhi, pad=tol):
        px = qx[qi][:, None] - ax[ei]
        py = qy[qi][:, None] - ay[ei]
        t = np.clip((px * dx[ei] + py * dy[ei]) / np.where(ll[ei] > 0, ll[ei], 1.0), 0.0, 1.0)
        ex, ey = px - t * dx[ei], py - t * dy[ei]
        out[qi] |= ((ex * ex + ey * ey) <= tol * tol).any(axis=1)
    return out


def winding_numbers(points: np.ndarray, rings: Sequence[np.ndarray]) -> np.ndarray:
    """Winding number of every point with respect to oriented rings."""
    pts = np.asarray(points, float).reshape(-1, 2)
    s, e = rings_to_edges(rings)
    if len(s) == 0:
        return np.zeros(len(pts))
    return crossing_sums(pts[:, 0], pts[:, 1], s[:, 0], s[:, 1], e[:, 0], e[:, 1], np.ones(len(s)))


def contains_points(points: np.ndarray, rings: Sequence[np.ndarray], eps: float = SNAP_EPS) -> np.ndarray:
    """Membership of points in the positive-winding region, boundary inclusive."""
    pts = np.asarray(points, float).reshape(-1, 2)
    s, e = rings_to_edges(rings)
    if len(s) == 0:
        return np.zeros(len(pts), dtype=bool)
    w = crossing_sums(pts[:, 0], pts[:, 1], s[:, 0], s[:, 1], e[:, 0], e[:, 1], np.ones(len(s)))
    inside = w > 0.5
    rest = ~inside
    if rest.any():
        idx = np.nonzero(rest)[0]
        inside[idx] = near_boundary(pts[idx, 0], pts[idx, 1], s[:, 0], s[:, 1], e[:, 0], e[:, 1], eps)
    return inside


# ---------------------------------------------------------------------------
# arrangement construction


def _candidate_pairs(s: np.ndarray, e: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i < j in sorted order) whose padded bounding boxes overlap."""
    xmin = np.minimum(s[:, 0], e[:, 0]) - tol
    xmax = np.maximum(s[:, 0], e[:, 0]) + tol
    ymin = np.minimum(s[:, 1], e[:, 1]) - tol
    ymax = np.maximum(s[:, 1], e[:, 1]) + tol
    order = np.argsort(xmin, kind="stable")
    xs = xmin[order]
    hi = np.searchsorted(xs, xmax[order], side="right")
    counts = np.maximum(hi - np.arange(len(xs)) - 1, 0)
    first = np.repeat(np.arange(len(xs)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    second = first + 1 + offs
    i, j = order[first], order[second]
    keep = (ymin[i] <= ymax[j]) & (ymin[j] <= ymax[i])
    return i[keep], j[keep]


def _split_points(s: np.ndarray, e: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """(edge index, point) pairs at which edges must be split."""
    i, j = _candidate_pairs(s, e, tol)
    if len(i) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, 2))
    p0, p1, q0, q1 = s[i], e[i], s[j], e[j]
    d1, d2 = p1 - p0, q1 - q0
    l1 = np.hypot(d1[:, 0], d1[:, 1])
    l2 = np.hypot(d2[:, 0], d2[:, 1])
    idx_out, pts_out = [], []

    def on_segment(pt, a, d, length):
        rel = pt - a
        ll = length * length
        t = (rel[:, 0] * d[:, 0] + rel[:, 1] * d[:, 1]) / ll
        dist = np.abs(_cross(d[:, 0], d[:, 1], rel[:, 0], rel[:, 1])) / length
        return (t > 0) & (t < 1) & (dist <= tol)

    # endpoints lying on the other segment: T-junctions and collinear overlaps
    for pt, owner, a, d, length in (
        (q0, i, p0, d1, l1),
        (q1, i, p0, d1, l1),
        (p0, j, q0, d2, l2),
        (p1, j, q0, d2, l2),
    ):
        hit = on_segment(pt, a, d, length)
        idx_out.append(owner[hit])
        pts_out.append(pt[hit])

    # proper crossings
    denom = _cross(d1[:, 0], d1[:, 1], d2[:, 0], d2[:, 1])
    r = q0 - p0
    nonpar = np.abs(denom) > 1e-12 * l1 * l2
    safe = np.where(nonpar, denom, 1.0)
    t = _cross(r[:, 0], r[:, 1], d2[:, 0], d2[:, 1]) / safe
    u = _cross(r[:, 0], r[:, 1], d1[:, 0], d1[:, 1]) / safe
    proper = nonpar & (t > 0) & (t < 1) & (u > 0) & (u < 1)
    if proper.any():
        k = np.nonzero(proper)[0]
        x = p0[k] + t[k, None] * d1[k]
        # crossings within tolerance of an endpoint collapse onto that endpoint
        for cand in (p0[k], p1[k], q0[k], q1[k]):
            close = np.hypot(*(x - cand).T) <= tol
            x[close] = cand[close]
        idx_out += [i[k], j[k]]
        pts_out += [x, x]
    return np.concatenate(idx_out), np.concatenate(pts_out)


def build_arrangement(edge_sets: Sequence[tuple[np.ndarray, np.ndarray]], eps: float = SNAP_EPS):
    """Snap and split edges from several operands.

    Returns (k0, k1, weights): unique undirected segments as integer grid keys
    (k0 lexicographically before k1) and a (u, n_sets) array of signed
    multiplicities, +1 for each source edge running k0 -> k1.
    """
    starts, ends, labels = [], [], []
    for lab, (s, e) in enumerate(edge_sets):
        starts.append(s)
        ends.append(e)
        labels.append(np.full(len(s), lab))
    n_sets = len(edge_sets)
    s = np.concatenate(starts) if starts else np.zeros((0, 2))
    e = np.concatenate(ends) if ends else np.zeros((0, 2))
    lab = np.concatenate(labels) if labels else np.zeros(0, dtype=int)
    ks, ke = snap_keys(s, eps), snap_keys(e, eps)
    live = np.any(ks != ke, axis=1)
    ks, ke, lab = ks[live], ke[live], lab[live]
    if len(ks) == 0:
        empty = np.zeros((0, 2), dtype=np.int64)
        return empty, empty, np.zeros((0, n_sets))
    s, e = ks * eps, ke * eps

    idx, pts = _split_points(s, e, eps)
    m = len(s)
    all_idx = np.concatenate([np.arange(m), np.arange(m), idx])
    all_pts = np.concatenate([s, e, pts])
    d = e[all_idx] - s[all_idx]
    t = ((all_pts - s[all_idx]) * d).sum(axis=1) / (d * d).sum(axis=1)
    order = np.lexsort((t, all_idx))
    all_idx = all_idx[order]
    keys = snap_keys(all_pts[order], eps)
    # the original endpoints keep their exact keys
    same_edge = all_idx[:-1] == all_idx[1:]
    differs = np.any(keys[:-1] != keys[1:], axis=1)
    sub = np.nonzero(same_edge & differs)[0]
    a, b = keys[sub], keys[sub + 1]
    sub_lab = lab[all_idx[sub]]

    flip = (a[:, 0] > b[:, 0]) | ((a[:, 0] == b[:, 0]) & (a[:, 1] > b[:, 1]))
    k0 = np.where(flip[:, None], b, a)
    k1 = np.where(flip[:, None], a, b)
    sign = np.where(flip, -1.0, 1.0)
    uniq, inverse = np.unique(np.hstack([k0, k1]), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    weights = np.zeros((len(uniq), n_sets))
    np.add.at(weights, (inverse, sub_lab), sign)
    return uniq[:, :2], uniq[:, 2:], weights


def left_winding(k0: np.ndarray, k1: np.ndarray, weights: np.ndarray, eps: float = SNAP_EPS) -> np.ndarray:
    """Winding numbers (per operand) immediately left of each segment k0 -> k1."""
    p0, p1 = k0 * eps, k1 * eps
    mid = 0.5 * (p0 + p1)
    out = np.zeros_like(weights)
    horiz = k0[:, 1] == k1[:, 1]
    tol = 0.5 * eps

    vert = ~horiz
    if vert.any():
        w = crossing_sums(mid[vert, 0], mid[vert, 1], p0[:, 0], p0[:, 1], p1[:, 0], p1[:, 1], weights, tol)
        # the +x ray starts on the left side when the segment points downward
        down = (p1[vert, 1] < p0[vert, 1])[:, None]
        out[vert] = np.where(down, w, w + weights[vert])
    if horiz.any():
        # rotate by -90 degrees so the +x ray points towards original +y,
        # which is the left side of a canonical (left-to-right) horizontal segment
        rx0, ry0 = p0[:, 1], -p0[:, 0]
        rx1, ry1 = p1[:, 1], -p1[:, 0]
        out[horiz] = crossing_sums(mid[horiz, 1], -mid[horiz, 0], rx0, ry0, rx1, ry1, weights, tol)
    return out


# ---------------------------------------------------------------------------
# ring linking and polygon assembly


def link_rings(starts: np.ndarray, ends: np.ndarray) -> list[list[tuple[int, int]]]:
    """Chain directed key-edges into closed rings, turning leftmost at junctions."""
    out_edges: dict[tuple[int, int], list[int]] = {}
    s_list = [tuple(map(int, k)) for k in starts]
    e_list = [tuple(map(int, k)) for k in ends]
    for idx, k in enumerate(s_list):
        out_edges.setdefault(k, []).append(idx)
    used = [False] * len(s_list)
    rings = []
    for first in range(len(s_list)):
        if used[first]:
            continue
        ring = [s_list[first]]
        cur = first
        closed = False
        while True:
            used[cur] = True
            v = e_list[cur]
            if v == s_list[first]:
                closed = True
                break
            cands = [f for f in out_edges.get(v, ()) if not used[f]]
            if not cands:
                break
            if len(cands) > 1:
                dx = v[0] - s_list[cur][0]
                dy = v[1] - s_list[cur][1]

                def turn(f):
                    fx = e_list[f][0] - v[0]
                    fy = e_list[f][1] - v[1]
                    return math.atan2(float(dx) * fy - float(dy) * fx, float(dx) * fx + float(dy) * fy)

                cands.sort(key=turn, reverse=True)
            ring.append(v)
            cur = cands[0]
        if closed and len(ring) >= 3:
            rings.append(ring)
    return rings


def _drop_collinear(ring: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Remove vertices exactly collinear with their neighbours (exact integer test)."""
    pts = list(ring)
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        keep = []
        n = len(pts)
        for k in range(n):
            a, b, c = pts[k - 1], pts[k], pts[(k + 1) % n]
            cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            if cr == 0:
                changed = True
                continue
            keep.append(b)
        if changed:
            pts = keep
    return pts


def _ring_contains(ring: np.ndarray, pt) -> bool:
    x, y = pt
    xs, ys = ring[:, 0], ring[:, 1]
    xn, yn = np.roll(xs, -1), np.roll(ys, -1)
    spans = (ys <= y) != (yn <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = xs + (y - ys) * (xn - xs) / (yn - ys)
    return bool(np.count_nonzero(spans & (xc > x)) % 2)


def assemble_polygons(
    key_rings: list[list[tuple[int, int]]], eps: float = SNAP_EPS, offset: tuple[float, float] = (0.0, 0.0)
) -> list[Polygon]:
    """Turn linked key rings into polygons; world coordinates are ``key * eps + offset``."""
    outers, holes = [], []
    for kr in key_rings:
        kr = _drop_collinear(kr)
        if len(kr) < 3:
            continue
        arr = np.array(kr, dtype=np.int64) * eps + np.asarray(offset, float)
        x, y = arr[:, 0], arr[:, 1]
        area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
        if area > 0:
            outers.append((area, arr))
        elif area < 0:
            holes.append(arr)
    outers.sort(key=lambda t: t[0])
    polys: list[Polygon] = [[arr] for _, arr in outers]
    for h in holes:
        seg = np.roll(h, -1, axis=0) - h
        k = int(np.argmax(np.hypot(seg[:, 0], seg[:, 1])))
        probe = h[k] + 0.5 * seg[k]
        for (area, arr), poly in zip(outers, polys):
            if _ring_contains(arr, probe):
                poly.append(h)
                break
    # deterministic order: by lowest-left outer vertex
    polys.sort(key=lambda p: (float(p[0][:, 0].min()), float(p[0][:, 1].min()), -len(p[0])))
    return polys


def overlay(
    rings_a: Sequence[np.ndarray],
    rings_b: Sequence[np.ndarray] = (),
    op: str = "union",
    eps: float = SNAP_EPS,
) -> list[Polygon]:
    """Boolean combination of two oriented ring sets.

    ``op`` is one of "union", "intersection", "difference" (a minus b) or
    "dissolve" (a alone, merging overlaps and fixing self-overlap).
    """
    pred = PREDICATES[op]
    k0, k1, w = build_arrangement([rings_to_edges(rings_a), rings_to_edges(rings_b)], eps)
    if len(k0) == 0:
        return []
    wl = left_winding(k0, k1, w, eps)
    wr = wl - w
    left_in = pred(wl[:, 0] > 0.5, wl[:, 1] > 0.5)
    right_in = pred(wr[:, 0] > 0.5, wr[:, 1] > 0.5)
    keep = left_in != right_in
    fwd = keep & left_in
    rev = keep & ~left_in
    starts = np.concatenate([k0[fwd], k1[rev]])
    ends = np.concatenate([k1[fwd], k0[rev]])
    return assemble_polygons(link_rings(starts, ends), eps)


def polygons_area(polys: Sequence[Polygon]) -> float:
    total = 0.0
    for poly in polys:
        for ring in poly:
            x, y = ring[:, 0], ring[:, 1]
            total += 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    return total
