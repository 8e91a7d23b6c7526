"""Closed-form areas/volumes of primitive sets clipped to a ball.

These are the exact paths behind the density estimator.  Everything here is
classical geometry: circular-segment and lens formulas, spherical caps, and
a Green's-theorem kernel for the area of a simple polygon intersected with a
disk (each polygon edge contributes a circularly-clipped triangle against
the disk center).  The dispatcher `exact_fraction` walks a CSG tree and
returns None when no exact decomposition applies; callers then fall back to
quadrature.
"""

from __future__ import annotations

import math

import numpy as np

from . import geometry as geo
from .geometry import (
    Ball,
    clip_convex_polygon,
    convex_constraints,
    Box,
    Complement,
    Difference,
    HalfSpace,
    Intersection,
    Raster,
    SetExpr,
    Union,
    bounding_box,
    contains,
)


def unit_ball_volume(n: int) -> float:
    """Volume of the unit n-ball (V(1) = 2, V(2) = pi, V(3) = 4pi/3)."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_area(n: int) -> float:
    """Surface measure of S^{n-1} (A(2) = 2pi, A(3) = 4pi)."""
    return n * unit_ball_volume(n)


# ---------------------------------------------------------------------------
# 2-D pieces


def disk_halfplane_area(center, r: float, normal, offset: float) -> float:
    """Area of U(center, r) on the  normal.x < offset  side."""
    d = offset - float(np.dot(normal, center))  # signed distance, >0: center inside
    h = min(max(d, -r), r)
    cap = r * r * math.acos(h / r) - h * math.sqrt(max(r * r - h * h, 0.0))
    return math.pi * r * r - cap


def disk_disk_area(c1, r1: float, c2, r2: float) -> float:
    """Area of the lens U(c1, r1) ∩ U(c2, r2)."""
    d = float(np.linalg.norm(np.asarray(c1, float) - np.asarray(c2, float)))
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    a1 = math.acos(min(max((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0), 1.0))
    a2 = math.acos(min(max((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0), 1.0))
    tri = 0.5 * math.sqrt(max((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2), 0.0))
    return r1 * r1 * a1 + r2 * r2 * a2 - tri


def _edge_disk_contrib(ax, ay, bx, by, r: float):
    """Vectorized signed area contribution of edges (a -> b), coordinates
    relative to the disk center: sector(a, p1) + cross(p1, p2)/2 + sector(p2, b)
    where p1, p2 are the edge's entry/exit points clipped to [a, b]."""
    dx = bx - ax
    dy = by - ay
    A = dx * dx + dy * dy
    B = 2.0 * (ax * dx + ay * dy)
    C = ax * ax + ay * ay - r * r
    disc = B * B - 4.0 * A * C
    safe_a = np.where(A > 0.0, A, 1.0)
    sq = np.sqrt(np.maximum(disc, 0.0))
    t1 = (-B - sq) / (2.0 * safe_a)
    t2 = (-B + sq) / (2.0 * safe_a)
    no_cross = (disc <= 0.0) | (A == 0.0)
    t1 = np.where(no_cross, 0.0, np.clip(t1, 0.0, 1.0))
    t2 = np.where(no_cross, 0.0, np.clip(t2, 0.0, 1.0))
    p1x = ax + t1 * dx
    p1y = ay + t1 * dy
    p2x = ax + t2 * dx
    p2y = ay + t2 * dy

    def sector(ux, uy, vx, vy):
        return 0.5 * r * r * np.arctan2(ux * vy - uy * vx, ux * vx + uy * vy)

    chord = 0.5 * (p1x * p2y - p1y * p2x)
    return sector(ax, ay, p1x, p1y) + chord + sector(p2x, p2y, bx, by)


def disk_polygon_area(vertices, center, r: float) -> float:
    """Exact area of (simple polygon) ∩ U(center, r); orientation-insensitive."""
    v = np.asarray(vertices, dtype=float)
    if v.shape[0] < 3:
        return 0.0
    rel = v - np.asarray(center, dtype=float)
    ax, ay = rel[:, 0], rel[:, 1]
    bx, by = np.roll(ax, -1), np.roll(ay, -1)
    return abs(float(np.sum(_edge_disk_contrib(ax, ay, bx, by, r))))


def disk_rects_area(lo: np.ndarray, hi: np.ndarray, center, r: float) -> np.ndarray:
    """Exact areas of U(center, r) ∩ [lo_k, hi_k] for a batch of rectangles."""
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    c = np.asarray(center, dtype=float)
    x0, y0 = lo[:, 0] - c[0], lo[:, 1] - c[1]
    x1, y1 = hi[:, 0] - c[0], hi[:, 1] - c[1]
    # CCW rectangle: (x0,y0) (x1,y0) (x1,y1) (x0,y1)
    axs = np.stack([x0, x1, x1, x0])
    ays = np.stack([y0, y0, y1, y1])
    bxs = np.roll(axs, -1, axis=0)
    bys = np.roll(ays, -1, axis=0)
    return np.abs(np.sum(_edge_disk_contrib(axs, ays, bxs, bys, r), axis=0))


# ---------------------------------------------------------------------------
# 3-D pieces


def ball_halfspace_volume(center, r: float, normal, offset: float) -> float:
    d = offset - float(np.dot(normal, center))
    h = min(max(d, -r), r)
    # cap beyond signed height h: pi (r-h)^2 (2r+h) / 3
    cap = math.pi * (r - h) ** 2 * (2 * r + h) / 3.0
    return (4.0 / 3.0) * math.pi * r ** 3 - cap


def ball_ball_volume(c1, r1: float, c2, r2: float) -> float:
    d = float(np.linalg.norm(np.asarray(c1, float) - np.asarray(c2, float)))
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return (4.0 / 3.0) * math.pi * rm ** 3
    return (math.pi * (r1 + r2 - d) ** 2
            * (d * d + 2 * d * (r1 + r2) - 3 * (r1 - r2) ** 2)
            / (12.0 * d))


# ---------------------------------------------------------------------------
# CSG dispatch


def _bbox_clear_of_disk(bb, x: np.ndarray, r: float) -> bool:
    """True when the box is at distance >= r from x (no overlap with the open ball)."""
    if bb is None:
        return False
    lo, hi = bb
    d = np.maximum(np.maximum(lo - x, x - hi), 0.0)
    return float(np.dot(d, d)) >= r * r


def _bbox_overlap_degenerate(ba, bb) -> bool:
    """True when two bounding boxes overlap in a (possibly empty) null set."""
    if ba is None or bb is None:
        return False
    lo = np.maximum(ba[0], bb[0])
    hi = np.minimum(ba[1], bb[1])
    return bool(np.any(hi <= lo))


def _all_box_leaves(expr: SetExpr) -> bool:
    return all(isinstance(leaf, Box) for leaf in geo.leaves(expr))


def _box_arrangement_area(expr: SetExpr, x: np.ndarray, r: float) -> float:
    """Exact disk area for a CSG with only Box leaves: decompose the disk's
    bounding square along all box coordinates; membership is constant on
    each arrangement cell."""
    gx = [x[0] - r, x[0] + r]
    gy = [x[1] - r, x[1] + r]
    for leaf in geo.leaves(expr):
        gx += [float(leaf.lo[0]), float(leaf.hi[0])]
        gy += [float(leaf.lo[1]), float(leaf.hi[1])]
    xs = np.unique(np.clip(np.asarray(gx), x[0] - r, x[0] + r))
    ys = np.unique(np.clip(np.asarray(gy), x[1] - r, x[1] + r))
    if xs.size < 2 or ys.size < 2:
        return 0.0
    cx = 0.5 * (xs[:-1] + xs[1:])
    cy = 0.5 * (ys[:-1] + ys[1:])
    CX, CY = np.meshgrid(cx, cy, indexing="ij")
    centers = np.stack([CX.ravel(), CY.ravel()], axis=1)
    member = geo.contains_many(expr, centers)
    if not np.any(member):
        return 0.0
    LX, LY = np.meshgrid(xs[:-1], ys[:-1], indexing="ij")
    HX, HY = np.meshgrid(xs[1:], ys[1:], indexing="ij")
    lo = np.stack([LX.ravel(), LY.ravel()], axis=1)[member]
    hi = np.stack([HX.ravel(), HY.ravel()], axis=1)[member]
    return float(np.sum(disk_rects_area(lo, hi, x, r)))


def _raster_disk_area(grid: geo.RasterGrid, x: np.ndarray, r: float) -> float:
    o, s, dims = grid.origin, grid.spacing, grid.dims
    klo = np.maximum(np.floor((x - r - o) / s).astype(int), 0)
    khi = np.minimum(np.ceil((x + r - o) / s).astype(int), np.asarray(dims))
    if np.any(khi <= klo):
        return 0.0
    sub = grid.occupancy[klo[0]:khi[0], klo[1]:khi[1]]
    idx = np.argwhere(sub)
    if idx.size == 0:
        return 0.0
    lo = o + (idx + klo) * s
    return float(np.sum(disk_rects_area(lo, lo + s, x, r)))


def _disk_area(expr: SetExpr, x: np.ndarray, r: float) -> float | None:
    bb = bounding_box(expr)
    if _bbox_clear_of_disk(bb, x, r):
        return 0.0
    if isinstance(expr, Ball):
        return disk_disk_area(x, r, expr.center, expr.radius)
    if isinstance(expr, HalfSpace):
        return disk_halfplane_area(x, r, expr.normal, expr.offset)
    if isinstance(expr, Box):
        return float(disk_rects_area(expr.lo, expr.hi, x, r)[0])
    if isinstance(expr, Raster):
        return _raster_disk_area(expr.grid, x, r)
    if isinstance(expr, Complement):
        inner = _disk_area(expr.child, x, r)
        if inner is None:
            return None
        return math.pi * r * r - inner
    if isinstance(expr, (Union, Intersection, Difference)) and _all_box_leaves(expr):
        return _box_arrangement_area(expr, x, r)
    if isinstance(expr, Intersection):
        cons = convex_constraints(expr)
        if cons is not None:
            poly = np.array([[x[0] - r, x[1] - r], [x[0] + r, x[1] - r],
                             [x[0] + r, x[1] + r], [x[0] - r, x[1] + r]])
            for normal, offset in cons:
                poly = clip_convex_polygon(poly, normal, offset)
                if poly.shape[0] < 3:
                    return 0.0
            return disk_polygon_area(poly, x, r)
        if any(_bbox_clear_of_disk(bounding_box(c), x, r) for c in expr.children):
            return 0.0
        return None
    if isinstance(expr, Union):
        live = [c for c in expr.children
                if not _bbox_clear_of_disk(bounding_box(c), x, r)]
        if not live:
            return 0.0
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                if not _bbox_overlap_degenerate(bounding_box(live[i]), bounding_box(live[j])):
                    return None
        total = 0.0
        for c in live:
            a = _disk_area(c, x, r)
            if a is None:
                return None
            total += a
        return total
    if isinstance(expr, Difference):
        rb = bounding_box(expr.right)
        if _bbox_clear_of_disk(rb, x, r) or \
                _bbox_overlap_degenerate(bounding_box(expr.left), rb):
            return _disk_area(expr.left, x, r)
        al = _disk_area(expr.left, x, r)
        if al is None:
            return None
        ai = _disk_area(Intersection((expr.left, expr.right)), x, r)
        if ai is None:
            return None
        return max(al - ai, 0.0)
    return None


def _ball_volume(expr: SetExpr, x: np.ndarray, r: float) -> float | None:
    bb = bounding_box(expr)
    if _bbox_clear_of_disk(bb, x, r):
        return 0.0
    if isinstance(expr, Ball):
        return ball_ball_volume(x, r, expr.center, expr.radius)
    if isinstance(expr, HalfSpace):
        return ball_halfspace_volume(x, r, expr.normal, expr.offset)
    if isinstance(expr, Complement):
        inner = _ball_volume(expr.child, x, r)
        if inner is None:
            return None
        return (4.0 / 3.0) * math.pi * r ** 3 - inner
    if isinstance(expr, Union):
        live = [c for c in expr.children
                if not _bbox_clear_of_disk(bounding_box(c), x, r)]
        if not live:
            return 0.0
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                if not _bbox_overlap_degenerate(bounding_box(live[i]), bounding_box(live[j])):
                    return None
        total = 0.0
        for c in live:
            v = _ball_volume(c, x, r)
            if v is None:
                return None
            total += v
        return total
    if isinstance(expr, Difference):
        rb = bounding_box(expr.right)
        if _bbox_clear_of_disk(rb, x, r) or \
                _bbox_overlap_degenerate(bounding_box(expr.left), rb):
            return _ball_volume(expr.left, x, r)
        return None
    return None


def exact_fraction(expr: SetExpr, x, r: float) -> float | None:
    """Exact m_n(expr ∩ B(x, r)) / m_n(B(x, r)), or None if no exact path.

    Covers (complements/differences/disjoint unions of): half-spaces, balls,
    boxes, rasters and intersections of half-spaces and boxes in 2-D;
    half-spaces and balls in 3-D.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n == 2:
        area = _disk_area(expr, x, r)
        if area is None:
            return None
        return min(max(area / (math.pi * r * r), 0.0), 1.0)
    if n == 3:
        vol = _ball_volume(expr, x, r)
        if vol is None:
            return None
        return min(max(vol / ((4.0 / 3.0) * math.pi * r ** 3), 0.0), 1.0)
    return None
