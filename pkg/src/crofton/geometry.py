"""Set expressions in R^2 / R^3 and their exact 1-D traces along lines.

A set is a CSG tree over analytic primitives (open half-space, open ball,
half-open box) and voxel-raster leaves.  Every downstream computation is
reduced to traces: the set of line parameters t with  z + t*tau  in the set,
represented as a canonical :class:`~crofton.intervals.IntervalSet`.  Traces
are exact up to 1-D null sets, which is all the downstream measures can see.

Conventions (all measure-theoretically irrelevant, but fixed so membership
is deterministic):

* primitives are realized by their open versions for traces;
* `contains` uses the half-open cell rule ``[lo, hi)`` for boxes and raster
  cells, so every point belongs to exactly one cell of a grid;
* tangent lines (ball discriminant zero within tolerance) and lines inside
  a half-space's boundary hyperplane produce the empty trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union as TUnion

import numpy as np

from .errors import InvalidInputError
from .intervals import (
    INF,
    IntervalSet,
    Pair,
    canonicalize_pairs,
    complement_pairs,
    intersect_pairs,
    subtract_pairs,
    union_pairs,
)

UNIT_TOL = 1e-12
#: relative tolerance on the ball-chord discriminant below which a line is
#: treated as tangent (empty trace: a single touch point is H^1-null)
TANGENT_TOL = 1e-12


def _as_point(x, dim: int | None = None) -> np.ndarray:
    p = np.asarray(x, dtype=float)
    if p.ndim != 1:
        raise InvalidInputError(f"expected a point, got array of shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise InvalidInputError(f"expected a point in R^{dim}, got R^{p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("point has non-finite coordinates")
    p.flags.writeable = False
    return p


def _check_unit(v: np.ndarray, what: str) -> np.ndarray:
    if abs(float(np.dot(v, v)) - 1.0) > 2 * UNIT_TOL:
        raise InvalidInputError(f"{what} must be a unit vector (|v| = 1 within {UNIT_TOL})")
    return v


# ---------------------------------------------------------------------------
# node types


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Open half-space {x : normal . x < offset}; ``normal`` must be unit."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _check_unit(_as_point(self.normal), "half-space normal"))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]


@dataclass(frozen=True, eq=False)
class Ball:
    """Open ball of positive radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise InvalidInputError("ball radius must be > 0")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box, half-open [lo, hi) for membership, lo < hi strictly."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = _as_point(self.lo)
        hi = _as_point(self.hi, lo.shape[0])
        if not np.all(lo < hi):
            raise InvalidInputError("box requires lo < hi in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]


@dataclass(frozen=True, eq=False)
class RasterGrid:
    """Cubic-cell occupancy grid.

    Cell (i_1, ..., i_n) occupies the half-open box
    ``prod_k [origin_k + i_k*spacing, origin_k + (i_k+1)*spacing)``,
    so the cells partition the raster's bounding box exactly.  ``occupancy``
    is boolean with shape ``dims``; the flat serialization order is
    first-coordinate-fastest (Fortran order).
    """

    origin: np.ndarray
    spacing: float
    dims: tuple[int, ...]
    occupancy: np.ndarray

    def __post_init__(self):
        origin = _as_point(self.origin)
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != origin.shape[0] or any(d <= 0 for d in dims):
            raise InvalidInputError("raster dims must be positive and match origin dimension")
        spacing = float(self.spacing)
        if not spacing > 0:
            raise InvalidInputError("raster spacing must be > 0")
        occ = np.asarray(self.occupancy)
        if occ.ndim == 1:
            if occ.size != int(np.prod(dims)):
                raise InvalidInputError("occupancy length must equal prod(dims)")
            occ = occ.reshape(dims, order="F")
        elif occ.shape != dims:
            raise InvalidInputError(f"occupancy shape {occ.shape} != dims {dims}")
        occ = occ.astype(bool)
        occ.flags.writeable = False
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "occupancy", occ)

    @property
    def dim(self) -> int:
        return len(self.dims)

    @property
    def upper(self) -> np.ndarray:
        return self.origin + self.spacing * np.asarray(self.dims, dtype=float)

    def flat_occupancy(self) -> np.ndarray:
        """Occupancy flattened first-coordinate-fastest, as uint8."""
        return self.occupancy.astype(np.uint8).reshape(-1, order="F")

    def cell_centers(self) -> np.ndarray:
        """(prod(dims), n) array of cell centers, first coordinate fastest."""
        axes = [self.origin[k] + self.spacing * (np.arange(self.dims[k]) + 0.5)
                for k in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1, order="F") for m in mesh], axis=1)

    def occupied_cells(self) -> np.ndarray:
        """(m, n) integer indices of occupied cells."""
        return np.argwhere(self.occupancy)


@dataclass(frozen=True, eq=False)
class Raster:
    grid: RasterGrid

    @property
    def dim(self) -> int:
        return self.grid.dim


@dataclass(frozen=True, eq=False)
class Union:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise InvalidInputError("union requires at least one child")

    @property
    def dim(self) -> int:
        return self.children[0].dim


@dataclass(frozen=True, eq=False)
class Intersection:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise InvalidInputError("intersection requires at least one child")

    @property
    def dim(self) -> int:
        return self.children[0].dim


@dataclass(frozen=True, eq=False)
class Complement:
    child: "SetExpr"

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True, eq=False)
class Difference:
    left: "SetExpr"
    right: "SetExpr"

    @property
    def dim(self) -> int:
        return self.left.dim


SetExpr = TUnion[HalfSpace, Ball, Box, Raster, Union, Intersection, Complement, Difference]

_LEAF_TYPES = (HalfSpace, Ball, Box, Raster)


def leaves(expr: SetExpr):
    """Yield the primitive leaves of a CSG tree."""
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, _LEAF_TYPES):
            yield e
        elif isinstance(e, (Union, Intersection)):
            stack.extend(e.children)
        elif isinstance(e, Complement):
            stack.append(e.child)
        elif isinstance(e, Difference):
            stack.append(e.left)
            stack.append(e.right)
        else:
            raise InvalidInputError(f"unknown set expression node {type(e).__name__}")


# ---------------------------------------------------------------------------
# ambient domain and lines


@dataclass(frozen=True, eq=False)
class Domain:
    """The ambient open set: all of R^n, or an open box."""

    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    @classmethod
    def all_space(cls) -> "Domain":
        return cls(None, None)

    @classmethod
    def open_box(cls, lo, hi) -> "Domain":
        lo = _as_point(lo)
        hi = _as_point(hi, lo.shape[0])
        if not np.all(lo < hi):
            raise InvalidInputError("domain box requires lo < hi componentwise")
        return cls(lo, hi)

    @property
    def is_all_space(self) -> bool:
        return self.lo is None

    def contains(self, x) -> bool:
        if self.is_all_space:
            return True
        p = np.asarray(x, dtype=float)
        return bool(np.all(self.lo < p) and np.all(p < self.hi))

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        if self.is_all_space:
            return np.ones(pts.shape[0], dtype=bool)
        return np.all((pts > self.lo) & (pts < self.hi), axis=1)

    def trace_pairs(self, tau: np.ndarray, base: np.ndarray) -> tuple[Pair, ...]:
        if self.is_all_space:
            return ((-INF, INF),)
        return _slab_pairs(self.lo, self.hi, tau, base, half_open=False)


@dataclass(frozen=True, eq=False)
class Line:
    """Oriented line  {base + t*tau : t in R}  with unit ``tau`` and ``base``
    in the transversal hyperplane (base . tau = 0)."""

    tau: np.ndarray
    base: np.ndarray

    def __post_init__(self):
        tau = _check_unit(_as_point(self.tau), "line direction")
        base = _as_point(self.base, tau.shape[0])
        drift = abs(float(np.dot(base, tau)))
        if drift > 1e-9 * max(1.0, float(np.linalg.norm(base))):
            raise InvalidInputError("line base must lie in the transversal hyperplane")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "base", base)

    @classmethod
    def through(cls, point, tau) -> "Line":
        """Line with direction tau through an arbitrary point (base is the
        orthogonal projection of the point onto the transversal hyperplane)."""
        tau = _check_unit(_as_point(tau), "line direction")
        p = _as_point(point, tau.shape[0])
        return cls(tau, p - float(np.dot(p, tau)) * tau)

    @property
    def dim(self) -> int:
        return self.tau.shape[0]

    def point_at(self, t: float) -> np.ndarray:
        return self.base + t * self.tau


# ---------------------------------------------------------------------------
# membership


def contains(expr: SetExpr, x) -> bool:
    """Pointwise membership, boolean algebra respected exactly."""
    p = np.asarray(x, dtype=float)
    return bool(_contains_many(expr, p[None, :])[0])


def contains_many(expr: SetExpr, pts) -> np.ndarray:
    """Vectorized membership for an (m, n) array of points."""
    pts = np.asarray(pts, dtype=float)
    return _contains_many(expr, pts)


def _contains_many(expr: SetExpr, pts: np.ndarray) -> np.ndarray:
    if isinstance(expr, HalfSpace):
        return pts @ expr.normal < expr.offset
    if isinstance(expr, Ball):
        d = pts - expr.center
        return np.einsum("ij,ij->i", d, d) < expr.radius * expr.radius
    if isinstance(expr, Box):
        return np.all((pts >= expr.lo) & (pts < expr.hi), axis=1)
    if isinstance(expr, Raster):
        g = expr.grid
        idx = np.floor((pts - g.origin) / g.spacing).astype(np.int64)
        ok = np.all((idx >= 0) & (idx < np.asarray(g.dims)), axis=1)
        out = np.zeros(pts.shape[0], dtype=bool)
        if np.any(ok):
            sel = idx[ok]
            out[ok] = g.occupancy[tuple(sel.T)]
        return out
    if isinstance(expr, Union):
        out = _contains_many(expr.children[0], pts)
        for c in expr.children[1:]:
            out |= _contains_many(c, pts)
        return out
    if isinstance(expr, Intersection):
        out = _contains_many(expr.children[0], pts)
        for c in expr.children[1:]:
            out &= _contains_many(c, pts)
        return out
    if isinstance(expr, Complement):
        return ~_contains_many(expr.child, pts)
    if isinstance(expr, Difference):
        return _contains_many(expr.left, pts) & ~_contains_many(expr.right, pts)
    raise InvalidInputError(f"unknown set expression node {type(expr).__name__}")


# ---------------------------------------------------------------------------
# traces


def _slab_pairs(lo: np.ndarray, hi: np.ndarray, tau: np.ndarray, base: np.ndarray,
                half_open: bool) -> tuple[Pair, ...]:
    """Open t-interval of a line inside an axis-aligned box (slab method)."""
    t0, t1 = -INF, INF
    for i in range(lo.shape[0]):
        d = float(tau[i])
        b = float(base[i])
        if d == 0.0:
            if half_open:
                inside = lo[i] <= b < hi[i]
            else:
                inside = lo[i] < b < hi[i]
            if not inside:
                return ()
        else:
            ta = (lo[i] - b) / d
            tb = (hi[i] - b) / d
            if ta > tb:
                ta, tb = tb, ta
            if ta > t0:
                t0 = ta
            if tb < t1:
                t1 = tb
    if t0 < t1:
        return ((t0, t1),)
    return ()


def ball_chord(center: np.ndarray, radius: float, tau: np.ndarray,
               base: np.ndarray) -> tuple[Pair, ...]:
    """Open chord interval of a line through an open ball (quadratic solve)."""
    w = base - center
    b = float(np.dot(tau, w))
    q = float(np.dot(w, w)) - radius * radius
    disc = b * b - q
    if disc <= TANGENT_TOL * radius * radius:
        return ()
    s = math.sqrt(disc)
    return ((-b - s, -b + s),)


def halfspace_ray(normal: np.ndarray, offset: float, tau: np.ndarray,
                  base: np.ndarray) -> tuple[Pair, ...]:
    s = float(np.dot(normal, tau))
    c = offset - float(np.dot(normal, base))
    if s == 0.0:
        # parallel line: full line strictly inside, else empty (a line in the
        # boundary hyperplane has empty trace in the open half-space)
        return ((-INF, INF),) if c > 0.0 else ()
    t = c / s
    if s > 0.0:
        return ((-INF, t),)
    return ((t, INF),)


def _trace_pairs(expr: SetExpr, tau: np.ndarray, base: np.ndarray) -> tuple[Pair, ...]:
    if isinstance(expr, HalfSpace):
        return halfspace_ray(expr.normal, expr.offset, tau, base)
    if isinstance(expr, Ball):
        return ball_chord(expr.center, expr.radius, tau, base)
    if isinstance(expr, Box):
        return _slab_pairs(expr.lo, expr.hi, tau, base, half_open=False)
    if isinstance(expr, Raster):
        return _raster_trace_pairs(expr.grid, tau, base)
    if isinstance(expr, Union):
        acc = _trace_pairs(expr.children[0], tau, base)
        for c in expr.children[1:]:
            acc = union_pairs(acc, _trace_pairs(c, tau, base))
        return acc
    if isinstance(expr, Intersection):
        acc = _trace_pairs(expr.children[0], tau, base)
        for c in expr.children[1:]:
            if not acc:
                return ()
            acc = intersect_pairs(acc, _trace_pairs(c, tau, base))
        return acc
    if isinstance(expr, Complement):
        return complement_pairs(_trace_pairs(expr.child, tau, base))
    if isinstance(expr, Difference):
        return subtract_pairs(_trace_pairs(expr.left, tau, base),
                              _trace_pairs(expr.right, tau, base))
    raise InvalidInputError(f"unknown set expression node {type(expr).__name__}")


def trace(expr: SetExpr, line: Line) -> IntervalSet:
    """Exact canonical trace {t : base + t*tau in expr}, up to 1-D null sets.

    Boolean nodes are evaluated homomorphically: the trace of a union is the
    interval-set union of the children's traces, and likewise for
    intersection, complement and difference.
    """
    return IntervalSet(_trace_pairs(expr, line.tau, line.base))


def trace_pairs(expr: SetExpr, tau: np.ndarray, base: np.ndarray) -> tuple[Pair, ...]:
    """Allocation-light variant of :func:`trace` for hot loops."""
    return _trace_pairs(expr, np.asarray(tau, dtype=float), np.asarray(base, dtype=float))


def _raster_trace_pairs(grid: RasterGrid, tau: np.ndarray, base: np.ndarray) -> tuple[Pair, ...]:
    """Maximal runs of occupied cells along the line, as open t-intervals.

    Axis-parallel lines reduce to a single row/column scan.  General lines
    are traversed via the sorted parametric cell-crossing times; crossing
    times closer than 1e-12 * spacing are merged (corner grazing).
    """
    o, s, dims = grid.origin, grid.spacing, grid.dims
    n = len(dims)

    axis = int(np.argmax(np.abs(tau)))
    if abs(abs(float(tau[axis])) - 1.0) <= UNIT_TOL:
        return _raster_axis_trace(grid, axis, float(tau[axis]), base)

    hi = grid.upper
    t0, t1 = -INF, INF
    for i in range(n):
        d = float(tau[i])
        b = float(base[i])
        if d == 0.0:
            if not (o[i] <= b < hi[i]):  # half-open, matches the cell rule
                return ()
        else:
            ta = (o[i] - b) / d
            tb = (hi[i] - b) / d
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
    if not t0 < t1:
        return ()

    crossings = [np.array([t0, t1])]
    for i in range(n):
        d = float(tau[i])
        if d == 0.0:
            continue
        # plane coordinates o[i] + k*s crossed strictly inside (t0, t1)
        xa = base[i] + t0 * d
        xb = base[i] + t1 * d
        klo = int(math.ceil((min(xa, xb) - o[i]) / s))
        khi = int(math.floor((max(xa, xb) - o[i]) / s))
        if khi < klo:
            continue
        ks = np.arange(klo, khi + 1, dtype=float)
        crossings.append((o[i] + ks * s - base[i]) / d)
    times = np.concatenate(crossings)
    times = times[(times >= t0) & (times <= t1)]
    times = np.unique(times)
    if times.size >= 2:
        keep = np.empty(times.size, dtype=bool)
        keep[0] = True
        keep[1:] = np.diff(times) > 1e-12 * s
        times = times[keep]
    if times.size < 2:
        return ()

    mids = 0.5 * (times[:-1] + times[1:])
    pts = base[None, :] + mids[:, None] * tau[None, :]
    idx = np.floor((pts - o) / s).astype(np.int64)
    np.clip(idx, 0, np.asarray(dims) - 1, out=idx)
    occ = grid.occupancy[tuple(idx.T)]

    out = []
    start = None
    for k in range(occ.size):
        if occ[k] and start is None:
            start = times[k]
        elif not occ[k] and start is not None:
            out.append((start, times[k]))
            start = None
    if start is not None:
        out.append((start, times[-1]))
    return tuple(out)


def _raster_axis_trace(grid: RasterGrid, axis: int, sign: float,
                       base: np.ndarray) -> tuple[Pair, ...]:
    o, s, dims = grid.origin, grid.spacing, grid.dims
    sel: list = []
    for i in range(grid.dim):
        if i == axis:
            sel.append(slice(None))
        else:
            k = math.floor((float(base[i]) - o[i]) / s)
            if not 0 <= k < dims[i]:
                return ()
            sel.append(int(k))
    row = grid.occupancy[tuple(sel)]
    padded = np.zeros(row.size + 2, dtype=np.int8)
    padded[1:-1] = row
    flips = np.flatnonzero(np.diff(padded))  # run starts/ends as cell indices
    out = []
    for j in range(0, flips.size, 2):
        k0, k1 = int(flips[j]), int(flips[j + 1])
        xa = o[axis] + k0 * s
        xb = o[axis] + k1 * s
        ta = (xa - float(base[axis])) / sign
        tb = (xb - float(base[axis])) / sign
        out.append((ta, tb) if ta < tb else (tb, ta))
    out.sort()
    return tuple(out)


# ---------------------------------------------------------------------------
# convex structure helpers


def convex_constraints(expr: SetExpr) -> Optional[list[tuple[np.ndarray, float]]]:
    """Flatten an intersection of half-spaces/boxes into linear constraints
    ``normal . x < offset``; complemented half-spaces fold to their flip
    (open vs closed is a null-set distinction).  None when the tree contains
    any other node."""
    out: list[tuple[np.ndarray, float]] = []
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, HalfSpace):
            out.append((e.normal, e.offset))
        elif isinstance(e, Complement) and isinstance(e.child, HalfSpace):
            out.append((-e.child.normal, -float(e.child.offset)))
        elif isinstance(e, Box):
            n = e.dim
            for i in range(n):
                axis = np.zeros(n)
                axis[i] = 1.0
                out.append((axis, float(e.hi[i])))
                out.append((-axis, -float(e.lo[i])))
        elif isinstance(e, Intersection):
            stack.extend(e.children)
        else:
            return None
    return out


def clip_convex_polygon(poly: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon by  normal . x <= offset."""
    if poly.shape[0] == 0:
        return poly
    s = poly @ normal - offset
    out = []
    m = poly.shape[0]
    for i in range(m):
        j = (i + 1) % m
        pi, pj = poly[i], poly[j]
        si, sj = s[i], s[j]
        if si <= 0.0:
            out.append(pi)
        if (si < 0.0 < sj) or (sj < 0.0 < si):
            t = si / (si - sj)
            out.append(pi + t * (pj - pi))
    return np.asarray(out, dtype=float).reshape(-1, 2)


_HUGE = 1e12


def _halfplane_intersection_bbox(expr: SetExpr) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Bounding box of a bounded 2-D intersection of half-planes, None when
    the polytope is unbounded (or not a pure half-plane intersection)."""
    cons = convex_constraints(expr)
    if cons is None or expr.dim != 2:
        return None
    poly = np.array([[-_HUGE, -_HUGE], [_HUGE, -_HUGE], [_HUGE, _HUGE], [-_HUGE, _HUGE]])
    for normal, offset in cons:
        poly = clip_convex_polygon(poly, normal, offset)
        if poly.shape[0] < 3:
            return np.zeros(2), np.zeros(2)  # empty: degenerate box
    if float(np.max(np.abs(poly))) >= 0.1 * _HUGE:
        return None  # clipped polygon still touches the huge frame: unbounded
    return poly.min(axis=0), poly.max(axis=0)


# ---------------------------------------------------------------------------
# bounding boxes


def bounding_box(expr: SetExpr) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """(lo, hi) box containing the set, or None when unbounded.

    Complements and half-spaces propagate None.  The box is not tight for
    intersections; it only bounds the set (which is all the sampling-window
    logic needs).
    """
    if isinstance(expr, HalfSpace):
        return None
    if isinstance(expr, Ball):
        return expr.center - expr.radius, expr.center + expr.radius
    if isinstance(expr, Box):
        return expr.lo.copy(), expr.hi.copy()
    if isinstance(expr, Raster):
        return expr.grid.origin.copy(), expr.grid.upper
    if isinstance(expr, Union):
        boxes = [bounding_box(c) for c in expr.children]
        if any(b is None for b in boxes):
            return None
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return lo, hi
    if isinstance(expr, Intersection):
        boxes = [b for b in (bounding_box(c) for c in expr.children) if b is not None]
        if not boxes:
            # a pure half-plane intersection can still be bounded
            return _halfplane_intersection_bbox(expr) if expr.dim == 2 else None
        lo = np.max([b[0] for b in boxes], axis=0)
        hi = np.min([b[1] for b in boxes], axis=0)
        hi = np.maximum(hi, lo)  # empty intersection collapses to a degenerate box
        return lo, hi
    if isinstance(expr, Complement):
        return None
    if isinstance(expr, Difference):
        return bounding_box(expr.left)
    raise InvalidInputError(f"unknown set expression node {type(expr).__name__}")


def effective_bbox(expr: SetExpr, omega: Domain) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Bounding box of expr intersected with the domain, None when unbounded."""
    bb = bounding_box(expr)
    if omega.is_all_space:
        return bb
    if bb is None:
        return omega.lo.copy(), omega.hi.copy()
    lo = np.maximum(bb[0], omega.lo)
    hi = np.minimum(bb[1], omega.hi)
    return lo, np.maximum(hi, lo)


# ---------------------------------------------------------------------------
# raster boundary faces (shared by boundary extraction and fast hit counting)


def raster_faces(grid: RasterGrid) -> list[dict]:
    """Exposed cell interfaces (occupied vs unoccupied, outside counts as
    unoccupied), one record per axis.

    Each record holds the face plane coordinate and the lower corner of the
    face in the transversal axes:
    ``{"axis": i, "coord": (m,), "lower": (m, n-1), "sign": (m,)}``
    where ``sign`` is +1 when occupancy turns on with increasing x_i.
    A face normal to e_i spans ``[lower, lower + spacing)`` in the remaining
    axes, listed in increasing axis order.
    """
    o, s, dims = grid.origin, grid.spacing, grid.dims
    n = grid.dim
    occ = grid.occupancy.astype(np.int8)
    out = []
    for i in range(n):
        pad_shape = list(dims)
        pad_shape[i] += 2
        padded = np.zeros(pad_shape, dtype=np.int8)
        sl = [slice(None)] * n
        sl[i] = slice(1, -1)
        padded[tuple(sl)] = occ
        d = np.diff(padded, axis=i)
        idx = np.argwhere(d != 0)  # idx[:, i] == k means face plane at o_i + k*s
        sign = d[tuple(idx.T)]
        coord = o[i] + idx[:, i].astype(float) * s
        others = [k for k in range(n) if k != i]
        lower = np.stack([o[k] + idx[:, k].astype(float) * s for k in others], axis=1) \
            if others else np.zeros((idx.shape[0], 0))
        out.append({"axis": i, "coord": coord, "lower": lower, "sign": sign.astype(np.int8)})
    return out
