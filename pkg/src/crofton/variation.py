"""The integral-geometry engine.

Everything here reduces to counting along families of parallel lines:

* a *hit* of a line on a set is a point with positive 1-D measure of both
  the set and its complement in every neighborhood; for a canonical interval
  trace these are exactly the finite interval endpoints interior to the
  domain's trace;
* the directional variation P_tau is the transversal integral of the hit
  count m(z) (midpoint rule over a jittered transversal grid);
* the projection measure mu_tau of an explicit boundary is the transversal
  integral of the crossing multiplicity N(z);
* perimeter and the integral-geometric boundary measure are direction
  averages of the above, normalized by  A(n) / (2 V(n-1)).

Fast paths (batched chords for convex sets, interval stabbing for raster
faces and segment soups) are numerically identical to the per-line
definitional path; tests cross-check them against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import boundary as bnd
from ._parallel import chunked_map
from .errors import InvalidInputError, UnboundedDomainError
from .exactarea import sphere_area, unit_ball_volume
from .geometry import (
    Ball,
    Box,
    Complement,
    Domain,
    HalfSpace,
    Intersection,
    Line,
    Raster,
    RasterGrid,
    SetExpr,
    bounding_box,
    effective_bbox,
    trace_pairs,
)
from .intervals import intersect_pairs

DEFAULT_MAX_HITS = 4096
DEFAULT_SPACING = 1.0 / 1024.0

#: deterministic irrational-fraction jitter of transversal sample points,
#: in units of the grid cell; avoids lattice-aligned grazing lines
DEFAULT_OFFSETS = (0.5 * (math.sqrt(2.0) - 1.0), 0.5 * (math.sqrt(3.0) - 1.0))

#: |face normal . tau| below which a face/segment is parallel to the line
#: family and excluded from crossing counts (it contributes on a null set)
PARALLEL_TOL = 1e-9


def crofton_constant(n: int) -> float:
    """Normalization A(n) / (2 V(n-1)) relating direction-averaged
    directional quantities to their isotropic totals."""
    return sphere_area(n) / (2.0 * unit_ball_volume(n - 1))


# ---------------------------------------------------------------------------
# hit lists


@dataclass(frozen=True)
class HitList:
    line: Line
    hits: tuple[float, ...]
    saturated: bool = False

    @property
    def count(self) -> int:
        return len(self.hits)


def hits_from_pairs(trace_set: Sequence, trace_omega: Sequence,
                    max_hits: int = DEFAULT_MAX_HITS) -> tuple[tuple[float, ...], bool]:
    """Hits from canonical trace pairs: finite endpoints of the clipped trace
    strictly interior to the domain trace.  Canonical form guarantees both
    sides of every such endpoint carry positive measure."""
    clipped = intersect_pairs(trace_set, trace_omega)
    if not clipped:
        return (), False
    starts = [p[0] for p in trace_omega]
    hits = []
    for a, b in clipped:
        for e in (a, b):
            if math.isfinite(e) and _strictly_inside(e, trace_omega, starts):
                hits.append(e)
    if len(hits) > max_hits:
        return tuple(hits[:max_hits]), True
    return tuple(hits), False


def _strictly_inside(t: float, pairs: Sequence, starts: Sequence[float]) -> bool:
    from bisect import bisect_right

    j = bisect_right(starts, t) - 1
    if j < 0:
        return False
    a, b = pairs[j]
    return a < t < b


def hits_on_line(expr: SetExpr, omega: Domain, line: Line,
                 max_hits: int = DEFAULT_MAX_HITS) -> HitList:
    """All hits of the line (within the open domain) on the set."""
    if max_hits < 2:
        raise InvalidInputError("max_hits must be >= 2")
    t_omega = omega.trace_pairs(line.tau, line.base)
    if not t_omega:
        return HitList(line, (), False)
    t_set = trace_pairs(expr, line.tau, line.base)
    hits, saturated = hits_from_pairs(t_set, t_omega, max_hits)
    return HitList(line, hits, saturated)


# ---------------------------------------------------------------------------
# transversal grids


def transversal_frame(tau: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the hyperplane orthogonal to tau."""
    n = tau.shape[0]
    if n == 2:
        return np.array([[-tau[1], tau[0]]])
    k = int(np.argmin(np.abs(tau)))
    e = np.zeros(3)
    e[k] = 1.0
    u = e - float(e @ tau) * tau
    u = u / float(np.linalg.norm(u))
    v = np.cross(tau, u)
    return np.stack([u, v / float(np.linalg.norm(v))])


@dataclass(frozen=True, eq=False)
class TransversalGrid:
    """Midpoint sampling grid on the transversal hyperplane of a direction.

    Sample coordinates along transversal axis k are
    ``lo[k] + (i + offsets[k]) * spacing`` for i < counts[k]; bases are the
    corresponding points embedded in R^n (orthogonal to tau).
    """

    tau: np.ndarray
    frame: np.ndarray
    lo: np.ndarray
    counts: tuple[int, ...]
    spacing: float
    offsets: tuple[float, ...]

    @classmethod
    def covering(cls, bbox_lo, bbox_hi, tau, spacing: float,
                 offsets: tuple[float, ...] | None = None) -> "TransversalGrid":
        """Grid whose window covers the projection of the box with margin
        >= spacing on both sides."""
        tau = np.asarray(tau, dtype=float)
        n = tau.shape[0]
        frame = transversal_frame(tau)
        corners = np.stack(np.meshgrid(*zip(bbox_lo, bbox_hi), indexing="ij"),
                           axis=-1).reshape(-1, n)
        w = corners @ frame.T
        wlo = w.min(axis=0) - spacing
        whi = w.max(axis=0) + spacing
        counts = tuple(int(math.ceil((whi[k] - wlo[k]) / spacing)) + 1
                       for k in range(n - 1))
        offs = tuple(offsets) if offsets is not None else DEFAULT_OFFSETS[: n - 1]
        return cls(tau, frame, wlo, counts, float(spacing), offs)

    @classmethod
    def aligned_with_raster(cls, grid: RasterGrid, axis: int) -> "TransversalGrid":
        """Lines along +-e_axis through the cell centers of a raster: the
        configuration on which the line-count estimator reproduces the exact
        per-axis variation."""
        n = grid.dim
        tau = np.zeros(n)
        tau[axis] = 1.0
        others = [k for k in range(n) if k != axis]
        frame = np.zeros((n - 1, n))
        for row, k in enumerate(others):
            frame[row, k] = 1.0
        lo = np.array([float(grid.origin[k]) for k in others])
        counts = tuple(grid.dims[k] for k in others)
        return cls(tau, frame, lo, counts, grid.spacing, (0.5,) * (n - 1))

    @property
    def dim(self) -> int:
        return self.tau.shape[0]

    @property
    def n_lines(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_measure(self) -> float:
        return self.spacing ** (self.dim - 1)

    def axis_coords(self) -> list[np.ndarray]:
        return [self.lo[k] + (np.arange(self.counts[k]) + self.offsets[k]) * self.spacing
                for k in range(self.dim - 1)]

    def coords(self) -> np.ndarray:
        """(M, n-1) transversal sample coordinates, first axis fastest."""
        axes = self.axis_coords()
        if len(axes) == 1:
            return axes[0][:, None]
        A, B = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.stack([A.reshape(-1, order="F"), B.reshape(-1, order="F")], axis=1)

    def bases(self) -> np.ndarray:
        """(M, n) line base points (orthogonal to tau by construction)."""
        return self.coords() @ self.frame


# ---------------------------------------------------------------------------
# direction sets


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Directions covering the sphere up to antipodes, with equal weights
    that sum to the full sphere area after antipodal doubling."""

    directions: np.ndarray

    @classmethod
    def uniform(cls, n: int, count: int) -> "DirectionSet":
        if count < 1:
            raise InvalidInputError("need at least one direction")
        if n == 2:
            ang = (np.arange(count) + 0.5) * math.pi / count
            return cls(np.stack([np.cos(ang), np.sin(ang)], axis=1))
        if n == 3:
            # deterministic golden-spiral points on the upper hemisphere
            k = np.arange(count)
            z = (k + 0.5) / count
            phi = 2.0 * math.pi * k * (math.sqrt(5.0) - 1.0) / 2.0
            rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
            d = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
            return cls(d / np.linalg.norm(d, axis=1, keepdims=True))
        raise InvalidInputError("direction sets exist for n in {2, 3}")

    def __len__(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return np.full(len(self), sphere_area(self.dim) / len(self))


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class VariationReport:
    """One estimated quantity with its discretization parameters."""

    quantity: str
    value: float
    params: dict = field(default_factory=dict)
    error_bound: Optional[float] = None
    stderr: Optional[float] = None
    saturated: bool = False
    excluded_parallel: int = 0

    def to_row(self) -> dict:
        row = {"quantity": self.quantity, "value": self.value}
        row.update(self.params)
        row["error_bound"] = self.error_bound
        row["stderr"] = self.stderr
        row["saturated"] = self.saturated
        row["excluded_parallel"] = self.excluded_parallel
        return row


# ---------------------------------------------------------------------------
# hit counting over grids


def _convex_chord_leaves(expr: SetExpr) -> list | None:
    """Leaves of an intersection of convex primitives (Ball / Box /
    HalfSpace, complemented half-spaces folded), else None."""
    out = []
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, (Ball, Box, HalfSpace)):
            out.append(e)
        elif isinstance(e, Complement) and isinstance(e.child, HalfSpace):
            out.append(HalfSpace(-e.child.normal, -float(e.child.offset)))
        elif isinstance(e, Intersection):
            stack.extend(e.children)
        else:
            return None
    return out


def _chords_batch(leaves: list, tau: np.ndarray, bases: np.ndarray):
    """(t0, t1) chord arrays for an intersection of convex leaves; empty
    chords have t0 >= t1."""
    m = bases.shape[0]
    t0 = np.full(m, -np.inf)
    t1 = np.full(m, np.inf)
    for leaf in leaves:
        if isinstance(leaf, Ball):
            w = bases - leaf.center
            b = w @ tau
            q = np.einsum("ij,ij->i", w, w) - leaf.radius ** 2
            disc = b * b - q
            ok = disc > 1e-12 * leaf.radius ** 2
            s = np.sqrt(np.where(ok, disc, 0.0))
            a0 = np.where(ok, -b - s, np.inf)
            a1 = np.where(ok, -b + s, -np.inf)
        elif isinstance(leaf, Box):
            a0 = np.full(m, -np.inf)
            a1 = np.full(m, np.inf)
            for i in range(leaf.dim):
                d = float(tau[i])
                if d == 0.0:
                    inside = (bases[:, i] > leaf.lo[i]) & (bases[:, i] < leaf.hi[i])
                    a0 = np.where(inside, a0, np.inf)
                    a1 = np.where(inside, a1, -np.inf)
                else:
                    ta = (leaf.lo[i] - bases[:, i]) / d
                    tb = (leaf.hi[i] - bases[:, i]) / d
                    lo_i = np.minimum(ta, tb)
                    hi_i = np.maximum(ta, tb)
                    a0 = np.maximum(a0, lo_i)
                    a1 = np.minimum(a1, hi_i)
        else:  # HalfSpace
            s = float(leaf.normal @ tau)
            c = leaf.offset - bases @ leaf.normal
            if s == 0.0:
                inside = c > 0.0
                a0 = np.where(inside, -np.inf, np.inf)
                a1 = np.where(inside, np.inf, -np.inf)
            elif s > 0.0:
                a0 = np.full(m, -np.inf)
                a1 = c / s
            else:
                a0 = c / s
                a1 = np.full(m, np.inf)
        t0 = np.maximum(t0, a0)
        t1 = np.minimum(t1, a1)
    return t0, t1


def _omega_window(omega: Domain, tau: np.ndarray, bases: np.ndarray):
    if omega.is_all_space:
        m = bases.shape[0]
        return np.full(m, -np.inf), np.full(m, np.inf)
    return _chords_batch([Box(omega.lo, omega.hi)], tau, bases)


def _count_piece_endpoints(plo: np.ndarray, phi: np.ndarray,
                           w0: np.ndarray, w1: np.ndarray) -> np.ndarray:
    """Hits contributed by one trace piece per line: finite endpoints of the
    omega-clipped piece strictly interior to the omega window."""
    c0 = np.maximum(plo, w0)
    c1 = np.minimum(phi, w1)
    nonempty = c0 < c1
    low = nonempty & np.isfinite(plo) & (plo > w0)
    high = nonempty & np.isfinite(phi) & (phi < w1)
    return low.astype(np.int64) + high.astype(np.int64)


def _counts_convex(leaves: list, omega: Domain, grid: TransversalGrid) -> np.ndarray:
    bases = grid.bases()
    t0, t1 = _chords_batch(leaves, grid.tau, bases)
    w0, w1 = _omega_window(omega, grid.tau, bases)
    return _count_piece_endpoints(t0, t1, w0, w1)


def _counts_convex_diff(leaves_a: list, leaves_b: list, omega: Domain,
                        grid: TransversalGrid) -> np.ndarray:
    """Hit counts of (convex A) \\ (convex B): the per-line trace has at most
    two pieces, (a0, min(a1, b0)) and (max(a0, b1), a1), exactly the pieces
    canonical interval subtraction produces."""
    bases = grid.bases()
    a0, a1 = _chords_batch(leaves_a, grid.tau, bases)
    b0, b1 = _chords_batch(leaves_b, grid.tau, bases)
    w0, w1 = _omega_window(omega, grid.tau, bases)
    b_empty = ~(b0 < b1)
    p1lo, p1hi = a0, np.where(b_empty, a1, np.minimum(a1, b0))
    p2lo = np.where(b_empty, np.inf, np.maximum(a0, b1))
    p2hi = a1
    return (_count_piece_endpoints(p1lo, p1hi, w0, w1)
            + _count_piece_endpoints(p2lo, p2hi, w0, w1))


def _counts_convex_multi_diff(leaves_a: list, holes: list, omega: Domain,
                              grid: TransversalGrid) -> np.ndarray:
    """Hit counts of (convex A) minus pairwise strictly-separated convex
    holes.  Per line, the hits of the subtracted trace are the A-chord
    endpoints not swallowed by a hole chord plus the hole-chord endpoints
    strictly interior to the A-chord; separation guarantees hole chords
    never touch, so no merging can occur."""
    bases = grid.bases()
    a0, a1 = _chords_batch(leaves_a, grid.tau, bases)
    w0, w1 = _omega_window(omega, grid.tau, bases)
    a_ok = a0 < a1
    counts = np.zeros(bases.shape[0], dtype=np.int64)
    a0_gone = np.zeros(bases.shape[0], dtype=bool)
    a1_gone = np.zeros(bases.shape[0], dtype=bool)
    for lb in holes:
        b0, b1 = _chords_batch(lb, grid.tau, bases)
        ok = a_ok & (b0 < b1)
        a0_gone |= ok & (b0 <= a0) & (a0 < b1)
        a1_gone |= ok & (b0 < a1) & (a1 <= b1)
        counts += ok & (a0 < b0) & (b0 < a1) & (b0 > w0) & (b0 < w1)
        counts += ok & (a0 < b1) & (b1 < a1) & (b1 > w0) & (b1 < w1)
    counts += a_ok & np.isfinite(a0) & ~a0_gone & (a0 > w0) & (a0 < w1)
    counts += a_ok & np.isfinite(a1) & ~a1_gone & (a1 > w0) & (a1 < w1)
    return counts


def _bboxes_strictly_disjoint(ba, bb) -> bool:
    if ba is None or bb is None:
        return False
    return bool(np.any(ba[1] < bb[0]) or np.any(bb[1] < ba[0]))


def _counts_structured(expr: SetExpr, omega: Domain,
                       grid: TransversalGrid) -> np.ndarray | None:
    """Batched hit counts for set structures whose traces decompose line by
    line: convex intersections, differences of two convex sets, and unions
    of strictly-separated such pieces (disjoint sets have disjoint traces,
    so hits are additive).  Returns None when no decomposition applies."""
    leaves = _convex_chord_leaves(expr)
    if leaves is not None:
        return _counts_convex(leaves, omega, grid)
    from .geometry import Difference, Union as GUnion

    if isinstance(expr, Difference):
        la = _convex_chord_leaves(expr.left)
        lb = _convex_chord_leaves(expr.right)
        if la is not None and lb is not None:
            return _counts_convex_diff(la, lb, omega, grid)
        return None
    if isinstance(expr, GUnion):
        boxes = [bounding_box(c) for c in expr.children]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if not _bboxes_strictly_disjoint(boxes[i], boxes[j]):
                    return None
        total = None
        for c in expr.children:
            part = _counts_structured(c, omega, grid)
            if part is None:
                return None
            total = part if total is None else total + part
        return total
    return None


def _counts_raster_stab(grid: RasterGrid, tgrid: TransversalGrid,
                        max_hits: int) -> tuple[np.ndarray, bool, int]:
    """Hit counts for a raster set over an unbounded domain via interval
    stabbing of its exposed faces: for almost every line the hits are
    exactly the transversal face crossings, and the grid's jittered sample
    coordinates avoid the exceptional (corner-grazing) lines."""
    from .geometry import raster_faces

    u = tgrid.frame[0]
    w = tgrid.coords()[:, 0]
    starts = []
    ends = []
    excluded = 0
    s = grid.spacing
    for rec in raster_faces(grid):
        axis, coord, lower = rec["axis"], rec["coord"], rec["lower"]
        if abs(float(tgrid.tau[axis])) < PARALLEL_TOL:
            excluded += int(coord.size)
            continue
        other = 1 - axis
        p = np.empty((coord.size, 2))
        q = np.empty((coord.size, 2))
        p[:, axis] = coord
        q[:, axis] = coord
        p[:, other] = lower[:, 0]
        q[:, other] = lower[:, 0] + s
        wp = p @ u
        wq = q @ u
        starts.append(np.minimum(wp, wq))
        ends.append(np.maximum(wp, wq))
    if not starts:
        return np.zeros(w.size, dtype=np.int64), False, excluded
    lo = np.sort(np.concatenate(starts))
    hi = np.sort(np.concatenate(ends))
    counts = (np.searchsorted(lo, w, side="left")
              - np.searchsorted(hi, w, side="right"))
    saturated = bool(np.any(counts > max_hits))
    return np.minimum(counts, max_hits), saturated, excluded


def _counts_per_line(expr: SetExpr, omega: Domain, grid: TransversalGrid,
                     max_hits: int) -> tuple[np.ndarray, bool]:
    bases = grid.bases()
    tau = grid.tau

    def work(span):
        lo, hi = span
        out = np.empty(hi - lo, dtype=np.int64)
        sat = False
        for k in range(lo, hi):
            t_omega = omega.trace_pairs(tau, bases[k])
            if not t_omega:
                out[k - lo] = 0
                continue
            hits, s = hits_from_pairs(trace_pairs(expr, tau, bases[k]), t_omega, max_hits)
            out[k - lo] = len(hits)
            sat = sat or s
        return out, sat

    m = bases.shape[0]
    chunk = 2048
    spans = [(k, min(k + chunk, m)) for k in range(0, m, chunk)]
    parts = chunked_map(work, spans)
    counts = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, dtype=np.int64)
    return counts, any(p[1] for p in parts)


def hit_counts_over_grid(expr: SetExpr, omega: Domain, grid: TransversalGrid,
                         max_hits: int = DEFAULT_MAX_HITS):
    """Per-line hit counts over a transversal grid.

    Returns (counts, saturated, excluded_parallel, strategy).  Strategy is
    chosen by structure: batched chords for convex intersections (and
    differences/separated unions of them), face stabbing for 2-D rasters
    over all of space (large grids), otherwise the per-line definitional
    path.
    """
    structured = _counts_structured(expr, omega, grid)
    if structured is not None:
        return structured, False, 0, "convex-chords"
    if (isinstance(expr, Raster) and omega.is_all_space and expr.grid.dim == 2
            and grid.n_lines >= 256 and grid.offsets != (0.5,)):
        counts, sat, excl = _counts_raster_stab(expr.grid, grid, max_hits)
        return counts, sat, excl, "face-stab"
    counts, sat = _counts_per_line(expr, omega, grid, max_hits)
    return counts, sat, 0, "per-line"


# ---------------------------------------------------------------------------
# directional variation


def _tv_error_bound(counts: np.ndarray, grid: TransversalGrid) -> float:
    """Midpoint-rule heuristic: half a cell measure per unit of total
    variation of the count field along the transversal axes."""
    shaped = counts.reshape(grid.counts, order="F")
    tv = 0.0
    for axis in range(shaped.ndim):
        tv += float(np.sum(np.abs(np.diff(shaped, axis=axis))))
        edges = np.take(shaped, [0, -1], axis=axis)
        tv += float(np.sum(np.abs(edges)))
    return 0.5 * tv * grid.cell_measure


def directional_variation(expr: SetExpr, omega: Domain, tau,
                          grid: TransversalGrid | None = None, *,
                          spacing: float = DEFAULT_SPACING,
                          max_hits: int = DEFAULT_MAX_HITS) -> VariationReport:
    """Estimate of the variation of the set in direction tau within omega:
    the midpoint-rule transversal integral of the line hit count."""
    tau = np.asarray(tau, dtype=float)
    if grid is None:
        bb = effective_bbox(expr, omega)
        if bb is None:
            raise UnboundedDomainError(
                "unbounded set over all space: supply an explicit TransversalGrid")
        grid = TransversalGrid.covering(bb[0], bb[1], tau, spacing)
    counts, saturated, excluded, strategy = hit_counts_over_grid(expr, omega, grid, max_hits)
    value = float(counts.sum()) * grid.cell_measure
    return VariationReport(
        quantity="P_tau",
        value=value,
        params={"tau": tuple(float(t) for t in grid.tau), "h": grid.spacing,
                "lines": grid.n_lines, "max_hits": max_hits, "strategy": strategy},
        error_bound=_tv_error_bound(counts, grid),
        saturated=saturated,
        excluded_parallel=excluded,
    )


def axis_variation_exact(grid: RasterGrid, axis: int) -> VariationReport:
    """Exact per-axis variation of a voxel set: occupancy transitions along
    all grid lines in that direction (outer hull included) times the face
    area.  Integer count times an exact scalar."""
    if not 0 <= axis < grid.dim:
        raise InvalidInputError(f"axis {axis} out of range for dim {grid.dim}")
    occ = grid.occupancy.astype(np.int8)
    pad_shape = list(grid.dims)
    pad_shape[axis] += 2
    padded = np.zeros(pad_shape, dtype=np.int8)
    sl = [slice(None)] * grid.dim
    sl[axis] = slice(1, -1)
    padded[tuple(sl)] = occ
    transitions = int(np.count_nonzero(np.diff(padded, axis=axis)))
    value = transitions * grid.spacing ** (grid.dim - 1)
    return VariationReport(
        quantity="P_axis_exact",
        value=value,
        params={"axis": axis, "transitions": transitions, "spacing": grid.spacing},
        error_bound=0.0,
    )


# ---------------------------------------------------------------------------
# projection measure of explicit boundaries


def _segments_cross_counts(segments: np.ndarray, omega: Domain,
                           grid: TransversalGrid, max_hits: int):
    """Crossing multiplicity N(z) of the line family against a 2-D segment
    soup.  Segments parallel to the family (|normal . tau| < tol) are
    excluded and counted."""
    tau = grid.tau
    u = grid.frame[0]
    w = grid.coords()[:, 0]
    if segments.shape[0] == 0:
        return np.zeros(w.size, dtype=np.int64), False, 0
    d = segments[:, 1, :] - segments[:, 0, :]
    lengths = np.linalg.norm(d, axis=1)
    keep = lengths > 0
    cross = np.abs(d[:, 0] * tau[1] - d[:, 1] * tau[0])
    parallel = keep & (cross < PARALLEL_TOL * lengths)
    excluded = int(np.count_nonzero(parallel))
    live = keep & ~parallel
    segs = segments[live]
    if segs.shape[0] == 0:
        return np.zeros(w.size, dtype=np.int64), False, excluded
    wp = segs[:, 0, :] @ u
    wq = segs[:, 1, :] @ u
    lo = np.minimum(wp, wq)
    hi = np.maximum(wp, wq)
    if omega.is_all_space:
        lo_s = np.sort(lo)
        hi_s = np.sort(hi)
        counts = (np.searchsorted(lo_s, w, side="left")
                  - np.searchsorted(hi_s, w, side="right"))
    else:
        counts = np.zeros(w.size, dtype=np.int64)
        chunk = 512
        for k0 in range(0, segs.shape[0], chunk):
            sl = slice(k0, min(k0 + chunk, segs.shape[0]))
            span = (wq - wp)[sl]
            svals = (w[None, :] - wp[sl, None]) / span[:, None]
            inside = (svals > 0.0) & (svals < 1.0)
            p = segs[sl, 0, :]
            dd = (segs[sl, 1, :] - segs[sl, 0, :])
            pts_x = p[:, None, 0] + svals * dd[:, None, 0]
            pts_y = p[:, None, 1] + svals * dd[:, None, 1]
            in_omega = ((pts_x > omega.lo[0]) & (pts_x < omega.hi[0])
                        & (pts_y > omega.lo[1]) & (pts_y < omega.hi[1]))
            counts += np.sum(inside & in_omega, axis=0)
    saturated = bool(np.any(counts > max_hits))
    return np.minimum(counts, max_hits), saturated, excluded


def _faces3d_cross_counts(b: "bnd.ExplicitBoundary", omega: Domain,
                          grid: TransversalGrid, max_hits: int):
    """Crossing counts for 3-D voxel faces, accumulated face by face."""
    tau = grid.tau
    axes_w = grid.axis_coords()
    W0, W1 = np.meshgrid(axes_w[0], axes_w[1], indexing="ij")
    base = W0[..., None] * grid.frame[0] + W1[..., None] * grid.frame[1]
    counts = np.zeros(W0.shape, dtype=np.int64)
    excluded = 0
    s = b.spacing
    for rec in b.faces:
        axis, coord, lower = rec["axis"], rec["coord"], rec["lower"]
        ta = float(tau[axis])
        if abs(ta) < PARALLEL_TOL:
            excluded += int(coord.size)
            continue
        others = [k for k in range(3) if k != axis]
        for k in range(coord.size):
            # crossing parameter of every line with the face plane, then a
            # containment test in the face rectangle
            t = (coord[k] - base[..., axis]) / ta
            pt = base + t[..., None] * tau
            ok = np.ones(W0.shape, dtype=bool)
            for j, ax in enumerate(others):
                ok &= (pt[..., ax] >= lower[k, j]) & (pt[..., ax] < lower[k, j] + s)
            if not omega.is_all_space:
                ok &= np.all((pt > omega.lo) & (pt < omega.hi), axis=-1)
            counts += ok
    flat = counts.reshape(-1, order="F")
    saturated = bool(np.any(flat > max_hits))
    return np.minimum(flat, max_hits), saturated, excluded


def projection_measure(b: "bnd.ExplicitBoundary", omega: Domain, tau,
                       grid: TransversalGrid | None = None, *,
                       spacing: float = DEFAULT_SPACING,
                       max_hits: int = DEFAULT_MAX_HITS,
                       quantity: str = "mu_tau") -> VariationReport:
    """Projection measure of an explicit boundary at direction tau: the
    transversal integral of the crossing multiplicity N(z)."""
    tau = np.asarray(tau, dtype=float)
    if grid is None:
        lo, hi = _boundary_bbox(b, omega)
        grid = TransversalGrid.covering(lo, hi, tau, spacing)
    if b.kind == bnd.POLY_SEGMENTS:
        counts, saturated, excluded = _segments_cross_counts(b.segments, omega, grid, max_hits)
    elif b.dim == 2:
        segs = bnd.voxel_faces_as_segments(b)
        counts, saturated, excluded = _segments_cross_counts(segs, omega, grid, max_hits)
    else:
        counts, saturated, excluded = _faces3d_cross_counts(b, omega, grid, max_hits)
    value = float(counts.sum()) * grid.cell_measure
    return VariationReport(
        quantity=quantity,
        value=value,
        params={"tau": tuple(float(t) for t in grid.tau), "h": grid.spacing,
                "lines": grid.n_lines, "max_hits": max_hits},
        error_bound=_tv_error_bound(counts, grid),
        saturated=saturated,
        excluded_parallel=excluded,
    )


def _boundary_bbox(b: "bnd.ExplicitBoundary", omega: Domain):
    if b.kind == bnd.POLY_SEGMENTS:
        if b.segments.shape[0] == 0:
            return np.zeros(b.dim), np.full(b.dim, 1e-6)
        pts = b.segments.reshape(-1, b.dim)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
    else:
        los = []
        his = []
        for rec in b.faces:
            if rec["coord"].size == 0:
                continue
            others = [k for k in range(b.dim) if k != rec["axis"]]
            lo = np.empty(b.dim)
            hi = np.empty(b.dim)
            lo[rec["axis"]] = rec["coord"].min()
            hi[rec["axis"]] = rec["coord"].max()
            for j, ax in enumerate(others):
                lo[ax] = rec["lower"][:, j].min()
                hi[ax] = rec["lower"][:, j].max() + b.spacing
            los.append(lo)
            his.append(hi)
        if not los:
            return np.zeros(b.dim), np.full(b.dim, 1e-6)
        lo = np.min(los, axis=0)
        hi = np.max(his, axis=0)
    if not omega.is_all_space:
        lo = np.maximum(lo, omega.lo)
        hi = np.minimum(hi, omega.hi)
        hi = np.maximum(hi, lo)
    return lo, hi


# ---------------------------------------------------------------------------
# direction averages


def _direction_average(values: Sequence[float], n: int) -> float:
    return crofton_constant(n) * float(np.mean(values))


def crofton_perimeter(expr: SetExpr, omega: Domain,
                      dirs: DirectionSet | int = 360, *,
                      spacing: float = DEFAULT_SPACING,
                      max_hits: int = DEFAULT_MAX_HITS) -> VariationReport:
    """Perimeter estimate: direction average of directional variations,
    normalized by A(n)/(2 V(n-1)); directions cover half the sphere since
    P_tau = P_{-tau}."""
    bb = effective_bbox(expr, omega)
    if bb is None:
        raise UnboundedDomainError(
            "unbounded set over all space: crofton_perimeter needs a bounded setup")
    n = int(np.asarray(bb[0]).shape[0])
    if isinstance(dirs, int):
        dirs = DirectionSet.uniform(n, dirs)

    def work(tau):
        grid = TransversalGrid.covering(bb[0], bb[1], tau, spacing)
        rep = directional_variation(expr, omega, tau, grid, max_hits=max_hits)
        return rep.value, rep.saturated, rep.excluded_parallel

    results = chunked_map(work, list(dirs.directions))
    values = [r[0] for r in results]
    value = _direction_average(values, n)
    scale = crofton_constant(n)
    return VariationReport(
        quantity="P_crofton",
        value=value,
        params={"K": len(dirs), "h": spacing, "max_hits": max_hits,
                "normalization": scale},
        stderr=scale * float(np.std(values)) / math.sqrt(len(values)),
        saturated=any(r[1] for r in results),
        excluded_parallel=sum(r[2] for r in results),
    )


def ig_measure(b: "bnd.ExplicitBoundary", omega: Domain,
               dirs: DirectionSet | int = 360, *,
               spacing: float = DEFAULT_SPACING,
               max_hits: int = DEFAULT_MAX_HITS) -> VariationReport:
    """Integral-geometric measure of an explicit boundary: the direction
    average of its projection measures, same normalization as the perimeter
    estimator."""
    n = b.dim
    if isinstance(dirs, int):
        dirs = DirectionSet.uniform(n, dirs)
    lo, hi = _boundary_bbox(b, omega)

    def work(tau):
        grid = TransversalGrid.covering(lo, hi, tau, spacing)
        rep = projection_measure(b, omega, tau, grid, max_hits=max_hits)
        return rep.value, rep.saturated, rep.excluded_parallel

    results = chunked_map(work, list(dirs.directions))
    values = [r[0] for r in results]
    scale = crofton_constant(n)
    return VariationReport(
        quantity="IG_measure",
        value=_direction_average(values, n),
        params={"K": len(dirs), "h": spacing, "max_hits": max_hits,
                "normalization": scale},
        stderr=scale * float(np.std(values)) / math.sqrt(len(values)),
        saturated=any(r[1] for r in results),
        excluded_parallel=sum(r[2] for r in results),
    )


# ---------------------------------------------------------------------------
# equality / finiteness checks


def _relative_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


@dataclass(frozen=True)
class TripleComparison:
    """Directional variation vs projection measures of the extracted
    essential and preponderant boundaries, for one direction."""

    p_tau: VariationReport
    mu_essential: VariationReport
    mu_preponderant: VariationReport
    corner_pieces: int
    gap_essential: float
    gap_preponderant: float

    @property
    def max_gap(self) -> float:
        return max(self.gap_essential, self.gap_preponderant)


def _auto_boundary(expr: SetExpr, omega: Domain) -> "bnd.ExplicitBoundary":
    if isinstance(expr, Raster):
        return bnd.extract_boundary_voxel(expr.grid)
    return bnd.extract_boundary_poly(expr, omega=omega)


def check_variation_vs_projection(expr: SetExpr, omega: Domain, tau, *,
                                  boundary: "bnd.ExplicitBoundary | None" = None,
                                  spacing: float = DEFAULT_SPACING,
                                  max_hits: int = DEFAULT_MAX_HITS) -> TripleComparison:
    """Compare P_tau (hit counting) against mu_tau of the extracted
    boundary, for both boundary notions.

    For sets admitting extraction here, the preponderant boundary differs
    from the essential one only at the annotated corner/junction pieces,
    which project to a transversal null set; both measures therefore use the
    same segment set, with the corner count reported.
    """
    if boundary is None:
        boundary = _auto_boundary(expr, omega)
    p = directional_variation(expr, omega, tau, spacing=spacing, max_hits=max_hits)
    mu_e = projection_measure(boundary, omega, tau, spacing=spacing,
                              max_hits=max_hits, quantity="mu_tau_fr_e")
    mu_p = replace(mu_e, quantity="mu_tau_fr_pr")
    corners = boundary.corner_count()
    return TripleComparison(
        p_tau=p, mu_essential=mu_e, mu_preponderant=mu_p,
        corner_pieces=corners,
        gap_essential=_relative_gap(p.value, mu_e.value),
        gap_preponderant=_relative_gap(p.value, mu_p.value),
    )


@dataclass(frozen=True)
class DirectionProbe:
    tau: tuple[float, ...]
    value: float
    value_refined: float
    rel_change: float
    saturated: bool

    @property
    def finite_stable(self) -> bool:
        return not self.saturated and self.rel_change < 0.05


@dataclass(frozen=True)
class FinitenessProbe:
    """Grid-refinement stability probe for projection measures along n
    independent directions plus the perimeter estimate."""

    directions: tuple[DirectionProbe, ...]
    perimeter: DirectionProbe

    @property
    def all_finite_stable(self) -> bool:
        return all(d.finite_stable for d in self.directions) and self.perimeter.finite_stable


def check_finiteness(expr: SetExpr, omega: Domain, directions, *,
                     boundary: "bnd.ExplicitBoundary | None" = None,
                     spacing: float = DEFAULT_SPACING,
                     perimeter_dirs: int = 90,
                     max_hits: int = DEFAULT_MAX_HITS) -> FinitenessProbe:
    """Probe whether the boundary projection measures along n linearly
    independent directions (and the perimeter) stay stable under halving
    the transversal spacing: the computable surrogate for finiteness."""
    dirs = np.asarray(directions, dtype=float)
    n = dirs.shape[1]
    if dirs.shape[0] != n:
        raise InvalidInputError("need exactly n directions in R^n")
    if abs(float(np.linalg.det(dirs))) <= 1e-9:
        raise InvalidInputError("directions must be linearly independent")
    if boundary is None:
        boundary = _auto_boundary(expr, omega)

    probes = []
    for tau in dirs:
        tau = tau / float(np.linalg.norm(tau))
        a = projection_measure(boundary, omega, tau, spacing=spacing,
                               max_hits=max_hits, quantity="mu_tau_fr_pr")
        b = projection_measure(boundary, omega, tau, spacing=spacing / 2.0,
                               max_hits=max_hits, quantity="mu_tau_fr_pr")
        probes.append(DirectionProbe(
            tuple(float(t) for t in tau), a.value, b.value,
            _relative_gap(a.value, b.value), a.saturated or b.saturated))
    pa = crofton_perimeter(expr, omega, perimeter_dirs, spacing=spacing, max_hits=max_hits)
    pb = crofton_perimeter(expr, omega, perimeter_dirs, spacing=spacing / 2.0,
                           max_hits=max_hits)
    perimeter = DirectionProbe(
        (), pa.value, pb.value, _relative_gap(pa.value, pb.value),
        pa.saturated or pb.saturated)
    return FinitenessProbe(tuple(probes), perimeter)


@dataclass(frozen=True)
class PerimeterComparison:
    crofton: VariationReport
    boundary_measure: VariationReport
    gap: float


def check_perimeter_vs_boundary_measure(expr: SetExpr, omega: Domain, *,
                                        boundary: "bnd.ExplicitBoundary | None" = None,
                                        dirs: DirectionSet | int = 360,
                                        spacing: float = DEFAULT_SPACING,
                                        max_hits: int = DEFAULT_MAX_HITS) -> PerimeterComparison:
    """Compare the Crofton perimeter estimate against the integral-geometric
    measure of the extracted essential boundary."""
    if boundary is None:
        boundary = _auto_boundary(expr, omega)
    per = crofton_perimeter(expr, omega, dirs, spacing=spacing, max_hits=max_hits)
    igm = ig_measure(boundary, omega, dirs, spacing=spacing, max_hits=max_hits)
    return PerimeterComparison(per, igm, _relative_gap(per.value, igm.value))
