"""Measure-theoretic boundary classification and explicit boundary extraction.

Three notions are supported, all defined through upper/lower outer densities
of the set and its complement at a point:

* essential: on the boundary when both upper densities are positive;
* preponderant: on the boundary when both upper densities are >= 1/2
  (a strictly finer notion: a square's corner has density 1/4 and is
  essential-boundary but preponderant-exterior);
* strong(delta): both *lower* densities >= delta.  Experimental probe, no
  claims attached to its output.

All strict inequalities become tolerance bands numerically, so every verdict
carries an explicit Uncertain state: a comparison within error_bound of its
threshold is undecidable at the estimator's resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .density import DensityEstimate, RadiusSchedule, density_pair
from .errors import GeneralPositionError, InvalidInputError, UnboundedDomainError
from .geometry import (
    Ball,
    Box,
    Complement,
    Difference,
    Domain,
    HalfSpace,
    Intersection,
    Raster,
    RasterGrid,
    SetExpr,
    Union,
    bounding_box,
    raster_faces,
)

INTERIOR_A = "interior_a"
INTERIOR_COMPLEMENT = "interior_complement"
ON_BOUNDARY = "on_boundary"
UNCERTAIN = "uncertain"

#: byte codes for mask serialization
MASK_CODES = {INTERIOR_A: 0, INTERIOR_COMPLEMENT: 1, ON_BOUNDARY: 2, UNCERTAIN: 3}

DEFAULT_TOL = 1e-2


@dataclass(frozen=True)
class Notion:
    """Boundary notion selector: kind in {"essential", "preponderant",
    "strong"}; ``delta`` only applies to "strong" (in (0, 0.5])."""

    kind: str
    delta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("essential", "preponderant", "strong"):
            raise InvalidInputError(f"unknown boundary notion {self.kind!r}")
        if self.kind == "strong":
            if self.delta is None or not 0.0 < self.delta <= 0.5:
                raise InvalidInputError("strong notion needs delta in (0, 0.5]")
        elif self.delta is not None:
            raise InvalidInputError(f"{self.kind} notion takes no delta")

    @classmethod
    def essential(cls) -> "Notion":
        return cls("essential")

    @classmethod
    def preponderant(cls) -> "Notion":
        return cls("preponderant")

    @classmethod
    def strong(cls, delta: float) -> "Notion":
        return cls("strong", float(delta))

    @classmethod
    def parse(cls, text: str) -> "Notion":
        if text.startswith("strong:"):
            return cls.strong(float(text.split(":", 1)[1]))
        return cls(text)

    def __str__(self) -> str:
        return f"strong:{self.delta:g}" if self.kind == "strong" else self.kind


@dataclass(frozen=True)
class BoundaryLabel:
    notion: Notion
    verdict: str
    margins: dict = field(default_factory=dict)

    @property
    def code(self) -> int:
        return MASK_CODES[self.verdict]


def _tri(value: float, threshold: float, band: float) -> int:
    """+1 above, -1 below, 0 undecidable within the error band."""
    if abs(value - threshold) <= band:
        return 0
    return 1 if value > threshold else -1


def classify_point(expr: SetExpr, x, notion: Notion,
                   sched: RadiusSchedule = RadiusSchedule(),
                   tol: float = DEFAULT_TOL, **density_kwargs) -> BoundaryLabel:
    """Classify a point against a boundary/interior notion.

    Verdicts are three-valued plus Uncertain: the notion's strict
    inequalities cannot be decided numerically at the threshold, so any
    deciding comparison within ``error_bound`` of its (tol-adjusted)
    threshold yields Uncertain.
    """
    if not tol > 0:
        raise InvalidInputError("tolerance must be > 0")
    est_a, est_c = density_pair(expr, x, sched, **density_kwargs)
    e = max(est_a.error_bound, est_c.error_bound)
    ua, uc = est_a.upper, est_c.upper
    la, lc = est_a.lower, est_c.lower

    if notion.kind == "essential":
        # boundary: both upper densities positive (> tol numerically)
        sa, sc = _tri(ua, tol, e), _tri(uc, tol, e)
        if sc == -1:
            verdict = INTERIOR_A
        elif sa == -1:
            verdict = INTERIOR_COMPLEMENT
        elif sa == 1 and sc == 1:
            verdict = ON_BOUNDARY
        else:
            verdict = UNCERTAIN
        margin = min(abs(ua - tol), abs(uc - tol))
    elif notion.kind == "preponderant":
        # boundary: both upper densities >= 1/2; interior of the set where
        # the complement's upper density drops below 1/2
        theta = 0.5 - tol
        sa, sc = _tri(ua, theta, e), _tri(uc, theta, e)
        if sc == -1:
            verdict = INTERIOR_A
        elif sa == -1:
            verdict = INTERIOR_COMPLEMENT
        elif sa == 1 and sc == 1:
            verdict = ON_BOUNDARY
        else:
            verdict = UNCERTAIN
        margin = min(abs(ua - theta), abs(uc - theta))
    else:
        # strong(delta): both lower densities >= delta.  Experimental.
        theta = notion.delta - tol
        sa, sc = _tri(la, theta, e), _tri(lc, theta, e)
        if sa == 1 and sc == 1:
            verdict = ON_BOUNDARY
        elif sc == -1 and sa == 1:
            verdict = INTERIOR_A
        elif sa == -1 and sc == 1:
            verdict = INTERIOR_COMPLEMENT
        else:
            verdict = UNCERTAIN
        margin = min(abs(la - theta), abs(lc - theta))

    return BoundaryLabel(notion, verdict, {
        "upper_a": ua, "upper_complement": uc,
        "lower_a": la, "lower_complement": lc,
        "error_bound": e, "margin": margin,
    })


def classify_raster(grid: RasterGrid, notion: Notion,
                    sched: RadiusSchedule, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Per-voxel-center classification mask (byte codes per MASK_CODES).

    Deterministic: output ordering is fixed by voxel index regardless of
    how the work is partitioned.
    """
    from ._parallel import chunked_map

    expr = Raster(grid)
    centers = grid.cell_centers()

    def work(span):
        lo, hi = span
        out = np.empty(hi - lo, dtype=np.uint8)
        for k in range(lo, hi):
            out[k - lo] = classify_point(expr, centers[k], notion, sched, tol).code
        return out

    m = centers.shape[0]
    chunk = 1024
    spans = [(k, min(k + chunk, m)) for k in range(0, m, chunk)]
    parts = chunked_map(work, spans)
    flat = np.concatenate(parts) if parts else np.empty(0, dtype=np.uint8)
    return flat.reshape(grid.dims, order="F")


# ---------------------------------------------------------------------------
# explicit boundaries

VOXEL_FACES = "voxel_faces"
POLY_SEGMENTS = "poly_segments"

#: chord (sagitta) tolerance for polygonizing disks, relative to the radius
DISK_CHORD_TOL = 1e-4
#: turn angle above which a segment junction is annotated as a corner
CORNER_ANGLE = 1e-9


@dataclass(frozen=True, eq=False)
class ExplicitBoundary:
    """Finite representation of the essential boundary of a set.

    ``voxel_faces``: the exposed cell interfaces of a raster (faces between
    occupied and unoccupied cells, outer hull included); per-axis records
    as produced by :func:`crofton.geometry.raster_faces`.

    ``poly_segments``: a 2-D segment soup covering the boundary of a
    regularized CSG polygon, with junction points between non-collinear
    segments annotated as corners.  The preponderant boundary of these sets
    differs from the essential boundary only at the annotated corner points
    (a projection-null set), so one segment set serves both.
    """

    kind: str
    dim: int
    segments: Optional[np.ndarray] = None        # (m, 2, 2)
    corners: Optional[np.ndarray] = None         # (k, 2)
    faces: Optional[list] = None                 # raster_faces() records
    spacing: Optional[float] = None

    @property
    def is_empty(self) -> bool:
        if self.kind == POLY_SEGMENTS:
            return self.segments.shape[0] == 0
        return all(f["coord"].size == 0 for f in self.faces)

    def face_counts(self) -> tuple[int, ...]:
        if self.kind != VOXEL_FACES:
            raise InvalidInputError("face_counts applies to voxel boundaries")
        return tuple(int(f["coord"].size) for f in self.faces)

    def corner_count(self) -> int:
        return 0 if self.corners is None else int(self.corners.shape[0])

    def total_measure(self) -> float:
        """Total H^{n-1} of the representation (sum of segment lengths or
        face areas)."""
        if self.kind == POLY_SEGMENTS:
            if self.segments.shape[0] == 0:
                return 0.0
            d = self.segments[:, 1, :] - self.segments[:, 0, :]
            return float(np.sum(np.linalg.norm(d, axis=1)))
        return float(sum(self.face_counts()) * self.spacing ** (self.dim - 1))


def extract_boundary_voxel(grid: RasterGrid) -> ExplicitBoundary:
    """Exposed faces of a voxel set: exactly the interfaces where occupancy
    differs, treating outside-raster as unoccupied.  Face-interior points
    have density 1/2, cell-interior points 0 or 1, so this is the essential
    boundary of the raster set up to the faces' (n-2)-skeleton."""
    return ExplicitBoundary(
        kind=VOXEL_FACES, dim=grid.dim,
        faces=raster_faces(grid), spacing=grid.spacing,
    )


def voxel_faces_as_segments(b: ExplicitBoundary) -> np.ndarray:
    """2-D voxel faces as a (m, 2, 2) segment array."""
    if b.dim != 2 or b.kind != VOXEL_FACES:
        raise InvalidInputError("segment view needs a 2-D voxel boundary")
    segs = []
    s = b.spacing
    for rec in b.faces:
        axis, coord, lower = rec["axis"], rec["coord"], rec["lower"]
        for k in range(coord.size):
            if axis == 0:
                p = [coord[k], lower[k, 0]]
                q = [coord[k], lower[k, 0] + s]
            else:
                p = [lower[k, 0], coord[k]]
                q = [lower[k, 0] + s, coord[k]]
            segs.append((p, q))
    return np.asarray(segs, dtype=float).reshape(-1, 2, 2)


def _disk_polygon_vertices(center: np.ndarray, radius: float) -> np.ndarray:
    n_vertices = max(16, int(math.ceil(math.pi / math.sqrt(2.0 * DISK_CHORD_TOL))))
    ang = 2.0 * math.pi * np.arange(n_vertices) / n_vertices
    return center + radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _to_shapely(expr: SetExpr, window):
    import shapely.geometry as sgeom

    if isinstance(expr, Box):
        return sgeom.box(float(expr.lo[0]), float(expr.lo[1]),
                         float(expr.hi[0]), float(expr.hi[1]))
    if isinstance(expr, Ball):
        return sgeom.Polygon(_disk_polygon_vertices(expr.center, expr.radius))
    if isinstance(expr, HalfSpace):
        if window is None:
            raise UnboundedDomainError(
                "half-space boundary extraction needs a bounded window")
        from .geometry import clip_convex_polygon
        lo, hi = window
        poly = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        clipped = clip_convex_polygon(poly, expr.normal, expr.offset)
        if clipped.shape[0] < 3:
            return sgeom.Polygon()
        return sgeom.Polygon(clipped)
    if isinstance(expr, Raster):
        raise GeneralPositionError("polygonal extraction does not accept raster leaves; "
                                   "use extract_boundary_voxel")
    if isinstance(expr, Union):
        geom = _to_shapely(expr.children[0], window)
        for c in expr.children[1:]:
            geom = geom.union(_to_shapely(c, window))
        return _regularize(geom)
    if isinstance(expr, Intersection):
        geom = _to_shapely(expr.children[0], window)
        for c in expr.children[1:]:
            geom = geom.intersection(_to_shapely(c, window))
        return _regularize(geom)
    if isinstance(expr, Complement):
        if window is None:
            raise UnboundedDomainError("complement boundary extraction needs a window")
        import shapely.geometry as sg
        lo, hi = window
        frame = sg.box(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
        return _regularize(frame.difference(_to_shapely(expr.child, window)))
    if isinstance(expr, Difference):
        a = _to_shapely(expr.left, window)
        return _regularize(a.difference(_to_shapely(expr.right, window)))
    raise InvalidInputError(f"unknown set expression node {type(expr).__name__}")


def _regularize(geom):
    """Keep only the 2-D part of a boolean result (drop null slivers)."""
    import shapely.geometry as sgeom

    if geom.is_empty:
        return sgeom.Polygon()
    if geom.geom_type == "Polygon":
        return geom
    if geom.geom_type == "MultiPolygon":
        return geom
    if geom.geom_type == "GeometryCollection":
        polys = [g for g in geom.geoms if g.geom_type in ("Polygon", "MultiPolygon")]
        if not polys:
            return sgeom.Polygon()
        out = polys[0]
        for g in polys[1:]:
            out = out.union(g)
        return out
    return sgeom.Polygon()  # lower-dimensional result regularizes to empty


def extract_boundary_poly(expr: SetExpr, *, omega: Domain = None,
                          window=None) -> ExplicitBoundary:
    """Segment soup covering the essential boundary of a regularized 2-D CSG
    set (half-planes, disks, boxes under booleans).

    Disks are polygonized with sagitta <= 1e-4 * radius.  Booleans are
    evaluated by an exact arrangement engine and regularized at every node
    (measure-zero slivers dropped), so coincident edges between operands are
    handled rather than rejected; results whose geometry the engine cannot
    regularize raise GeneralPositionError.  Unbounded sets need a window (or
    a box domain); boundary pieces lying on the window frame are clip
    artifacts and are removed.
    """
    if window is None and omega is not None and not omega.is_all_space:
        window = (omega.lo, omega.hi)
    if window is None:
        bb = bounding_box(expr)
        if bb is not None:
            pad = 1e-6 * max(1.0, float(np.max(bb[1] - bb[0])))
            window = (bb[0] - pad, bb[1] + pad)
    geom = _to_shapely(expr, window)
    if not geom.is_valid:
        raise GeneralPositionError("boolean result could not be regularized")

    rings = []
    polys = [geom] if geom.geom_type == "Polygon" else list(getattr(geom, "geoms", []))
    for poly in polys:
        if poly.is_empty:
            continue
        rings.append(np.asarray(poly.exterior.coords))
        for hole in poly.interiors:
            rings.append(np.asarray(hole.coords))

    segments = []
    corners = []
    on_frame = _frame_tester(window)
    for ring in rings:
        v = ring[:-1]  # closed ring: last point repeats the first
        m = v.shape[0]
        for i in range(m):
            p, q = v[i], v[(i + 1) % m]
            if np.allclose(p, q):
                continue
            if on_frame is not None and on_frame(p, q):
                continue
            segments.append((p, q))
            r = v[(i + 2) % m]
            d1, d2 = q - p, r - q
            turn = abs(math.atan2(d1[0] * d2[1] - d1[1] * d2[0], float(d1 @ d2)))
            if turn > CORNER_ANGLE:
                corners.append(q)
    seg_arr = np.asarray(segments, dtype=float).reshape(-1, 2, 2)
    corner_arr = np.asarray(corners, dtype=float).reshape(-1, 2)
    return ExplicitBoundary(kind=POLY_SEGMENTS, dim=2,
                            segments=seg_arr, corners=corner_arr)


def _frame_tester(window):
    """Predicate for segments lying on the clip-window frame (artifacts of
    clipping an unbounded set; they are not part of the boundary)."""
    if window is None:
        return None
    lo, hi = np.asarray(window[0], float), np.asarray(window[1], float)

    def on_frame(p, q) -> bool:
        for axis in range(2):
            for c in (lo[axis], hi[axis]):
                if abs(p[axis] - c) <= 1e-12 and abs(q[axis] - c) <= 1e-12:
                    return True
        return False

    return on_frame
