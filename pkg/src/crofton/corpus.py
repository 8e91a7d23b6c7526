"""Built-in corpus cases and random test-set generators.

The shipped corpus lives as scene files under ``crofton/data`` (users can
copy and extend them); the generators build the randomized families used by
the verification suite: convex polygons (with classical perimeter and
per-direction variation closed forms), rectilinear polygons with holes, and
random / checkerboard rasters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from .geometry import (
    Box,
    Difference,
    Domain,
    HalfSpace,
    Intersection,
    RasterGrid,
    SetExpr,
    Union,
)
from .scenes import Scene, load_scene

CORPUS_NAMES = (
    "unit_square",
    "disk",
    "two_squares",
    "l_shape",
    "square_with_hole",
    "convex_pentagon",
    "empty",
    "ball3",
)


def builtin_corpus(names=None) -> list[Scene]:
    selected = CORPUS_NAMES if names is None else tuple(names)
    out = []
    for name in selected:
        if name not in CORPUS_NAMES:
            raise ValueError(f"unknown corpus case {name!r}; known: {CORPUS_NAMES}")
        ref = resources.files("crofton.data").joinpath(f"{name}.json")
        with resources.as_file(ref) as path:
            out.append(load_scene(path))
    return out


@dataclass(frozen=True)
class GeneratedCase:
    """A randomized corpus case with closed-form reference values."""

    name: str
    expr: SetExpr
    omega: Domain
    perimeter: float
    #: CCW vertices for convex polygons
    vertices: Optional[np.ndarray] = None
    #: (total vertical boundary length, total horizontal) for rectilinear sets
    axis_lengths: Optional[tuple[float, float]] = None

    def p_tau(self, tau) -> float:
        """Closed-form directional variation."""
        tau = np.asarray(tau, dtype=float)
        if self.vertices is not None:
            u = np.array([-tau[1], tau[0]])
            w = self.vertices @ u
            return 2.0 * float(w.max() - w.min())
        if self.axis_lengths is not None:
            v_len, h_len = self.axis_lengths
            return abs(float(tau[0])) * v_len + abs(float(tau[1])) * h_len
        raise ValueError(f"case {self.name} has no directional closed form")


def convex_polygon_case(rng: np.random.Generator, n_vertices: int = 7,
                        name: str = "convex") -> GeneratedCase:
    """Random convex polygon as an intersection of half-planes: vertices on
    a random ellipse at sorted angles are convex by construction."""
    while True:
        ang = np.sort(rng.uniform(0.0, 2.0 * math.pi, n_vertices))
        if np.min(np.diff(ang)) > 0.15 and (2 * math.pi - ang[-1] + ang[0]) > 0.15:
            break
    a, b = rng.uniform(0.5, 1.5, 2)
    center = rng.uniform(-0.3, 0.3, 2)
    verts = center + np.stack([a * np.cos(ang), b * np.sin(ang)], axis=1)
    cons = []
    for i in range(n_vertices):
        p, q = verts[i], verts[(i + 1) % n_vertices]
        nrm = np.array([q[1] - p[1], -(q[0] - p[0])])
        nrm = nrm / float(np.linalg.norm(nrm))
        cons.append(HalfSpace(nrm, float(nrm @ p)))
    perimeter = float(np.sum(np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)))
    return GeneratedCase(name=name, expr=Intersection(tuple(cons)),
                         omega=Domain.all_space(), perimeter=perimeter,
                         vertices=verts)


def rectilinear_case(rng: np.random.Generator, max_holes: int = 3,
                     name: str = "rectilinear") -> GeneratedCase:
    """Outer box minus disjoint inner boxes strictly inside it."""
    outer_lo = rng.uniform(-0.5, 0.0, 2)
    outer_hi = outer_lo + rng.uniform(1.5, 2.5, 2)
    outer = Box(outer_lo, outer_hi)
    n_holes = int(rng.integers(1, max_holes + 1))
    holes: list[Box] = []
    attempts = 0
    while len(holes) < n_holes and attempts < 200:
        attempts += 1
        lo = rng.uniform(outer_lo + 0.15, outer_hi - 0.55, 2)
        hi = lo + rng.uniform(0.2, 0.4, 2)
        if np.any(hi >= outer_hi - 0.1):
            continue
        clear = all(np.any((hi + 0.05 <= h.lo) | (h.hi + 0.05 <= lo)) for h in holes)
        if clear:
            holes.append(Box(lo, hi))
    expr: SetExpr = Difference(outer, Union(tuple(holes))) if holes else outer
    v_len = 2.0 * float(outer_hi[1] - outer_lo[1]) + sum(
        2.0 * float(h.hi[1] - h.lo[1]) for h in holes)
    h_len = 2.0 * float(outer_hi[0] - outer_lo[0]) + sum(
        2.0 * float(h.hi[0] - h.lo[0]) for h in holes)
    return GeneratedCase(name=name, expr=expr, omega=Domain.all_space(),
                         perimeter=v_len + h_len,
                         axis_lengths=(v_len, h_len))


def random_raster(rng: np.random.Generator, dims: tuple[int, ...],
                  density: float = 0.5, spacing: float | None = None,
                  origin=None) -> RasterGrid:
    n = len(dims)
    if spacing is None:
        spacing = 1.0 / max(dims)
    if origin is None:
        origin = np.zeros(n)
    occ = rng.random(dims) < density
    return RasterGrid(origin, spacing, dims, occ)


def checkerboard_raster(m: int, spacing: float | None = None) -> RasterGrid:
    """m x m checkerboard; default spacing 1/m keeps the covered square fixed
    while refinement multiplies the exposed boundary."""
    if spacing is None:
        spacing = 1.0 / m
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    return RasterGrid([0.0, 0.0], spacing, (m, m), (i + j) % 2 == 0)
