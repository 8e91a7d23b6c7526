"""Upper/lower outer density estimation via ball volume fractions.

The density of a set at a point is probed on a geometric radius schedule
r_k = r0 * ratio^k; the limsup/liminf surrogates are the max/min of the
fractions over the schedule's tail window.  Fractions come from an exact
closed-form path whenever `exactarea` provides one, otherwise from a
chord-trace quadrature: the trace of the set along each of a jittered grid
of parallel chords is exact, so only the transversal integration carries
discretization error, and the reported bound covers it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import exactarea
from .errors import InvalidInputError, ScheduleTooFineError
from .geometry import Line, Raster, RasterGrid, SetExpr, contains_many, trace
from .intervals import intersect_pairs, measure_pairs

#: deterministic irrational-fraction offsets for the chord grid, per axis
CHORD_JITTER = (0.5 * (math.sqrt(2.0) - 1.0), 0.5 * (math.sqrt(3.0) - 1.0))

#: transversal chord counts per axis for the quadrature fallback
DEFAULT_CHORDS = {2: 512, 3: 96}


@dataclass(frozen=True)
class RadiusSchedule:
    """Geometric radius schedule r_k = r0 * ratio^k, k = 0..count-1, with the
    last ``window`` radii forming the tail used for the limsup/liminf
    surrogates."""

    r0: float = 1.0
    ratio: float = 0.5
    count: int = 20
    window: int = 6

    def __post_init__(self):
        if not self.r0 > 0:
            raise InvalidInputError("schedule r0 must be > 0")
        if not 0.0 < self.ratio < 1.0:
            raise InvalidInputError("schedule ratio must be in (0, 1)")
        if self.count < 2:
            raise InvalidInputError("schedule needs at least 2 radii")
        if not 1 <= self.window <= self.count:
            raise InvalidInputError("tail window must satisfy 1 <= window <= count")

    def radii(self) -> np.ndarray:
        return self.r0 * self.ratio ** np.arange(self.count)


@dataclass(frozen=True)
class DensityEstimate:
    """Per-radius volume fractions plus tail-window upper/lower surrogates.

    ``upper``/``lower`` approximate the upper/lower outer density; for sets
    whose density genuinely oscillates at small scales they under/over
    approximate the true limsup/liminf (any finite schedule does), which is
    why classification keeps an Uncertain verdict."""

    fractions: tuple[tuple[float, float], ...]
    upper: float
    lower: float
    method: str
    error_bound: float

    def complementary(self) -> "DensityEstimate":
        """Estimate for the complement set: fractions are 1 - f exactly."""
        return DensityEstimate(
            fractions=tuple((r, 1.0 - f) for r, f in self.fractions),
            upper=1.0 - self.lower,
            lower=1.0 - self.upper,
            method=self.method,
            error_bound=self.error_bound,
        )


def ball_volume_fraction(expr: SetExpr, x, r: float, *, method: str = "auto",
                         chords: int | None = None, mc_samples: int = 20000,
                         seed: int = 0) -> tuple[float, float]:
    """m_n(expr ∩ B(x, r)) / m_n(B(x, r)) with a bracketing error bound.

    ``method``: "auto" prefers the exact closed-form path and falls back to
    chord-trace quadrature; "exact"/"quadrature"/"montecarlo" force a path
    ("exact" raises when no closed form applies).
    """
    if not r > 0:
        raise InvalidInputError("ball radius must be > 0")
    x = np.asarray(x, dtype=float)

    if method in ("auto", "exact"):
        f = exactarea.exact_fraction(expr, x, r)
        if f is not None:
            return f, 0.0
        if method == "exact":
            raise InvalidInputError("no exact volume-fraction path for this set")
    if method in ("auto", "quadrature"):
        return _chord_fraction(expr, x, r, chords)
    if method == "montecarlo":
        return _montecarlo_fraction(expr, x, r, mc_samples, seed)
    raise InvalidInputError(f"unknown volume-fraction method {method!r}")


def _chord_fraction(expr: SetExpr, x: np.ndarray, r: float,
                    chords: int | None) -> tuple[float, float]:
    n = x.shape[0]
    m = chords or DEFAULT_CHORDS[n]
    h = 2.0 * r / m
    tau = np.zeros(n)
    tau[-1] = 1.0

    axes = [x[k] - r + (np.arange(m) + CHORD_JITTER[k]) * h for k in range(n - 1)]
    if n == 2:
        us = axes[0][:, None]
    else:
        U, V = np.meshgrid(axes[0], axes[1], indexing="ij")
        us = np.stack([U.ravel(), V.ravel()], axis=1)
    d2 = np.sum((us - x[:-1]) ** 2, axis=1)
    total = 0.0
    cx = float(x[-1])
    for k in range(us.shape[0]):
        if d2[k] >= r * r:
            continue
        half = math.sqrt(r * r - d2[k])
        base = np.append(us[k], 0.0)
        tr = trace(expr, Line(tau, base - float(base @ tau) * tau))
        total += measure_pairs(intersect_pairs(tr.pairs, ((cx - half, cx + half),)))
    volume = total * h ** (n - 1)
    frac = min(max(volume / (exactarea.unit_ball_volume(n) * r ** n), 0.0), 1.0)
    # midpoint-rule heuristic: boundary-scale total variation per transversal
    # axis is of order the ball's own boundary measure, n/r in fraction units
    bound = 4.0 * n * n * h / r
    return frac, min(bound, 1.0)


def _montecarlo_fraction(expr: SetExpr, x: np.ndarray, r: float,
                         samples: int, seed: int) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    n = x.shape[0]
    v = rng.standard_normal((samples, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    radii = r * rng.random(samples) ** (1.0 / n)
    pts = x + v * radii[:, None]
    f = float(np.mean(contains_many(expr, pts)))
    bound = 3.0 * math.sqrt(max(f * (1.0 - f), 1.0 / samples) / samples)
    return f, min(bound, 1.0)


def estimate_density(expr: SetExpr, x, sched: RadiusSchedule = RadiusSchedule(),
                     *, method: str = "auto", chords: int | None = None,
                     mc_samples: int = 20000, seed: int = 0) -> DensityEstimate:
    """Density estimate at x: fractions for every scheduled radius, tail
    max/min as the upper/lower surrogate, worst tail bound as error_bound."""
    radii = sched.radii()
    fractions = []
    bounds = []
    methods = set()
    for r in radii:
        if method == "auto":
            f = exactarea.exact_fraction(expr, np.asarray(x, dtype=float), float(r))
            if f is not None:
                fractions.append((float(r), f))
                bounds.append(0.0)
                methods.add("exact")
                continue
            f, b = _chord_fraction(expr, np.asarray(x, dtype=float), float(r), chords)
            methods.add("quadrature")
        else:
            f, b = ball_volume_fraction(expr, x, float(r), method=method,
                                        chords=chords, mc_samples=mc_samples, seed=seed)
            methods.add(method if method != "auto" else "exact")
        fractions.append((float(r), f))
        bounds.append(b)
    tail = fractions[-sched.window:]
    tail_bounds = bounds[-sched.window:]
    fs = [f for _, f in tail]
    if methods == {"exact"}:
        label = "exact"
    elif "montecarlo" in methods:
        label = "montecarlo"
    else:
        label = "quadrature"
    return DensityEstimate(
        fractions=tuple(fractions),
        upper=max(fs),
        lower=min(fs),
        method=label,
        error_bound=max(tail_bounds),
    )


def density_pair(expr: SetExpr, x, sched: RadiusSchedule = RadiusSchedule(),
                 **kwargs) -> tuple[DensityEstimate, DensityEstimate]:
    """Density estimates for the set and its complement.

    The complement fractions are 1 - f_k exactly (no second integration),
    so per-radius complementarity holds to the bit.
    """
    est = estimate_density(expr, x, sched, **kwargs)
    return est, est.complementary()


@dataclass(frozen=True)
class DensityField:
    """Bulk per-voxel-center density summary over a raster grid."""

    grid_dims: tuple[int, ...]
    upper: np.ndarray
    lower: np.ndarray
    error_bound: float
    method: str

    def rows(self):
        """Yield (flat_index, upper, lower) in first-coordinate-fastest order."""
        u = self.upper.reshape(-1, order="F")
        l = self.lower.reshape(-1, order="F")
        for k in range(u.size):
            yield k, float(u[k]), float(l[k])


def raster_density_field(grid: RasterGrid, sched: RadiusSchedule,
                         *, chords: int | None = None) -> DensityField:
    """Density estimates of the raster set at every voxel center.

    Requires every scheduled radius >= spacing (below that the estimate
    would only see the center's own cell).  Exact in 2-D via per-cell
    disk overlap areas; chord quadrature in 3-D.
    """
    radii = sched.radii()
    if float(np.min(radii)) < grid.spacing:
        raise ScheduleTooFineError(
            f"schedule reaches r = {float(np.min(radii)):g} below spacing {grid.spacing:g}")
    expr = Raster(grid)
    centers = grid.cell_centers()
    tail = radii[-sched.window:]
    fracs = np.empty((centers.shape[0], tail.size))
    worst = 0.0
    exact = grid.dim == 2
    for j, r in enumerate(tail):
        for k in range(centers.shape[0]):
            if exact:
                f = exactarea.exact_fraction(expr, centers[k], float(r))
                b = 0.0
            else:
                f, b = _chord_fraction(expr, centers[k], float(r), chords)
            fracs[k, j] = f
            worst = max(worst, b)
    # cell_centers() lists first coordinate fastest, i.e. Fortran flat order
    upper = fracs.max(axis=1).reshape(grid.dims, order="F")
    lower = fracs.min(axis=1).reshape(grid.dims, order="F")
    return DensityField(grid.dims, upper, lower, worst,
                        "exact" if exact else "quadrature")
