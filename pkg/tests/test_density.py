import math

import numpy as np
import pytest

from crofton.density import (
    RadiusSchedule,
    ball_volume_fraction,
    density_pair,
    estimate_density,
    raster_density_field,
)
from crofton.errors import InvalidInputError, ScheduleTooFineError
from crofton.geometry import (
    Ball,
    Box,
    HalfSpace,
    Raster,
    RasterGrid,
    Union,
)

from conftest import quad_disk_area


def checkerboard_grid(m: int, spacing: float = 1.0) -> RasterGrid:
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    return RasterGrid([0.0, 0.0], spacing, (m, m), (i + j) % 2 == 0)


class TestSchedule:
    def test_defaults(self):
        s = RadiusSchedule()
        assert s.radii()[0] == 1.0
        assert len(s.radii()) == 20
        assert s.radii()[1] == 0.5

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            RadiusSchedule(r0=-1)
        with pytest.raises(InvalidInputError):
            RadiusSchedule(ratio=1.5)
        with pytest.raises(InvalidInputError):
            RadiusSchedule(count=1)
        with pytest.raises(InvalidInputError):
            RadiusSchedule(window=25)


class TestBallVolumeFraction:
    def test_halfspace_through_point_is_half(self):
        hs = HalfSpace([0.6, 0.8], 0.0)
        f, b = ball_volume_fraction(hs, [0.0, 0.0], 0.3)
        assert f == pytest.approx(0.5, abs=1e-12)
        assert b == 0.0

    def test_interior_ball(self):
        f, _ = ball_volume_fraction(Ball([0, 0], 1.0), [0.0, 0.0], 0.4)
        assert f == pytest.approx(1.0, abs=1e-12)

    def test_box_corner_quarter(self):
        f, _ = ball_volume_fraction(Box([0, 0], [1, 1]), [0.0, 0.0], 0.1)
        assert f == pytest.approx(0.25, abs=1e-12)

    def test_invalid_radius(self):
        with pytest.raises(InvalidInputError):
            ball_volume_fraction(Ball([0, 0], 1.0), [0, 0], 0.0)

    def test_quadrature_within_reported_bound_of_exact(self):
        rng = np.random.default_rng(99)
        for _ in range(25):
            kind = rng.integers(0, 3)
            if kind == 0:
                v = rng.standard_normal(2)
                v /= np.linalg.norm(v)
                expr = HalfSpace(v, rng.uniform(-0.5, 0.5))
            elif kind == 1:
                expr = Ball(rng.uniform(-1, 1, 2), rng.uniform(0.3, 1.2))
            else:
                lo = rng.uniform(-1.5, 0.5, 2)
                expr = Box(lo, lo + rng.uniform(0.3, 2.0, 2))
            x = rng.uniform(-1, 1, 2)
            r = rng.uniform(0.1, 1.0)
            fe, _ = ball_volume_fraction(expr, x, r, method="exact")
            fq, bq = ball_volume_fraction(expr, x, r, method="quadrature")
            assert abs(fq - fe) <= bq

    def test_montecarlo_seeded_and_sane(self):
        hs = HalfSpace([1.0, 0.0], 0.0)
        f1, b1 = ball_volume_fraction(hs, [0, 0], 1.0, method="montecarlo", seed=5)
        f2, _ = ball_volume_fraction(hs, [0, 0], 1.0, method="montecarlo", seed=5)
        assert f1 == f2
        assert abs(f1 - 0.5) <= b1

    def test_3d_quadrature_against_cap(self):
        hs = HalfSpace([0.0, 0.0, 1.0], 0.1)
        fe, _ = ball_volume_fraction(hs, [0.0, 0.0, 0.0], 0.5, method="exact")
        fq, bq = ball_volume_fraction(hs, [0.0, 0.0, 0.0], 0.5, method="quadrature")
        assert abs(fq - fe) <= bq


class TestEstimateDensity:
    def test_density_point(self):
        est = estimate_density(Ball([0, 0], 1.0), [0.0, 0.0])
        assert est.upper == pytest.approx(1.0, abs=1e-12)
        assert est.lower == pytest.approx(1.0, abs=1e-12)
        assert est.method == "exact"

    def test_edge_midpoint_half(self):
        est = estimate_density(Box([0, 0], [1, 1]), [0.5, 0.0])
        assert est.upper == pytest.approx(0.5, abs=1e-12)
        assert est.lower == pytest.approx(0.5, abs=1e-12)

    def test_corner_quarter(self):
        est = estimate_density(Box([0, 0], [1, 1]), [0.0, 0.0])
        assert est.upper == pytest.approx(0.25, abs=1e-12)
        assert est.lower == pytest.approx(0.25, abs=1e-12)

    def test_ordering_invariant(self):
        rng = np.random.default_rng(12)
        expr = Union((Ball([0, 0], 0.8), Box([0.5, 0.5], [2, 2])))
        for _ in range(20):
            est = estimate_density(expr, rng.uniform(-1, 2, 2))
            assert 0.0 <= est.lower <= est.upper <= 1.0

    def test_scale_equivariance(self):
        expr = Box([0, 0], [1, 1])
        x = np.array([0.0, 0.3])
        base = estimate_density(expr, x)
        for s in (0.5, 2.0):
            scaled = Box([0, 0], [s, s])
            est = estimate_density(scaled, s * x, RadiusSchedule(r0=s))
            for (_, f0), (_, f1) in zip(base.fractions, est.fractions):
                assert f1 == pytest.approx(f0, abs=1e-12)

    def test_monotone_under_union(self):
        rng = np.random.default_rng(13)
        a = Ball([0, 0], 0.8)
        b = Union((a, Box([2, 2], [3, 3])))
        for _ in range(10):
            x = rng.uniform(-1, 3, 2)
            ea = estimate_density(a, x)
            eb = estimate_density(b, x)
            for (_, fa), (_, fb) in zip(ea.fractions, eb.fractions):
                assert fa <= fb + 2 * max(ea.error_bound, eb.error_bound) + 1e-12


class TestDensityPair:
    def test_halfplane_boundary(self):
        ea, ec = density_pair(HalfSpace([1.0, 0.0], 0.0), [0.0, 0.7])
        assert ea.upper == pytest.approx(0.5, abs=1e-12)
        assert ec.upper == pytest.approx(0.5, abs=1e-12)

    def test_interior(self):
        ea, ec = density_pair(Ball([0, 0], 1.0), [0.0, 0.0])
        assert (ea.upper, ec.upper) == (pytest.approx(1.0), pytest.approx(0.0))

    def test_corner(self):
        ea, ec = density_pair(Box([0, 0], [1, 1]), [0.0, 0.0])
        assert ea.upper == pytest.approx(0.25, abs=1e-12)
        assert ec.upper == pytest.approx(0.75, abs=1e-12)

    def test_per_radius_complementarity_exact(self):
        rng = np.random.default_rng(14)
        expr = Union((Ball([0.3, 0.1], 0.6), Box([1.0, -0.5], [2.0, 0.5])))
        for _ in range(10):
            ea, ec = density_pair(expr, rng.uniform(-1, 2, 2))
            for (_, fa), (_, fc) in zip(ea.fractions, ec.fractions):
                assert fa + fc == 1.0  # exact, by construction


class TestRasterDensityField:
    def test_all_ones_interior(self):
        grid = RasterGrid([0, 0], 1.0, (8, 8), np.ones((8, 8), dtype=bool))
        sched = RadiusSchedule(r0=2.0, ratio=0.5, count=2, window=2)
        field = raster_density_field(grid, sched)
        assert field.upper[4, 4] == pytest.approx(1.0, abs=1e-12)
        assert field.lower[4, 4] == pytest.approx(1.0, abs=1e-12)

    def test_schedule_too_fine(self):
        grid = RasterGrid([0, 0], 1.0, (4, 4), np.ones((4, 4), dtype=bool))
        with pytest.raises(ScheduleTooFineError):
            raster_density_field(grid, RadiusSchedule(r0=1.0, ratio=0.5, count=3, window=2))

    def test_checkerboard_tends_to_half(self):
        # oracle: exact black-cell area inside the disk, by adaptive quadrature
        grid = checkerboard_grid(16)
        sched = RadiusSchedule(r0=8.0, ratio=0.5, count=3, window=3)
        field = raster_density_field(grid, sched)
        center_cell = (8, 8)
        x = grid.origin + (np.array(center_cell) + 0.5) * grid.spacing
        expr = Raster(grid)
        for r in sched.radii():
            oracle = quad_disk_area(expr, x, float(r)) / (math.pi * r * r)
            est = [f for (rr, f) in
                   estimate_density(expr, x, sched).fractions if rr == r]
            assert est[0] == pytest.approx(oracle, abs=2e-6)
        assert abs(field.upper[center_cell] - 0.5) < 0.06

    def test_half_filled_dividing_face(self):
        occ = np.zeros((8, 8), dtype=bool)
        occ[:4, :] = True
        grid = RasterGrid([0, 0], 1.0, (8, 8), occ)
        x = np.array([4.0, 4.0])  # on the dividing face, mid-height
        est = estimate_density(Raster(grid), x,
                               RadiusSchedule(r0=2.0, ratio=0.5, count=2, window=2))
        assert est.upper == pytest.approx(0.5, abs=1e-12)
        assert est.lower == pytest.approx(0.5, abs=1e-12)
