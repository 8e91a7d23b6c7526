import math

import numpy as np
import pytest

from crofton.errors import InvalidInputError
from crofton.geometry import (
    Ball,
    Box,
    Complement,
    Difference,
    Domain,
    HalfSpace,
    Intersection,
    Line,
    Raster,
    RasterGrid,
    Union,
    bounding_box,
    contains,
    contains_many,
    raster_faces,
    trace,
)
from crofton.intervals import INF, interval_boolean

from conftest import assert_traces_close, random_direction, sampled_trace


def unit_square():
    return Box([0.0, 0.0], [1.0, 1.0])


def x_line(y: float) -> Line:
    return Line.through([0.0, y], [1.0, 0.0])


class TestConstruction:
    def test_ball_radius_positive(self):
        with pytest.raises(InvalidInputError):
            Ball([0, 0], 0.0)

    def test_box_strictly_ordered(self):
        with pytest.raises(InvalidInputError):
            Box([0, 0], [1, 0])

    def test_halfspace_unit_normal(self):
        with pytest.raises(InvalidInputError):
            HalfSpace([1, 1], 0.0)

    def test_line_requires_unit_direction(self):
        with pytest.raises(InvalidInputError):
            Line([2, 0], [0, 0])

    def test_line_base_transversal(self):
        with pytest.raises(InvalidInputError):
            Line([1, 0], [1.0, 1.0])
        line = Line.through([3.5, 1.0], [1.0, 0.0])
        assert line.base == pytest.approx([0.0, 1.0])

    def test_raster_payload_length(self):
        with pytest.raises(InvalidInputError):
            RasterGrid([0, 0], 1.0, (2, 2), np.ones(3, dtype=bool))


class TestContains:
    def test_ball_center(self):
        assert contains(Ball([0, 0], 1.0), [0, 0]) is True

    def test_box_half_open_excludes_hi_face(self):
        assert contains(unit_square(), [1.0, 0.5]) is False
        assert contains(unit_square(), [0.0, 0.5]) is True

    def test_union_second_operand(self):
        u = Union((Ball([0, 0], 1.0), Box([2, 2], [3, 3])))
        assert contains(u, [2.5, 2.5]) is True

    def test_complement_negates(self):
        rng = np.random.default_rng(3)
        expr = Union((Ball([0, 0], 1.0), Box([0.5, 0.5], [2, 2])))
        pts = rng.uniform(-2, 3, size=(500, 2))
        inside = contains_many(expr, pts)
        flipped = contains_many(Complement(expr), pts)
        assert np.array_equal(inside, ~flipped)

    def test_raster_cells_half_open(self):
        grid = RasterGrid([0, 0], 1.0, (2, 1), np.array([[True], [False]]))
        r = Raster(grid)
        assert contains(r, [0.0, 0.0]) is True
        assert contains(r, [1.0, 0.0]) is False  # second cell unoccupied
        assert contains(r, [-1e-9, 0.5]) is False  # outside raster bounds


class TestTrace:
    def test_ball_unit_chord(self):
        got = trace(Ball([0.0, 0.0], 1.0), x_line(0.0))
        assert got.pairs == ((-1.0, 1.0),)

    def test_box_slab(self):
        got = trace(unit_square(), x_line(0.5))
        assert got.pairs == ((0.0, 1.0),)

    def test_difference_two_runs_matches_dense_sampling(self):
        expr = Difference(Box([0.0, 0.0], [3.0, 1.0]), Box([1.0, 0.0], [2.0, 1.0]))
        line = x_line(0.5)
        got = trace(expr, line)
        assert got.pairs == ((0.0, 1.0), (2.0, 3.0))
        oracle = sampled_trace(expr, line, -1.0, 4.0, n=1_000_000)
        assert_traces_close(got, oracle, tol=1e-5)

    def test_tangent_line_is_null(self):
        assert trace(Ball([0.0, 0.0], 1.0), x_line(1.0)).is_empty

    def test_line_inside_halfspace_boundary_is_empty(self):
        hs = HalfSpace([0.0, 1.0], 0.0)
        assert trace(hs, x_line(0.0)).is_empty
        assert trace(hs, x_line(-0.5)).pairs == ((-INF, INF),)
        assert trace(hs, x_line(0.5)).is_empty

    def test_halfspace_ray(self):
        hs = HalfSpace([1.0, 0.0], 2.0)
        assert trace(hs, x_line(0.0)).pairs == ((-INF, 2.0),)

    def test_non_unit_direction_rejected(self):
        with pytest.raises(InvalidInputError):
            trace(unit_square(), Line([0.5, 0.5], [0.0, 0.0]))


class TestTraceProperties:
    def _random_leaf(self, rng):
        kind = rng.integers(0, 3)
        if kind == 0:
            return Ball(rng.uniform(-1.5, 1.5, 2), rng.uniform(0.3, 1.2))
        if kind == 1:
            lo = rng.uniform(-2, 1, 2)
            return Box(lo, lo + rng.uniform(0.2, 2.0, 2))
        return HalfSpace(random_direction(rng, 2), rng.uniform(-1, 1))

    def test_boolean_homomorphism_exact(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            a = self._random_leaf(rng)
            b = self._random_leaf(rng)
            line = Line.through(rng.uniform(-2, 2, 2), random_direction(rng, 2))
            ta, tb = trace(a, line), trace(b, line)
            assert trace(Union((a, b)), line).pairs == interval_boolean(ta, tb, "union").pairs
            assert trace(Intersection((a, b)), line).pairs == interval_boolean(ta, tb, "intersect").pairs
            assert trace(Difference(a, b), line).pairs == interval_boolean(ta, tb, "subtract").pairs

    def test_trace_measure_bounded_by_diameter(self):
        rng = np.random.default_rng(5)
        expr = Union((Ball([0, 0], 1.0), Box([1, 1], [2.5, 2.0])))
        lo, hi = bounding_box(expr)
        diam = float(np.linalg.norm(hi - lo))
        for _ in range(100):
            line = Line.through(rng.uniform(-2, 3, 2), random_direction(rng, 2))
            assert trace(expr, line).measure() <= diam + 1e-12

    def test_contains_and_trace_agree(self):
        rng = np.random.default_rng(11)
        exprs = [
            Ball([0.2, -0.1], 0.9),
            Difference(Box([0, 0], [3, 1]), Box([1, 0], [2, 1])),
            Union((Ball([0, 0], 0.7), Box([0.5, -1], [2, 0.5]))),
            Complement(Ball([0.3, 0.3], 1.1)),
        ]
        for expr in exprs:
            hits = 0
            for _ in range(1000):
                line = Line.through(rng.uniform(-2, 2, 2), random_direction(rng, 2))
                t = float(rng.uniform(-3, 3))
                tr = trace(expr, line)
                if any(abs(t - e) <= 1e-9 for e in tr.endpoints()):
                    continue
                hits += 1
                assert tr.contains(t) == contains(expr, line.point_at(t))
            assert hits > 900


class TestRasterTrace:
    def _random_grid(self, rng, dims=(12, 9)):
        occ = rng.random(dims) < 0.5
        return RasterGrid([-0.75, -0.5], 0.125, dims, occ)

    def test_axis_aligned_runs(self):
        occ = np.zeros((4, 1), dtype=bool)
        occ[[0, 2], 0] = True
        grid = RasterGrid([0.0, 0.0], 1.0, (4, 1), occ)
        got = trace(Raster(grid), x_line(0.5))
        assert got.pairs == ((0.0, 1.0), (2.0, 3.0))

    def test_oblique_matches_dense_sampling(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            grid = self._random_grid(rng)
            expr = Raster(grid)
            line = Line.through(rng.uniform(-1, 1, 2), random_direction(rng, 2))
            got = trace(expr, line)
            oracle = sampled_trace(expr, line, -3.0, 3.0, n=600_000)
            assert_traces_close(got, oracle, tol=6.0 / 600_000 * 4)

    def test_axis_path_matches_dense_sampling(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            grid = self._random_grid(rng)
            expr = Raster(grid)
            y = float(rng.uniform(-0.4, 0.5))
            line = x_line(y)
            got = trace(expr, line)
            oracle = sampled_trace(expr, line, -2.0, 2.0, n=400_000)
            assert_traces_close(got, oracle, tol=4.0 / 400_000 * 4)

    def test_volume_consistency_exact_on_dyadic_grid(self):
        # grid-aligned line family through cell centers; dyadic origin/spacing
        # keeps every intermediate value exactly representable
        rng = np.random.default_rng(29)
        dims = (16, 8)
        occ = rng.random(dims) < 0.5
        grid = RasterGrid([-1.0, 0.5], 0.25, dims, occ)
        expr = Raster(grid)
        total = 0.0
        for j in range(dims[1]):
            y = grid.origin[1] + (j + 0.5) * grid.spacing
            total += trace(expr, x_line(y)).measure() * grid.spacing
        expected = int(occ.sum()) * grid.spacing ** 2
        assert total == expected


class TestBoundingBox:
    def test_ball(self):
        lo, hi = bounding_box(Ball([1.0, 2.0], 0.5))
        assert lo == pytest.approx([0.5, 1.5])
        assert hi == pytest.approx([1.5, 2.5])

    def test_union_hull(self):
        lo, hi = bounding_box(Union((unit_square(), Box([2, 2], [3, 3]))))
        assert lo == pytest.approx([0, 0])
        assert hi == pytest.approx([3, 3])

    def test_complement_unbounded(self):
        assert bounding_box(Complement(Ball([0, 0], 1.0))) is None
        assert bounding_box(HalfSpace([1.0, 0.0], 0.0)) is None

    def test_difference_uses_left(self):
        lo, hi = bounding_box(Difference(unit_square(), Ball([0, 0], 5.0)))
        assert lo == pytest.approx([0, 0])
        assert hi == pytest.approx([1, 1])


class TestRasterFaces:
    def test_single_voxel_has_2n_faces(self):
        grid = RasterGrid([0, 0], 1.0, (1, 1), np.ones((1, 1), dtype=bool))
        faces = raster_faces(grid)
        assert sum(f["coord"].size for f in faces) == 4

    def test_counts_match_bruteforce_neighbor_scan(self):
        rng = np.random.default_rng(31)
        occ = rng.random((7, 5)) < 0.5
        grid = RasterGrid([0, 0], 0.5, (7, 5), occ)
        faces = raster_faces(grid)
        # oracle: scan all 4-neighbor interfaces including the outer hull
        expected = 0
        padded = np.zeros((9, 7), dtype=int)
        padded[1:-1, 1:-1] = occ
        expected += np.count_nonzero(np.diff(padded, axis=0))
        expected += np.count_nonzero(np.diff(padded, axis=1))
        assert sum(f["coord"].size for f in faces) == expected
