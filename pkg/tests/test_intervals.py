import math
import random

import pytest

from crofton.intervals import (
    INF,
    IntervalSet,
    canonicalize,
    interval_boolean,
    measure,
)


def iset(*pairs):
    return IntervalSet.from_raw(pairs)


class TestCanonicalize:
    def test_merges_touching_at_null_point(self):
        assert canonicalize([(0, 1), (1, 2)]).pairs == ((0, 2),)

    def test_drops_degenerate(self):
        assert canonicalize([(0, 0)]).pairs == ()
        assert canonicalize([(3, 3), (5, 4)]).pairs == ()

    def test_sort_and_overlap_merge(self):
        assert canonicalize([(3, 4), (0, 1), (0.5, 2)]).pairs == ((0, 2), (3, 4))

    def test_idempotent_on_random_raw_lists(self):
        rng = random.Random(20240811)
        for _ in range(300):
            raw = [(rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(rng.randrange(0, 12))]
            if rng.random() < 0.3:
                raw.append((-INF, rng.uniform(-5, 5)))
            once = canonicalize(raw)
            twice = canonicalize(once.pairs)
            assert once.pairs == twice.pairs
            for (a, b) in once.pairs:
                assert a < b
            for k in range(len(once.pairs) - 1):
                assert once.pairs[k][1] < once.pairs[k + 1][0]

    def test_measure_preserved_for_disjoint_raw(self):
        raw = [(0, 1), (2, 2.5), (1, 1)]
        assert canonicalize(raw).measure() == pytest.approx(1.5)


class TestBoolean:
    def test_union_disjoint(self):
        got = interval_boolean(iset((0, 1)), iset((2, 3)), "union")
        assert got.pairs == ((0, 1), (2, 3))

    def test_intersect_overlap(self):
        got = interval_boolean(iset((0, 2)), iset((1, 3)), "intersect")
        assert got.pairs == ((1, 2),)

    def test_subtract_from_full_line(self):
        got = interval_boolean(IntervalSet.full_line(), iset((0, 1)), "subtract")
        assert got.pairs == ((-INF, 0), (1, INF))

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            interval_boolean(iset(), iset(), "xor")

    def test_random_families_match_pointwise_oracle(self):
        # oracle: membership of probe points far from all endpoints
        rng = random.Random(7)
        for _ in range(200):
            a = canonicalize([(rng.uniform(-4, 4), rng.uniform(-4, 4)) for _ in range(4)])
            b = canonicalize([(rng.uniform(-4, 4), rng.uniform(-4, 4)) for _ in range(4)])
            u = a.union(b)
            i = a.intersect(b)
            s = a.subtract(b)
            c = a.complement()
            for _ in range(40):
                t = rng.uniform(-5, 5)
                ina, inb = a.contains(t), b.contains(t)
                near = any(abs(t - e) < 1e-12 for p in (a, b) for ab in p.pairs for e in ab)
                if near:
                    continue
                assert u.contains(t) == (ina or inb)
                assert i.contains(t) == (ina and inb)
                assert s.contains(t) == (ina and not inb)
                assert c.contains(t) == (not ina)


class TestMeasure:
    def test_empty(self):
        assert measure(IntervalSet.empty()) == 0

    def test_finite_sum(self):
        assert measure(iset((0, 1), (2, 3.5))) == pytest.approx(2.5)

    def test_unbounded(self):
        assert measure(iset((0, INF))) == INF
        assert math.isinf(measure(IntervalSet.full_line()))
