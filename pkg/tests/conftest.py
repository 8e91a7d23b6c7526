import math

import numpy as np
import pytest

from crofton.geometry import Line, contains_many
from crofton.intervals import IntervalSet


def sampled_trace(expr, line: Line, t_lo: float, t_hi: float, n: int = 1_000_000) -> IntervalSet:
    """Independent trace oracle: dense pointwise membership sampling.

    Reconstructs the trace on [t_lo, t_hi] from n evenly spaced membership
    probes; endpoint resolution is (t_hi - t_lo) / n.
    """
    ts = np.linspace(t_lo, t_hi, n)
    pts = line.base[None, :] + ts[:, None] * line.tau[None, :]
    member = contains_many(expr, pts)
    padded = np.zeros(member.size + 2, dtype=np.int8)
    padded[1:-1] = member
    flips = np.flatnonzero(np.diff(padded))
    pairs = []
    for j in range(0, flips.size, 2):
        a = ts[flips[j]] if flips[j] > 0 else t_lo
        b = ts[flips[j + 1] - 1] if flips[j + 1] <= member.size else t_hi
        pairs.append((a, b))
    return IntervalSet.from_raw(pairs)


def assert_traces_close(got: IntervalSet, oracle: IntervalSet, tol: float):
    assert len(got) == len(oracle), f"{got.pairs} vs oracle {oracle.pairs}"
    for (a, b), (oa, ob) in zip(got.pairs, oracle.pairs):
        assert a == pytest.approx(oa, abs=tol)
        assert b == pytest.approx(ob, abs=tol)


def random_direction(rng, n: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(n)
        norm = float(np.linalg.norm(v))
        if norm > 1e-6:
            v = v / norm
            return v / float(np.linalg.norm(v))


def quad_disk_area(expr, center, r: float, tol: float = 1e-10) -> float:
    """Adaptive-quadrature oracle for area(expr ∩ disk) in 2-D: integrates the
    measure of the horizontal slice of expr within the disk over y."""
    from scipy.integrate import quad
    from crofton.geometry import Line, trace
    from crofton.intervals import intersect_pairs, measure_pairs

    cx, cy = float(center[0]), float(center[1])

    def width(y):
        half = math.sqrt(max(r * r - (y - cy) ** 2, 0.0))
        if half == 0.0:
            return 0.0
        line = Line.through(np.array([0.0, y]), np.array([1.0, 0.0]))
        tr = trace(expr, line)
        chord = ((cx - half, cx + half),)
        return measure_pairs(intersect_pairs(tr.pairs, chord))

    val, _err = quad(width, cy - r, cy + r, epsabs=tol, epsrel=tol, limit=400)
    return val
