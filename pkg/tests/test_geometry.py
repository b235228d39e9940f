"""Geometry layer: metrics, directions, hyperbola/cone predicates."""

import math
import random

import pytest

from kantor import (
    Cone,
    Direction,
    HyperbolicSet,
    Metric,
    Point,
    asymptote_slope_bound,
    cone_contains,
    cone_inside_hyp,
    distance,
    hyperbolic_contains,
    is_direction,
    right_branch_set,
    vertical_cut_y2,
    vertical_cut_y3,
)


def test_distance_examples():
    assert distance(Metric.L1, Point(0, 0), Point(3, 4)) == 7
    assert distance(Metric.SQEUCLID, Point(0, 0), Point(3, 4)) == 25
    assert distance(Metric.EUCLID, Point(2, 5), Point(2, 5)) == 0


def test_distance_integer_exactness():
    d = distance(Metric.L1, Point(10**9, -3), Point(-(10**9), 4))
    assert isinstance(d, int) and d == 2 * 10**9 + 7
    d = distance(Metric.SQEUCLID, Point(10**6, 0), Point(0, 1))
    assert isinstance(d, int) and d == 10**12 + 1


def test_distance_symmetry_and_identity():
    rng = random.Random(1)
    for _ in range(2000):
        p = Point(rng.randint(-50, 50), rng.randint(-50, 50))
        q = Point(rng.randint(-50, 50), rng.randint(-50, 50))
        for metric in Metric:
            dpq = distance(metric, p, q)
            assert dpq == distance(metric, q, p)
            assert dpq >= 0
            assert (dpq == 0) == (p == q)


def test_triangle_inequality_holds_for_true_metrics_only():
    rng = random.Random(2)
    for _ in range(10_000):
        pts = [Point(rng.randint(-30, 30), rng.randint(-30, 30)) for _ in range(3)]
        for metric in (Metric.L1, Metric.EUCLID):
            d01 = distance(metric, pts[0], pts[1])
            d12 = distance(metric, pts[1], pts[2])
            d02 = distance(metric, pts[0], pts[2])
            assert d02 <= d01 + d12 + 1e-12
    # squared Euclid violates the triangle inequality (it is not a metric)
    a, b, c = Point(0, 0), Point(1, 0), Point(2, 0)
    assert distance(Metric.SQEUCLID, a, c) > (
        distance(Metric.SQEUCLID, a, b) + distance(Metric.SQEUCLID, b, c)
    )
    assert not Metric.SQEUCLID.is_metric
    assert Metric.L1.is_metric and Metric.EUCLID.is_metric


def test_is_direction_examples():
    assert is_direction(Direction.NE, Point(0, 0), Point(1, 2))
    assert not is_direction(Direction.NE, Point(0, 0), Point(-1, 2))
    assert is_direction(Direction.NE, Point(3, 3), Point(3, 3))


def test_direction_relations_non_exclusive():
    # a point due east of the anchor is both NE and SE of it
    anchor, east = Point(0, 0), Point(5, 0)
    assert is_direction(Direction.NE, anchor, east)
    assert is_direction(Direction.SE, anchor, east)
    # the anchor itself satisfies all four
    for d in Direction:
        assert is_direction(d, anchor, anchor)


def test_direction_definitions():
    rng = random.Random(3)
    for _ in range(500):
        a = Point(rng.randint(-9, 9), rng.randint(-9, 9))
        c = Point(rng.randint(-9, 9), rng.randint(-9, 9))
        assert is_direction(Direction.NE, a, c) == (a.x <= c.x and a.y <= c.y)
        assert is_direction(Direction.NW, a, c) == (c.x <= a.x and a.y <= c.y)
        assert is_direction(Direction.SE, a, c) == (a.x <= c.x and c.y <= a.y)
        assert is_direction(Direction.SW, a, c) == (c.x <= a.x and c.y <= a.y)
        # NE of a from c's viewpoint == SW of c from a's
        assert is_direction(Direction.NE, a, c) == is_direction(Direction.SW, c, a)


def test_right_branch_set_membership_examples():
    # gap-bound set with b < 0 contains the whole closed right half-plane
    assert hyperbolic_contains(right_branch_set(1, -0.5), Metric.EUCLID, Point(0, 10))
    # b = 1.5, a = 1: at (5,0) the gap is 6 - 4 = 2 > 1.5
    assert hyperbolic_contains(right_branch_set(1, 1.5), Metric.EUCLID, Point(5, 0))
    # b = 0: the set is the open right half-plane, so (-5,0) is outside
    assert not hyperbolic_contains(right_branch_set(1, 0), Metric.EUCLID, Point(-5, 0))


def test_hyperbolic_contains_literal_definition():
    h = HyperbolicSet(Point(-1, 0), Point(1, 0), 0.5)
    # membership: d(p, focus_b) - d(p, focus_a) < threshold
    p = Point(-5, 0)
    assert hyperbolic_contains(h, Metric.EUCLID, p) == (6 - 4 < 0.5)
    q = Point(5, 0)
    assert hyperbolic_contains(h, Metric.EUCLID, q) == (4 - 6 < 0.5)


def test_hyperbolic_threshold_monotonicity():
    rng = random.Random(4)
    for _ in range(300):
        fa = Point(rng.uniform(-5, 5), rng.uniform(-5, 5))
        fb = Point(rng.uniform(-5, 5), rng.uniform(-5, 5))
        r1 = rng.uniform(-5, 5)
        r2 = r1 + rng.uniform(0, 5)
        p = Point(rng.uniform(-20, 20), rng.uniform(-20, 20))
        small = HyperbolicSet(fa, fb, r1)
        large = HyperbolicSet(fa, fb, r2)
        if hyperbolic_contains(small, Metric.EUCLID, p):
            assert hyperbolic_contains(large, Metric.EUCLID, p)


def test_asymptote_slope_bound_examples():
    assert asymptote_slope_bound(1, 1) == pytest.approx(math.sqrt(3))
    assert asymptote_slope_bound(2.5, 3) == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        asymptote_slope_bound(1, 2)  # degenerate: b == 2a
    with pytest.raises(ValueError):
        asymptote_slope_bound(1, 0)
    with pytest.raises(ValueError):
        asymptote_slope_bound(1, -0.5)


def test_cone_inside_hyp_examples():
    assert cone_inside_hyp(1, -0.1, 100)
    assert cone_inside_hyp(1, 1, 1.5)   # 1.5 <= sqrt(3)
    assert not cone_inside_hyp(1, 1, 2.0)  # 2.0 > sqrt(3)
    with pytest.raises(ValueError):
        cone_inside_hyp(1, 2.5, 1.0)  # b >= 2a


def test_cone_contains():
    cone = Cone(Point(1, 1), 2.0)
    assert cone_contains(cone, Point(1, 1))      # apex
    assert cone_contains(cone, Point(2, 3))      # slope exactly 2
    assert not cone_contains(cone, Point(2, 3.5))
    assert not cone_contains(cone, Point(0, 1))  # west of apex
    with pytest.raises(ValueError):
        Cone(Point(0, 0), 0.0)


def _gap(a, p):
    return distance(Metric.EUCLID, p, (-a, 0)) - distance(Metric.EUCLID, p, (a, 0))


def test_cone_containment_numeric():
    # cones at the certified slope stay inside the gap-bound set
    rng = random.Random(5)
    for _ in range(300):
        a = rng.uniform(0.5, 5)
        b = rng.uniform(0.05, 1.95) * a
        c = asymptote_slope_bound(a, b)
        x0 = b / 2 + rng.uniform(0.1, 3) * a  # on-axis apex, strictly inside
        apex = Point(x0, 0.0)
        assert _gap(a, apex) > b
        for _ in range(10):
            u = rng.uniform(1e-3, 10 * a)
            lam = rng.uniform(-1, 1)
            p = Point(apex.x + u, apex.y + lam * c * u)
            assert _gap(a, p) > b, (a, b, c, apex, p)


def test_vertical_cut_y2_examples():
    assert vertical_cut_y2(Point(0, 0), Point(0, 2)) == 1
    assert vertical_cut_y2(Point(0, 0), Point(2, 2)) == 2
    assert vertical_cut_y2(Point(0, 0), Point(1, 4)) == pytest.approx(2.125)
    with pytest.raises(ValueError):
        vertical_cut_y2(Point(0, 0), Point(1, 0))
    with pytest.raises(ValueError):
        vertical_cut_y2(Point(0, 2), Point(1, 1))


def test_vertical_cut_y3_examples():
    assert vertical_cut_y3(Point(0, 0), Point(1, 2)) == pytest.approx(10 / 3)
    assert vertical_cut_y3(Point(0, 0), Point(1, 3)) == pytest.approx(3.75)
    with pytest.raises(ValueError):
        vertical_cut_y3(Point(0, 0), Point(2, 2))  # needs dy > dx
    with pytest.raises(ValueError):
        vertical_cut_y3(Point(0, 0), Point(0, 2))  # needs dx > 0
