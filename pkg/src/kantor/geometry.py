"""Ground metrics, dominance directions, and hyperbola/cone predicates.

Everything in this module is a pure function on immutable values, so it is
safe to call from any number of threads and cheap enough for scan loops.
Integer inputs stay integers on the L1 and squared-Euclidean paths; only the
Euclidean metric produces floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

Coord = Union[int, float]


class Point(tuple):
    """A planar point.  Subclasses tuple so points hash and compare cheaply."""

    __slots__ = ()

    def __new__(cls, x: Coord, y: Coord) -> "Point":
        return tuple.__new__(cls, (x, y))

    @property
    def x(self) -> Coord:
        return self[0]

    @property
    def y(self) -> Coord:
        return self[1]

    def __repr__(self) -> str:
        return f"Point({self[0]!r}, {self[1]!r})"


def as_point(p) -> Point:
    if isinstance(p, Point):
        return p
    return Point(p[0], p[1])


class Metric(Enum):
    L1 = "l1"
    SQEUCLID = "sqeuclid"
    EUCLID = "euclid"

    @property
    def integer_valued(self) -> bool:
        """True when integer coordinates always yield integer distances."""
        return self is not Metric.EUCLID

    @property
    def is_metric(self) -> bool:
        """True when the triangle inequality holds.

        The squared Euclidean distance is not a metric; code must never feed
        it to rules that assume the triangle inequality.
        """
        return self is not Metric.SQEUCLID


class Direction(Enum):
    NE = "NE"
    NW = "NW"
    SE = "SE"
    SW = "SW"


# Coordinate signs that reflect each quadrant onto the canonical NE frame.
DIRECTION_SIGNS = {
    Direction.NE: (1, 1),
    Direction.NW: (-1, 1),
    Direction.SE: (1, -1),
    Direction.SW: (-1, -1),
}


def reflect(p: Point, direction: Direction) -> Point:
    """Map a point into the canonical NE frame of the given quadrant."""
    sx, sy = DIRECTION_SIGNS[direction]
    return Point(sx * p[0], sy * p[1])


def distance(metric: Metric, p, q) -> Coord:
    """Ground distance between two points under the chosen metric."""
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    if metric is Metric.L1:
        return abs(dx) + abs(dy)
    if metric is Metric.SQEUCLID:
        return dx * dx + dy * dy
    # sqrt of the explicit square sum: bit-identical to the vectorized
    # np.sqrt(dx*dx + dy*dy) path, which hypot() would not be.
    return math.sqrt(dx * dx + dy * dy)


def _d_l1(x1, y1, x2, y2):
    return abs(x1 - x2) + abs(y1 - y2)


def _d_sq(x1, y1, x2, y2):
    dx = x1 - x2
    dy = y1 - y2
    return dx * dx + dy * dy


def _d_eu(x1, y1, x2, y2, _sqrt=math.sqrt):
    dx = x1 - x2
    dy = y1 - y2
    return _sqrt(dx * dx + dy * dy)


_DIST_FNS = {Metric.L1: _d_l1, Metric.SQEUCLID: _d_sq, Metric.EUCLID: _d_eu}


def dist_fn(metric: Metric) -> Callable[[Coord, Coord, Coord, Coord], Coord]:
    """Coordinate-level distance function for hot loops."""
    return _DIST_FNS[metric]


def is_direction(direction: Direction, anchor, candidate) -> bool:
    """True when `candidate` lies in the closed quadrant of `anchor`.

    The relations are non-exclusive: a point due east of the anchor is both
    NE and SE of it, and a point equal to the anchor satisfies all four.
    """
    ax, ay = anchor[0], anchor[1]
    cx, cy = candidate[0], candidate[1]
    if direction is Direction.NE:
        return ax <= cx and ay <= cy
    if direction is Direction.NW:
        return cx <= ax and ay <= cy
    if direction is Direction.SE:
        return ax <= cx and cy <= ay
    return cx <= ax and cy <= ay


@dataclass(frozen=True)
class HyperbolicSet:
    """Open set of points whose distance gap between two foci stays under a bound.

    Membership: distance(p, focus_b) - distance(p, focus_a) < threshold.
    The distance to `focus_a` is subtracted; the one to `focus_b` enters
    positively.  The set is open (strict inequality).
    """

    focus_a: Point
    focus_b: Point
    threshold: Coord


def hyperbolic_contains(h: HyperbolicSet, metric: Metric, p) -> bool:
    return distance(metric, p, h.focus_b) - distance(metric, p, h.focus_a) < h.threshold


def right_branch_set(a: Coord, b: Coord) -> HyperbolicSet:
    """The ">"-oriented two-focus set {p : d(p,(-a,0)) - d(p,(a,0)) > b}.

    Expressed through the canonical "<" form: negating the defining
    inequality swaps the roles of the foci and the sign of the bound, so the
    set equals HyperbolicSet(focus_a=(-a,0), focus_b=(a,0), threshold=-b).
    For 0 < b < 2a and the Euclidean metric this is the open region on the
    right-focus side of the right hyperbola branch.
    """
    if not a > 0:
        raise ValueError(f"focal half-distance must be positive, got {a}")
    return HyperbolicSet(Point(-a, 0), Point(a, 0), -b)


@dataclass(frozen=True)
class Cone:
    """Right-opening cone: its apex plus every point strictly east of the apex
    whose slope from the apex is at most `slope` in absolute value."""

    apex: Point
    slope: float

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError(f"cone slope must be positive, got {self.slope}")


def cone_contains(cone: Cone, p) -> bool:
    px, py = p[0], p[1]
    ax, ay = cone.apex
    if px == ax and py == ay:
        return True
    if px <= ax:
        return False
    return abs((py - ay) / (px - ax)) <= cone.slope


def asymptote_slope_bound(a: Coord, b: Coord) -> float:
    """Largest cone slope guaranteed to stay inside the right-branch set.

    Equals the asymptote slope sqrt((4a^2 - b^2) / b^2) of the boundary
    hyperbola with focal half-distance `a` and gap bound `b`.
    """
    if not a > 0:
        raise ValueError(f"need a > 0, got a={a}")
    if not 0 < b < 2 * a:
        raise ValueError(f"need 0 < b < 2a, got a={a}, b={b}")
    return math.sqrt((4.0 * a * a - b * b) / (b * b))


def cone_inside_hyp(a: Coord, b: Coord, c: Coord) -> bool:
    """Whether a slope-c cone is guaranteed to stay inside the right-branch set.

    The caller supplies the apex guarantee appropriate to the sign of `b`:
    apex in the closed right half-plane for b < 0, in the open right
    half-plane for b = 0, and anywhere inside the set itself for 0 < b < 2a.
    Under that guarantee the containment holds for b <= 0 regardless of the
    slope, and for positive b exactly when c does not exceed the asymptote
    slope bound.
    """
    if not a > 0:
        raise ValueError(f"need a > 0, got a={a}")
    if not c > 0:
        raise ValueError(f"need c > 0, got c={c}")
    if b >= 2 * a:
        raise ValueError(f"need b < 2a, got a={a}, b={b}")
    if b <= 0:
        return True
    return c <= asymptote_slope_bound(a, b)


def vertical_cut_y2(p0, p1) -> float:
    """Ordinate where the perpendicular bisector of segment p0-p1 crosses x = p0.x.

    Above this height the whole column at p0.x is strictly closer to p1 than
    to p0.  Requires p1 strictly above p0.
    """
    i0, j0 = p0[0], p0[1]
    i1, j1 = p1[0], p1[1]
    if not j1 > j0:
        raise ValueError(f"need j1 > j0, got j0={j0}, j1={j1}")
    return (j0 + j1) / 2 + (i1 - i0) ** 2 / (2 * (j1 - j0))


def vertical_cut_y3(p0, p1) -> float:
    """Ordinate where the doubled-angle ray from p1 crosses the column x = p0.x.

    The ray leaves p1 at twice the inclination of segment p0-p1 measured from
    the horizontal; it only crosses the column when the segment rises steeper
    than 45 degrees, hence the precondition j1-j0 > i1-i0 > 0.
    """
    i0, j0 = p0[0], p0[1]
    i1, j1 = p1[0], p1[1]
    dx = i1 - i0
    dy = j1 - j0
    if not (dy > dx > 0):
        raise ValueError(f"need j1-j0 > i1-i0 > 0, got dx={dx}, dy={dy}")
    return j1 + 2 * dx * dx * dy / (dy * dy - dx * dx)
