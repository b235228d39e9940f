"""Organizes a planar point set as a dominance DAG along the NE-SW diagonal.

A point q is a *parent* of p when q is SW of p and no other point SW of p
dominates q.  Equivalently, the parents of p are the NE-maximal elements of
the set of points SW of p.  A virtual root strictly SW of everything
guarantees each point has at least one parent, so the parent relation forms
a connected directed acyclic graph (edges run from lower to higher ordinal
in the canonical x + y order).

The other three diagonal orientations are obtained by reflecting the
coordinates before building (see geometry.reflect), not by separate code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .geometry import Point, as_point

ROOT = -1  # ordinal standing for the virtual root in parent lists


@dataclass(frozen=True)
class DagIndex:
    points: tuple[Point, ...]              # sorted by x + y, ties by x
    root: Point                            # virtual point strictly SW of all others
    parents: tuple[tuple[int, ...], ...]   # per point; may contain ROOT
    children: tuple[tuple[int, ...], ...]  # per point; real ordinals only
    root_children: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def ordered_points(self) -> tuple[Point, ...]:
        return self.points


def _extremal(candidates: Iterable[int], pts: Sequence[Point], axis: int) -> int:
    """Index with the maximal coordinate on `axis`; ties go to the largest index."""
    best = -1
    best_val = None
    for i in candidates:
        v = pts[i][axis]
        if best_val is None or v >= best_val:
            best_val = v
            best = i
    return best


def _parents_of(pts: Sequence[Point], n: int) -> tuple[int, ...]:
    """Parents of pts[n] among pts[0:n], by shrinking-rectangle refinement.

    The first two parents are the SW points extremal in x and in y.  Further
    parents all lie strictly inside the open rectangle spanned between the
    two newest parents, so the same extremal search recurses there until the
    rectangle is empty.  Open bounds matter: a point on the rectangle edge
    would be dominated by one of the parents that define it.
    """
    px, py = pts[n]
    sw = [i for i in range(n) if pts[i][0] <= px and pts[i][1] <= py]
    if not sw:
        return (ROOT,)
    m1 = _extremal(sw, pts, 0)
    m2 = _extremal(sw, pts, 1)
    if m1 == m2:
        return (m1,)
    parents = [m1, m2]
    lo_x, hi_x = pts[m2][0], pts[m1][0]
    lo_y, hi_y = pts[m1][1], pts[m2][1]
    while True:
        rect = [
            i for i in sw
            if lo_x < pts[i][0] < hi_x and lo_y < pts[i][1] < hi_y
        ]
        if not rect:
            break
        m3 = _extremal(rect, pts, 0)
        m4 = _extremal(rect, pts, 1)
        if m3 == m4:
            parents.append(m3)
            break
        parents.append(m3)
        parents.append(m4)
        lo_x, hi_x = pts[m4][0], pts[m3][0]
        lo_y, hi_y = pts[m3][1], pts[m4][1]
    return tuple(sorted(parents))


def build_index(points: Iterable) -> DagIndex:
    """Index a set of pairwise-distinct points for NE-SW dominance traversal."""
    pts = [as_point(p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points in index input")
    pts.sort(key=lambda p: (p[0] + p[1], p[0]))
    order = tuple(pts)
    if order:
        root = Point(min(p[0] for p in order) - 1, min(p[1] for p in order) - 1)
    else:
        root = Point(-1, -1)
    parents = tuple(_parents_of(order, n) for n in range(len(order)))
    children: list[list[int]] = [[] for _ in order]
    root_children: list[int] = []
    for n, plist in enumerate(parents):
        for q in plist:
            if q == ROOT:
                root_children.append(n)
            else:
                children[q].append(n)
    return DagIndex(
        points=order,
        root=root,
        parents=parents,
        children=tuple(tuple(c) for c in children),
        root_children=tuple(root_children),
    )


def ne_iter(index: DagIndex, anchor) -> Iterator[Point]:
    """Yield every indexed point NE of `anchor`, once each, in nondecreasing
    x + y order (the index's canonical order)."""
    ax, ay = anchor[0], anchor[1]
    for p in index.points:
        if p[0] >= ax and p[1] >= ay:
            yield p
