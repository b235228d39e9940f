"""Shared test utilities: independent oracles and instance builders.

Everything here is deliberately definition-based (brute force, pairwise
filters), independent of the library's optimized code paths.
"""

from __future__ import annotations

import random

from kantor import (
    InstanceGenSpec,
    MassPoint,
    Measure,
    Metric,
    Point,
    ProblemInstance,
    random_instance,
)


def measure(pairs) -> Measure:
    return Measure(MassPoint(Point(x, y), m) for (x, y), m in pairs)


def instance(src_pairs, snk_pairs, metric) -> ProblemInstance:
    return ProblemInstance(measure(src_pairs), measure(snk_pairs), metric)


def parents_by_definition(points):
    """O(N^2) definitional parents: for each point, the points SW of it that
    are not SW of any other point SW of it (ordinals in canonical order)."""
    pts = sorted((Point(p[0], p[1]) for p in points), key=lambda p: (p[0] + p[1], p[0]))

    def sw(a, b):  # a SW of b
        return a[0] <= b[0] and a[1] <= b[1]

    out = []
    for i, p in enumerate(pts):
        below = [j for j in range(i) if sw(pts[j], p)]
        if not below:
            out.append((-1,))
            continue
        maximal = [
            j for j in below
            if not any(k != j and sw(pts[j], pts[k]) for k in below)
        ]
        out.append(tuple(sorted(maximal)))
    return pts, out


def random_points(rng: random.Random, n: int, lo: int = 0, hi: int = 40):
    pts = set()
    while len(pts) < n:
        pts.add((rng.randint(lo, hi), rng.randint(lo, hi)))
    return [Point(x, y) for x, y in pts]


def random_solver_spec(seed: int, metric: Metric, max_side: int = 40,
                       coord_range: int = 31, grid_every: int = 2) -> InstanceGenSpec:
    """A mid-size spec with sides in [2, max_side] and feasible mass totals."""
    rng = random.Random(seed)
    ns = rng.randint(2, max_side)
    nm = rng.randint(2, min(max_side, 9 * ns))
    return InstanceGenSpec(
        seed=seed,
        n_sources=ns,
        n_sinks=nm,
        coord_range=coord_range,
        mass_range=(1, 9),
        metric=metric,
        grid=(seed % grid_every == 0),
    )


def random_solver_instance(seed: int, metric: Metric, max_side: int = 40) -> ProblemInstance:
    return random_instance(random_solver_spec(seed, metric, max_side))
