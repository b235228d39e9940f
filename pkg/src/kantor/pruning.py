"""Search-reduction rules for the admissible-arc scan.

Every rule here is a *stopping criterion*: given feasible duals under which
each source and sink has at least one tight arc, a rule may certify that a
whole region of sink positions has slack above some level, letting the scan
skip it.  Rules never change the answer: `enumerate_admissible` must return
exactly the set an exhaustive scan returns, and the test suite enforces that
set equality at every dual state the solver reaches.

Rule applicability by metric:

* L1 (exact arithmetic): one NE-region rule driven by any low sink.
* squared Euclidean (exact arithmetic): per-line stops from slack
  comparisons, plus an NE-region rule that needs an admissible partner
  source dominating the anchor.
* Euclidean (float arithmetic): an eastward-ray rule on the anchor's own
  line, per-line ray stops, and NE-region rules with column cut-offs, all
  guarded so float noise can never cause an unsound exclusion.

Scans over the NW, SE and SW quadrants reuse the NE-frame rules by
reflecting coordinates (all three metrics are reflection invariant).
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import FeasibilityError, PreconditionError
from .geometry import (
    DIRECTION_SIGNS,
    Direction,
    HyperbolicSet,
    Metric,
    Point,
    as_point,
    asymptote_slope_bound,
    dist_fn,
    distance,
    is_direction,
    vertical_cut_y2,
    vertical_cut_y3,
)

# Float-noise policy for Euclidean-mode rules, in units of the admissibility
# tolerance: excluded regions certify slack > LEVEL_FACTOR*eps (safely above
# the admissibility band), and a rule only fires when its decisive quantities
# clear GUARD_FACTOR*eps.
GUARD_FACTOR = 10.0
LEVEL_FACTOR = 2.0


@dataclass
class PruneCounters:
    """Scan instrumentation.  examined + skipped equals the number of
    candidates the scanned quadrants contained."""

    candidates_examined: int = 0
    candidates_skipped: int = 0
    line_stops: int = 0
    vertical_stops: int = 0
    region_exclusions: int = 0

    def add(self, other: "PruneCounters") -> None:
        self.candidates_examined += other.candidates_examined
        self.candidates_skipped += other.candidates_skipped
        self.line_stops += other.line_stops
        self.vertical_stops += other.vertical_stops
        self.region_exclusions += other.region_exclusions

    @property
    def total_candidates(self) -> int:
        return self.candidates_examined + self.candidates_skipped

    def as_dict(self) -> dict:
        return {
            "candidates_examined": self.candidates_examined,
            "candidates_skipped": self.candidates_skipped,
            "line_stops": self.line_stops,
            "vertical_stops": self.vertical_stops,
            "region_exclusions": self.region_exclusions,
        }


@dataclass(frozen=True)
class ExclusionRegion:
    """A region of sink positions certified to have slack above `level`.

    `level_strict` tells whether the certificate is "slack > level" (True)
    or "slack >= level" (False).  Geometry is stored in the reflected frame
    named by `quadrant`; `contains` reflects query points accordingly.

    Kinds:
      ne_of_point     closed NE quadrant of `corner`
      le_ray          eastward ray from `corner` (same line)
      column_above_y  all x >= corner.x on lines above corner.y
                      (at or above when `cut_inclusive`)
      hyperbolic      membership in `hyp` under the ground metric
    """

    kind: str
    level: float
    level_strict: bool = True
    quadrant: Direction = Direction.NE
    corner: Optional[Point] = None
    cut_inclusive: bool = False
    hyp: Optional[HyperbolicSet] = None

    def contains(self, p, metric: Optional[Metric] = None) -> bool:
        sx, sy = DIRECTION_SIGNS[self.quadrant]
        qx, qy = sx * p[0], sy * p[1]
        if self.kind == "ne_of_point":
            return qx >= self.corner[0] and qy >= self.corner[1]
        if self.kind == "le_ray":
            return qy == self.corner[1] and qx >= self.corner[0]
        if self.kind == "column_above_y":
            if qx < self.corner[0]:
                return False
            return qy >= self.corner[1] if self.cut_inclusive else qy > self.corner[1]
        if self.kind == "hyperbolic":
            if metric is None:
                raise ValueError("hyperbolic region membership needs the metric")
            return (
                distance(metric, (qx, qy), self.hyp.focus_b)
                - distance(metric, (qx, qy), self.hyp.focus_a)
                < self.hyp.threshold
            )
        raise ValueError(f"unknown region kind {self.kind!r}")


class PartnerIndex:
    """Maps a sink ordinal to sources currently holding a tight arc to it.

    With feasible solver duals every sink has at least one such source, so a
    cache miss falls back to a column scan that cannot fail.  Entries go
    stale only when a dual update kills the cached arc; the accessor detects
    that and repairs the entry.
    """

    def __init__(self, source_positions, sink_positions, metric: Metric, epsilon: float = 0.0):
        self._sx = [p[0] for p in source_positions]
        self._sy = [p[1] for p in source_positions]
        self._tx = [p[0] for p in sink_positions]
        self._ty = [p[1] for p in sink_positions]
        self._dist = dist_fn(metric)
        self._eps = epsilon
        self._cache: dict[int, int] = {}
        self._by_pos = {(x, y): n for n, (x, y) in enumerate(zip(self._sx, self._sy))}

    def source_xy(self, n: int):
        return self._sx[n], self._sy[n]

    def note(self, m: int, n: int) -> None:
        self._cache[m] = n

    def _admissible(self, n: int, m: int, alpha, beta) -> bool:
        s = (self._dist(self._sx[n], self._sy[n], self._tx[m], self._ty[m]) - alpha[n]) - beta[m]
        if s < -self._eps:
            raise FeasibilityError(f"negative slack {s} on arc ({n}, {m})")
        return s <= self._eps

    def partners_for(self, m: int, alpha, beta) -> list[int]:
        """Admissible partner candidates for sink m, cheapest first.

        Order: the source sharing the sink's position (when tight), the
        cached incumbent, then a full column scan only if both miss.
        """
        out: list[int] = []
        n = self._by_pos.get((self._tx[m], self._ty[m]))
        if n is not None and self._admissible(n, m, alpha, beta):
            out.append(n)
        n = self._cache.get(m)
        if n is not None and n not in out and self._admissible(n, m, alpha, beta):
            out.append(n)
        if not out:
            for n in range(len(self._sx)):
                if self._admissible(n, m, alpha, beta):
                    out.append(n)
                    break
        if out:
            self._cache[m] = out[0]
        return out


@dataclass
class ScanContext:
    """Per-anchor scan state: the anchor source, a read view of the duals,
    the metric/tolerance under which slacks are judged, and counters.

    Invariant assumed by every rule: the duals are feasible and every source
    and sink has an admissible arc (the solver maintains this from
    initialization onward).
    """

    anchor: Point
    alpha_anchor: float
    duals: object
    metric: Metric
    epsilon: float = 0.0
    counters: PruneCounters = field(default_factory=PruneCounters)
    quadrant: Direction = Direction.NE
    partners: Optional[PartnerIndex] = None
    anchor_ordinal: int = -1

    @classmethod
    def for_anchor(cls, duals, metric, anchor, *, epsilon=0.0, partners=None, counters=None):
        anchor = as_point(anchor)
        if anchor not in duals.source_index:
            raise PreconditionError(f"anchor {anchor} is not a source of the dual state")
        n = duals.source_index[anchor]
        return cls(
            anchor=anchor,
            alpha_anchor=duals.alpha[n],
            duals=duals,
            metric=metric,
            epsilon=epsilon,
            counters=counters if counters is not None else PruneCounters(),
            partners=partners,
            anchor_ordinal=n,
        )


class SinkScanner:
    """Sink support organized for line-by-line quadrant scans: one view per
    reflection, each grouping sinks by line (equal y) with x sorted."""

    __slots__ = ("points", "_views", "_view_list")

    def __init__(self, points: Iterable):
        self.points = [as_point(p) for p in points]
        self._views = {}
        self._view_list = []
        for d, (sx, sy) in DIRECTION_SIGNS.items():
            lines: dict = {}
            for m, p in enumerate(self.points):
                lines.setdefault(sy * p[1], []).append((sx * p[0], m))
            ys = sorted(lines)
            xs_lists = []
            ord_lists = []
            for yv in ys:
                entries = sorted(lines[yv])
                xs_lists.append([e[0] for e in entries])
                ord_lists.append([e[1] for e in entries])
            self._views[d] = (ys, xs_lists, ord_lists)
            self._view_list.append((d, sx, sy, ys, xs_lists, ord_lists))

    def view(self, direction: Direction):
        return self._views[direction]

    def __len__(self) -> int:
        return len(self.points)


def _as_scanner(sinks) -> SinkScanner:
    if isinstance(sinks, SinkScanner):
        return sinks
    pts = getattr(sinks, "points", sinks)  # DagIndex or a raw point sequence
    return SinkScanner(pts)


# ---------------------------------------------------------------------------
# Rule operations (canonical NE frame; the quadrant scanner reflects first).
# ---------------------------------------------------------------------------

def _require(cond: bool, message: str) -> None:
    if not cond:
        raise PreconditionError(message)


def _require_ne_frame(ctx: ScanContext) -> None:
    _require(
        ctx.quadrant is Direction.NE,
        "rule operations take the canonical NE frame; reflect coordinates first",
    )


def _sink_ordinal(ctx: ScanContext, sink) -> int:
    p = as_point(sink)
    if p not in ctx.duals.sink_index:
        raise PreconditionError(f"{p} is not a sink of the dual state")
    return ctx.duals.sink_index[p]


def _slack_to(ctx: ScanContext, sink) -> float:
    m = _sink_ordinal(ctx, sink)
    d = distance(ctx.metric, ctx.anchor, sink)
    return (d - ctx.alpha_anchor) - ctx.duals.beta[m]


def _source_sink_slack(ctx: ScanContext, source, sink) -> float:
    p = as_point(source)
    if p not in ctx.duals.source_index:
        raise PreconditionError(f"{p} is not a source of the dual state")
    n = ctx.duals.source_index[p]
    m = _sink_ordinal(ctx, sink)
    d = distance(ctx.metric, source, sink)
    return (d - ctx.duals.alpha[n]) - ctx.duals.beta[m]


def _sink_has_admissible_arc(ctx: ScanContext, sink) -> bool:
    m = _sink_ordinal(ctx, sink)
    beta_m = ctx.duals.beta[m]
    for p, n in ctx.duals.source_index.items():
        s = (distance(ctx.metric, p, sink) - ctx.duals.alpha[n]) - beta_m
        if abs(s) <= ctx.epsilon:
            return True
    return False


def thm1_l1_ne_exclude(ctx: ScanContext, low_sink) -> ExclusionRegion:
    """L1 rule: a low sink that has an admissible arc and dominates the anchor
    drags its entire closed NE quadrant into the low set."""
    _require_ne_frame(ctx)
    _require(ctx.metric is Metric.L1, "rule applies to the L1 metric only")
    low_sink = as_point(low_sink)
    _require(is_direction(Direction.NE, ctx.anchor, low_sink), "sink must be NE of the anchor")
    s = _slack_to(ctx, low_sink)
    _require(s > ctx.epsilon, f"sink must be low w.r.t. the anchor (slack {s})")
    _require(_sink_has_admissible_arc(ctx, low_sink), "sink must have an admissible arc")
    return ExclusionRegion(kind="ne_of_point", level=0.0, level_strict=True, corner=low_sink)


def thm2_sq_line_stop(ctx: ScanContext, y_line, scanned: Iterable) -> bool:
    """Squared-Euclid per-line stop.

    `scanned` holds (x, slack) pairs for sinks on the line y = y_line east of
    the anchor column, in increasing x.  Returns True once the rest of the
    line is provably low: either a second low sink at least as slack as an
    earlier one, or any low sink after an admissible one.
    """
    _require_ne_frame(ctx)
    _require(ctx.metric is Metric.SQEUCLID, "rule applies to the squared Euclidean metric only")
    eps = ctx.epsilon
    min_low = None
    seen_adm = False
    last_x = None
    for x, s in scanned:
        _require(x >= ctx.anchor[0], "scan must start east of the anchor column")
        _require(last_x is None or x > last_x, "scan must move east")
        last_x = x
        if s <= eps:
            seen_adm = True
            continue
        if min_low is not None and s >= min_low:
            return True
        if seen_adm:
            return True
        if min_low is None or s < min_low:
            min_low = s
    return False


def thm3_sq_vertical_stop(ctx: ScanContext, x1y1, partner) -> ExclusionRegion:
    """Squared-Euclid NE-region rule: a non-admissible sink whose admissible
    partner source also dominates the anchor makes everything NE of the sink
    at least as slack as the sink itself."""
    _require_ne_frame(ctx)
    _require(ctx.metric is Metric.SQEUCLID, "rule applies to the squared Euclidean metric only")
    x1y1 = as_point(x1y1)
    partner = as_point(partner)
    _require(is_direction(Direction.NE, ctx.anchor, x1y1), "sink must be NE of the anchor")
    r = _slack_to(ctx, x1y1)
    _require(r > ctx.epsilon, f"sink must be non-admissible w.r.t. the anchor (slack {r})")
    _require(is_direction(Direction.NE, ctx.anchor, partner), "partner must be NE of the anchor")
    ps = _source_sink_slack(ctx, partner, x1y1)
    _require(abs(ps) <= ctx.epsilon, f"partner arc must be admissible (slack {ps})")
    return ExclusionRegion(kind="ne_of_point", level=r, level_strict=False, corner=x1y1)


def thm4_region(ctx: ScanContext, x1y1, partner, s=0, metric_only: bool = False) -> ExclusionRegion:
    """Metric-agnostic region rule: a non-admissible sink with an admissible
    partner certifies a two-focus (hyperbolic) region of slack above s.

    With the default foci the region uses the anchor and the partner; with
    `metric_only` (triangle inequality required) it uses the anchor and the
    blocking sink, giving a smaller but partner-free set.
    """
    x1y1 = as_point(x1y1)
    partner = as_point(partner)
    _require(s >= 0, f"level must be nonnegative, got {s}")
    r = _slack_to(ctx, x1y1)
    _require(r > ctx.epsilon, f"sink must be non-admissible w.r.t. the anchor (slack {r})")
    ps = _source_sink_slack(ctx, partner, x1y1)
    _require(abs(ps) <= ctx.epsilon, f"partner arc must be admissible (slack {ps})")
    d_anchor = distance(ctx.metric, ctx.anchor, x1y1)
    if metric_only:
        _require(ctx.metric.is_metric, "the partner-free variant needs the triangle inequality")
        hyp = HyperbolicSet(ctx.anchor, x1y1, r - d_anchor - s)
    else:
        delta = d_anchor - distance(ctx.metric, partner, x1y1)
        hyp = HyperbolicSet(ctx.anchor, partner, r - delta - s)
    return ExclusionRegion(kind="hyperbolic", level=s, level_strict=True, hyp=hyp)


def prop4_euclid_line_stop(ctx: ScanContext, x1y1) -> ExclusionRegion:
    """Euclid rule on the anchor's own line: past the first non-admissible
    sink east of the anchor, the whole ray is at least that slack."""
    _require_ne_frame(ctx)
    _require(ctx.metric is Metric.EUCLID, "rule applies to the Euclidean metric only")
    x1y1 = as_point(x1y1)
    _require(x1y1[1] == ctx.anchor[1], "sink must lie on the anchor's own line")
    _require(x1y1[0] >= ctx.anchor[0], "sink must lie east of the anchor")
    r = _slack_to(ctx, x1y1)
    _require(r > ctx.epsilon, f"sink must be non-admissible w.r.t. the anchor (slack {r})")
    return ExclusionRegion(kind="le_ray", level=r, level_strict=False, corner=x1y1)


def _blocker_numbers(ctx: ScanContext, x1y1, partner, s):
    """Shared validation and (r, b, 2a) computation for the Euclid rules."""
    _require_ne_frame(ctx)
    _require(ctx.metric is Metric.EUCLID, "rule applies to the Euclidean metric only")
    x1y1 = as_point(x1y1)
    partner = as_point(partner)
    _require(is_direction(Direction.NE, ctx.anchor, x1y1), "sink must be NE of the anchor")
    _require(x1y1 != ctx.anchor, "sink must differ from the anchor")
    r = _slack_to(ctx, x1y1)
    _require(r > ctx.epsilon, f"sink must be non-admissible w.r.t. the anchor (slack {r})")
    _require(is_direction(Direction.NE, ctx.anchor, partner), "partner must be NE of the anchor")
    ps = _source_sink_slack(ctx, partner, x1y1)
    _require(abs(ps) <= ctx.epsilon, f"partner arc must be admissible (slack {ps})")
    _require(0 <= s < r, f"level must satisfy 0 <= s < slack, got s={s}, slack={r}")
    d_anchor = distance(ctx.metric, ctx.anchor, x1y1)
    d_part = distance(ctx.metric, partner, x1y1)
    b = (d_anchor - d_part) - r + s
    a2 = distance(ctx.metric, ctx.anchor, partner)
    return x1y1, partner, r, b, a2


def thm5_euclid_le_stop(ctx: ScanContext, x1y1, partner, s) -> bool:
    """Euclid per-line stop: when the boundary hyperbola is flat enough, the
    eastward ray from the blocking sink stays above slack level s."""
    x1y1, partner, r, b, a2 = _blocker_numbers(ctx, x1y1, partner, s)
    dxp = partner[0] - ctx.anchor[0]
    dyp = partner[1] - ctx.anchor[1]
    _require(dxp > 0, "partner must lie strictly east of the anchor")
    _require(b > 0, "nonpositive gap bound: route to the NE-region rule instead")
    if b >= a2:
        return False  # degenerate boundary: no slope bound available, keep scanning
    bound = asymptote_slope_bound(a2 / 2, b)
    return bound >= dyp / dxp


def thm6_euclid_ne_stop(ctx: ScanContext, x1y1, partner, s) -> list[ExclusionRegion]:
    """Euclid NE-region rule with column cut-offs.

    Returns the certified regions (possibly empty when no case applies):
    the closed NE quadrant of the blocking sink, plus, when the partner
    geometry allows, a cut height above which whole lines are excluded.
    """
    x1y1, partner, r, b, a2 = _blocker_numbers(ctx, x1y1, partner, s)
    dxp = partner[0] - ctx.anchor[0]
    dyp = partner[1] - ctx.anchor[1]
    corner = ExclusionRegion(kind="ne_of_point", level=s, level_strict=True, corner=x1y1)
    if b <= 0:
        if dyp > 0:
            cut = vertical_cut_y2(ctx.anchor, partner)
            column = ExclusionRegion(
                kind="column_above_y",
                level=s,
                level_strict=True,
                corner=Point(ctx.anchor[0], cut),
                cut_inclusive=False,
            )
            return [corner, column]
        return []
    if not (dyp > 0 and dxp > 0) or b >= a2:
        return []
    bound = asymptote_slope_bound(a2 / 2, b)
    if dyp <= dxp:
        if bound >= dxp / dyp:
            return [corner]
        return []
    if bound >= dyp / dxp:
        cut = vertical_cut_y3(ctx.anchor, partner)
        column = ExclusionRegion(
            kind="column_above_y",
            level=s,
            level_strict=True,
            corner=Point(ctx.anchor[0], cut),
            cut_inclusive=True,
        )
        return [corner, column]
    return []


# ---------------------------------------------------------------------------
# The quadrant scanner.
# ---------------------------------------------------------------------------

def _euclid_rule(dist, ax, ay, px, py, xv, yv, d_anchor, r, level, guard):
    """Classify the strongest stop one admissible partner certifies for a
    blocking sink, in the canonical NE frame with float guards.

    Returns (priority, b, kind, cut) or None; higher (priority, b) wins.
    Kinds: corner_strict_cut (NE region + lines above cut excluded),
    corner_incl_cut (cut inclusive), corner, line.
    """
    d_part = dist(px, py, xv, yv)
    b = (d_anchor - d_part) - r + level
    dxp = px - ax
    dyp = py - ay
    if b <= -guard:
        if dyp > 0:
            cut = (ay + py) / 2 + dxp * dxp / (2 * dyp)
            return (3, b, "corner_strict_cut", cut)
        return None
    if b < guard or b <= 0:
        return None
    a2 = dist(ax, ay, px, py)
    disc = a2 * a2 - b * b
    if disc <= 0:
        return None
    bound = math.sqrt(disc) / b
    if dyp > 0 and dxp > 0:
        if dyp <= dxp:
            if bound - dxp / dyp > guard:
                return (2, b, "corner", None)
            if bound - dyp / dxp > guard:
                return (1, b, "line", None)
            return None
        if bound - dyp / dxp > guard:
            cut = py + 2 * dxp * dxp * dyp / (dyp * dyp - dxp * dxp)
            return (3, b, "corner_incl_cut", cut)
        return None
    if dyp == 0 and dxp > 0 and bound > guard:
        return (1, b, "line", None)
    return None


def _scan_quadrant(ctx: ScanContext, sxn, syn, ys, xs_lists, ord_lists, out: list) -> int:
    """Scan one reflected quadrant; returns the number of slack evaluations."""
    metric = ctx.metric
    eps = ctx.epsilon
    guard = GUARD_FACTOR * eps
    level = LEVEL_FACTOR * eps
    blocker_min = level + guard
    ax = sxn * ctx.anchor[0]
    ay = syn * ctx.anchor[1]
    alpha_n = ctx.alpha_anchor
    beta = ctx.duals.beta
    alpha = ctx.duals.alpha
    dist = dist_fn(metric)
    counters = ctx.counters
    partners = ctx.partners
    li0 = bisect_left(ys, ay) if syn > 0 else bisect_right(ys, ay)
    include_x = sxn > 0
    n_lines = len(ys)
    if li0 >= n_lines:
        return 0
    exact = eps == 0
    # Exact-arithmetic rules need exact slacks; the Euclid rules carry their
    # own float guards.  Anything else (non-integral L1/SqEuclid data) scans
    # without stopping rules.
    l1_rules = metric is Metric.L1 and exact
    sq_rules = metric is Metric.SQEUCLID and exact
    eu_rules = metric is Metric.EUCLID
    note_ordinal = ctx.anchor_ordinal
    can_note = partners is not None and note_ordinal >= 0
    examined = 0
    corners: list[tuple] = []
    y_strict = None  # lines strictly above this are excluded
    y_incl = None    # lines at or above this are excluded
    li = li0
    while li < n_lines:
        yv = ys[li]
        if y_strict is not None and yv > y_strict:
            break
        if y_incl is not None and yv >= y_incl:
            break
        xs = xs_lists[li]
        nxs = len(xs)
        ords = ord_lists[li]
        li += 1
        k = bisect_left(xs, ax) if include_x else bisect_right(xs, ax)
        xlim = None
        if corners:
            for cx, cy in corners:
                if cy <= yv and (xlim is None or cx < xlim):
                    xlim = cx
        min_low = None
        seen_adm = False
        while k < nxs:
            xv = xs[k]
            if xlim is not None and xv >= xlim:
                break
            k += 1
            m = ords[k - 1]
            d = dist(ax, ay, xv, yv)
            s = (d - alpha_n) - beta[m]
            examined += 1
            if s < -eps:
                raise FeasibilityError(f"negative slack {s} on arc to sink {m}")
            if s <= eps:
                out.append(m)
                seen_adm = True
                if can_note:
                    partners.note(m, note_ordinal)
                continue
            # the sink is low with respect to the anchor
            if l1_rules:
                corners.append((xv, yv))
                counters.region_exclusions += 1
                break
            if sq_rules:
                if min_low is not None and s >= min_low:
                    counters.line_stops += 1
                    break
                if seen_adm:
                    counters.line_stops += 1
                    break
                # no line stop: try for the stronger NE-region exclusion
                stop = False
                if partners is not None:
                    for pn in partners.partners_for(m, alpha, beta):
                        psx, psy = partners.source_xy(pn)
                        if sxn * psx >= ax and syn * psy >= ay:
                            corners.append((xv, yv))
                            counters.region_exclusions += 1
                            stop = True
                            break
                if stop:
                    break
                if min_low is None or s < min_low:
                    min_low = s
                continue
            if eu_rules and s > blocker_min:
                best = None
                if partners is not None:
                    for pn in partners.partners_for(m, alpha, beta):
                        psx, psy = partners.source_xy(pn)
                        px = sxn * psx
                        py = syn * psy
                        if px < ax or py < ay:
                            continue
                        cand = _euclid_rule(dist, ax, ay, px, py, xv, yv, d, s, level, guard)
                        if cand is not None and (best is None or cand[:2] > best[:2]):
                            best = cand
                if best is not None:
                    kind = best[2]
                    if kind == "line":
                        counters.line_stops += 1
                    else:
                        corners.append((xv, yv))
                        counters.region_exclusions += 1
                        if kind == "corner_strict_cut":
                            cut = best[3] + guard
                            if y_strict is None or cut < y_strict:
                                y_strict = cut
                            counters.vertical_stops += 1
                        elif kind == "corner_incl_cut":
                            cut = best[3] + guard
                            if y_incl is None or cut < y_incl:
                                y_incl = cut
                            counters.vertical_stops += 1
                    break
                if yv == ay:
                    # eastward-ray rule on the anchor's own line: partner-free
                    counters.line_stops += 1
                    break
            # weak low or no applicable rule: keep scanning
    counters.candidates_examined += examined
    return examined


def enumerate_admissible(ctx: ScanContext, sinks) -> list[int]:
    """All sink ordinals admissible w.r.t. the anchor, by pruned quadrant scans.

    The four quadrants partition the plane around the anchor (boundary
    candidates belong to the quadrant whose reflected frame keeps them on a
    closed edge), so counters satisfy examined + skipped == number of sinks.
    The result is exactly the exhaustive-scan answer; pruning affects cost
    only.
    """
    scanner = _as_scanner(sinks)
    out: list[int] = []
    examined = 0
    for d, sxn, syn, ys, xs_lists, ord_lists in scanner._view_list:
        ctx.quadrant = d
        examined += _scan_quadrant(ctx, sxn, syn, ys, xs_lists, ord_lists, out)
    ctx.quadrant = Direction.NE
    ctx.counters.candidates_skipped += len(scanner.points) - examined
    out.sort()
    return out


def full_scan_admissible(ctx: ScanContext, sinks) -> list[int]:
    """Exhaustive reference scan: every sink, no stopping rules."""
    scanner = _as_scanner(sinks)
    eps = ctx.epsilon
    alpha_n = ctx.alpha_anchor
    beta = ctx.duals.beta
    dist = dist_fn(ctx.metric)
    ax, ay = ctx.anchor
    out = []
    for m, p in enumerate(scanner.points):
        s = (dist(ax, ay, p[0], p[1]) - alpha_n) - beta[m]
        if s < -eps:
            raise FeasibilityError(f"negative slack {s} on arc to sink {m}")
        if s <= eps:
            out.append(m)
    ctx.counters.candidates_examined += len(scanner.points)
    return out


# ---------------------------------------------------------------------------
# Accelerated dual-step scan (Euclidean metric).
# ---------------------------------------------------------------------------

def _running_min_certifies(dist, ax, ay, px, py, xv, yv, d_anchor, r, level, guard) -> bool:
    """NE-region certificate for the running-minimum scan (corner only, no
    column cuts): a sink provably above the current minimum cannot improve it,
    and neither can anything NE of it."""
    b = (d_anchor - dist(px, py, xv, yv)) - r + level
    dxp = px - ax
    dyp = py - ay
    if b <= -guard:
        return yv >= (ay + py) / 2
    if b < guard or b <= 0:
        return False
    a2 = dist(ax, ay, px, py)
    disc = a2 * a2 - b * b
    if disc <= 0:
        return False
    bound = math.sqrt(disc) / b
    if dyp <= 0:
        return False
    if dyp <= dxp:
        return bound - dxp / dyp > guard
    if dxp > 0:
        return bound - dyp / dxp > guard
    return False


def theta_scan_theorem7(
    source_xs: Sequence,
    source_ys: Sequence,
    sink_xs: Sequence,
    sink_ys: Sequence,
    alpha: Sequence,
    beta: Sequence,
    labeled_sources: Iterable[int],
    unlabeled_sinks: Iterable[int],
    partners: Optional[PartnerIndex],
    epsilon: float,
    counters: Optional[PruneCounters] = None,
):
    """Minimum slack over labeled sources x unlabeled sinks (Euclidean metric),
    skipping sinks a NE-region certificate proves cannot lower the running
    minimum.  Skipped sinks have slack strictly above the minimum at skip
    time, so the returned value equals the exhaustive minimum exactly.
    """
    dist = dist_fn(Metric.EUCLID)
    guard = GUARD_FACTOR * epsilon
    if counters is None:
        counters = PruneCounters()
    U = sorted(unlabeled_sinks)  # ordinal order is the canonical x+y order
    L = sorted(labeled_sources)
    theta = None
    for n in L:
        ax = source_xs[n]
        ay = source_ys[n]
        alpha_n = alpha[n]
        corners: list[tuple] = []
        for m in U:
            xv = sink_xs[m]
            yv = sink_ys[m]
            skip = False
            for cx, cy in corners:
                if xv >= cx and yv >= cy:
                    skip = True
                    break
            if skip:
                counters.candidates_skipped += 1
                continue
            d = dist(ax, ay, xv, yv)
            s = (d - alpha_n) - beta[m]
            counters.candidates_examined += 1
            if theta is None or s < theta:
                theta = s
                continue
            if s > theta + guard and partners is not None:
                for pn in partners.partners_for(m, alpha, beta):
                    px, py = partners.source_xy(pn)
                    if px < ax or py < ay:
                        continue
                    if _running_min_certifies(dist, ax, ay, px, py, xv, yv, d, s, theta, guard):
                        corners.append((xv, yv))
                        counters.region_exclusions += 1
                        break
    return theta
