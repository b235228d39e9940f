"""Primal-dual transportation engine.

Dual initialization, labeling, flow augmentation, dual-change computation
(plain, unit-step, and the accelerated Euclidean scan), dual updates,
termination, and optimality certification.

Arithmetic modes: when the instance is integral and the metric is
integer-valued (L1, squared Euclidean) everything stays in exact integers
and admissibility is slack == 0.  Otherwise slacks are floats and an arc is
admissible when |slack| <= epsilon_adm.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import FeasibilityError, PreconditionError, SolveError, ValidationError
from .geometry import Metric, as_point, dist_fn, distance
from .instance import MASS_REL_TOL, ProblemInstance
from .instance import validate as validate_instance
from . import pruning
from .pruning import PartnerIndex, PruneCounters, ScanContext, SinkScanner

THETA_UNIT_INTEGER = "unit_integer"
THETA_FULL_SCAN = "full_scan"
THETA_THEOREM7 = "theorem7"
THETA_MODES = (THETA_UNIT_INTEGER, THETA_FULL_SCAN, THETA_THEOREM7)

# Coordinate magnitude up to which int64 vector arithmetic cannot overflow
# on squared distances; beyond it the pure-Python paths take over.
_VECTOR_COORD_LIMIT = 10**6


@dataclass
class DualState:
    """Feasible dual variables: one alpha per source, one beta per sink,
    indexed in the measures' canonical order."""

    alpha: list
    beta: list
    source_index: dict
    sink_index: dict

    def copy(self) -> "DualState":
        return DualState(list(self.alpha), list(self.beta), self.source_index, self.sink_index)


@dataclass
class SolveStats:
    arc_checks: int = 0
    dual_updates: int = 0
    augmentations: int = 0
    theta_history: list = field(default_factory=list)
    pruned_regions: int = 0
    prune: PruneCounters = field(default_factory=PruneCounters)
    theta_scan: PruneCounters = field(default_factory=PruneCounters)

    def as_dict(self) -> dict:
        return {
            "arc_checks": self.arc_checks,
            "dual_updates": self.dual_updates,
            "augmentations": self.augmentations,
            "theta_history": list(self.theta_history),
            "pruned_regions": self.pruned_regions,
            "prune": self.prune.as_dict(),
            "theta_scan": self.theta_scan.as_dict(),
        }


class TransportPlan:
    """Sparse nonnegative flows with row/column totals kept in sync."""

    __slots__ = ("flows", "shipped_row", "shipped_col", "sources_with_flow")

    def __init__(self, n_sources: int, n_sinks: int):
        self.flows: dict[tuple[int, int], float] = {}
        self.shipped_row = [0] * n_sources
        self.shipped_col = [0] * n_sinks
        self.sources_with_flow: list[set[int]] = [set() for _ in range(n_sinks)]

    def add_flow(self, n: int, m: int, delta) -> None:
        if not delta:
            return
        new = self.flows.get((n, m), 0) + delta
        if new < 0:
            raise SolveError(f"flow on arc ({n}, {m}) would become negative ({new})")
        if new:
            self.flows[(n, m)] = new
            self.sources_with_flow[m].add(n)
        else:
            self.flows.pop((n, m), None)
            self.sources_with_flow[m].discard(n)
        self.shipped_row[n] += delta
        self.shipped_col[m] += delta

    def total_shipped(self):
        return sum(self.shipped_row)

    def cost(self, instance: ProblemInstance):
        src = instance.source.positions()
        snk = instance.sink.positions()
        metric = instance.metric
        return sum(h * distance(metric, src[n], snk[m]) for (n, m), h in self.flows.items())

    def is_complete(self, instance: ProblemInstance) -> bool:
        p = instance.source.masses()
        q = instance.sink.masses()
        if instance.is_integral:
            return self.shipped_row == p and self.shipped_col == q
        for have, want in zip(self.shipped_row, p):
            if abs(have - want) > MASS_REL_TOL * (1 + abs(want)):
                return False
        for have, want in zip(self.shipped_col, q):
            if abs(have - want) > MASS_REL_TOL * (1 + abs(want)):
                return False
        return True

    def copy(self) -> "TransportPlan":
        out = TransportPlan(len(self.shipped_row), len(self.shipped_col))
        out.flows = dict(self.flows)
        out.shipped_row = list(self.shipped_row)
        out.shipped_col = list(self.shipped_col)
        out.sources_with_flow = [set(s) for s in self.sources_with_flow]
        return out


@dataclass
class LabelState:
    n_sources: int
    n_sinks: int
    labeled_sources: set = field(default_factory=set)
    labeled_sinks: set = field(default_factory=set)
    pred_source: dict = field(default_factory=dict)  # source -> sink it was labeled from (None = deficient root)
    pred_sink: dict = field(default_factory=dict)    # sink -> source it was labeled from
    deficient_sources: set = field(default_factory=set)
    breakthrough_sink: Optional[int] = None

    @property
    def breakthrough(self) -> bool:
        return self.breakthrough_sink is not None

    def unlabeled_sources(self) -> list[int]:
        return [n for n in range(self.n_sources) if n not in self.labeled_sources]

    def unlabeled_sinks(self) -> list[int]:
        return [m for m in range(self.n_sinks) if m not in self.labeled_sinks]


@dataclass
class SolveOptions:
    pruning: bool = True
    theta_mode: Optional[str] = None      # default: theorem7 for pruned Euclid, else full_scan
    epsilon_adm: float = 1e-9             # admissibility tolerance outside exact mode
    max_iterations: Optional[int] = None  # cap on dual updates
    check_invariants: bool = False
    phase_hook: Optional[Callable] = None


@dataclass
class PhaseInfo:
    """Snapshot passed to SolveOptions.phase_hook after initialization and
    after every dual update."""

    kind: str  # "init" or "dual_update"
    instance: ProblemInstance
    duals: DualState
    plan: TransportPlan
    stats: SolveStats
    theta: Optional[float] = None
    label_state: Optional[LabelState] = None


@dataclass
class SolveResult:
    value: float
    plan: TransportPlan
    duals: DualState
    stats: SolveStats


@dataclass
class OptimalityReport:
    primal_complete: bool
    dual_feasible: bool
    duality_gap_ok: bool
    complementary_slackness_ok: bool
    primal_value: float
    dual_value: float
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.primal_complete
            and self.dual_feasible
            and self.duality_gap_ok
            and self.complementary_slackness_ok
        )

    def as_dict(self) -> dict:
        return {
            "primal_complete": self.primal_complete,
            "dual_feasible": self.dual_feasible,
            "duality_gap_ok": self.duality_gap_ok,
            "complementary_slackness_ok": self.complementary_slackness_ok,
            "ok": self.ok,
            "messages": list(self.messages),
        }


class _Arrays:
    """Coordinate/mass views of an instance, with numpy mirrors when safe."""

    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        self.metric = instance.metric
        src = instance.source
        snk = instance.sink
        self.source_points = src.positions()
        self.sink_points = snk.positions()
        self.sxs = [p[0] for p in self.source_points]
        self.sys_ = [p[1] for p in self.source_points]
        self.txs = [p[0] for p in self.sink_points]
        self.tys = [p[1] for p in self.sink_points]
        self.p = src.masses()
        self.q = snk.masses()
        self.integral = instance.is_integral
        self.exact = self.integral and self.metric.integer_valued
        self.dist = dist_fn(self.metric)
        coords = self.sxs + self.sys_ + self.txs + self.tys
        self.vector = (not self.integral) or max(abs(c) for c in coords) <= _VECTOR_COORD_LIMIT
        if self.vector:
            dtype = np.int64 if self.integral else np.float64
            self.np_sx = np.asarray(self.sxs, dtype=dtype)
            self.np_sy = np.asarray(self.sys_, dtype=dtype)
            self.np_tx = np.asarray(self.txs, dtype=dtype)
            self.np_ty = np.asarray(self.tys, dtype=dtype)

    @property
    def n(self) -> int:
        return len(self.sxs)

    @property
    def m(self) -> int:
        return len(self.txs)

    def dist_row(self, n: int) -> np.ndarray:
        """Distances from source n to every sink (bit-identical to dist_fn)."""
        dx = self.np_sx[n] - self.np_tx
        dy = self.np_sy[n] - self.np_ty
        if self.metric is Metric.L1:
            return np.abs(dx) + np.abs(dy)
        sq = dx * dx + dy * dy
        if self.metric is Metric.SQEUCLID:
            return sq
        return np.sqrt(sq)

    def mass_tol(self, want) -> float:
        return 0 if self.integral else MASS_REL_TOL * (1 + abs(want))


def _indices(instance: ProblemInstance):
    return instance.source.position_index, instance.sink.position_index


def _init_duals_seeded(arrays: _Arrays):
    """Prop-5-style initialization plus, per sink, the source attaining its
    beta minimum (a ready-made admissible partner)."""
    src_index, snk_index = _indices(arrays.instance)
    n_src, n_snk = arrays.n, arrays.m
    if arrays.vector:
        alpha: list = []
        colmin = None
        seeds = np.zeros(n_snk, dtype=np.int64)
        for n in range(n_src):
            row = arrays.dist_row(n)
            a = row.min()
            alpha.append(a)
            reduced = row - a
            if colmin is None:
                colmin = reduced
            else:
                better = reduced < colmin
                if better.any():
                    seeds[better] = n
                    colmin = np.minimum(colmin, reduced)
        beta = colmin.tolist()
        alpha = [x.item() if isinstance(x, np.generic) else x for x in alpha]
        seed_list = seeds.tolist()
    else:
        dist = arrays.dist
        alpha = []
        for n in range(n_src):
            sx, sy = arrays.sxs[n], arrays.sys_[n]
            alpha.append(min(dist(sx, sy, arrays.txs[m], arrays.tys[m]) for m in range(n_snk)))
        beta = []
        seed_list = []
        for m in range(n_snk):
            tx, ty = arrays.txs[m], arrays.tys[m]
            best = None
            best_n = 0
            for n in range(n_src):
                red = dist(arrays.sxs[n], arrays.sys_[n], tx, ty) - alpha[n]
                if best is None or red < best:
                    best = red
                    best_n = n
            beta.append(best)
            seed_list.append(best_n)
    duals = DualState(alpha, beta, src_index, snk_index)
    return duals, seed_list


def init_duals(instance: ProblemInstance) -> DualState:
    """Feasible starting duals: alpha is the distance to the nearest sink,
    beta the best reduced distance over sources.  Every source and sink gets
    at least one admissible arc."""
    duals, _ = _init_duals_seeded(_Arrays(instance))
    return duals


def slack(duals: DualState, metric: Metric, source, sink):
    """Reduced cost delta - alpha - beta of one arc, by position."""
    n = duals.source_index[as_point(source)]
    m = duals.sink_index[as_point(sink)]
    return (distance(metric, source, sink) - duals.alpha[n]) - duals.beta[m]


def is_admissible(duals: DualState, metric: Metric, source, sink, epsilon: float = 0.0) -> bool:
    """Zero-slack test (|slack| <= epsilon outside exact mode).

    Raises FeasibilityError on slack below -epsilon: that means the duals
    are infeasible, which is a bug upstream, not a property of the arc.
    """
    s = slack(duals, metric, source, sink)
    if s < -epsilon:
        raise FeasibilityError(f"negative slack {s} on arc {source} -> {sink}")
    return abs(s) <= epsilon


def is_low(duals: DualState, metric: Metric, source, sink, epsilon: float = 0.0) -> bool:
    """True when the sink's slack w.r.t. the source is strictly positive."""
    return slack(duals, metric, source, sink) > epsilon


def _lower_slacks(duals, metric, source, sink_a, sink_b, epsilon):
    sa = slack(duals, metric, source, sink_a)
    sb = slack(duals, metric, source, sink_b)
    if sa <= epsilon or sb <= epsilon:
        raise PreconditionError(
            f"both sinks must be low w.r.t. the source (slacks {sa}, {sb})"
        )
    return sa, sb


def is_lower(duals, metric, source, sink_a, sink_b, epsilon: float = 0.0) -> bool:
    """True when sink_b is lower than sink_a: its slack is at least sink_a's.
    Both sinks must be low w.r.t. the source."""
    sa, sb = _lower_slacks(duals, metric, source, sink_a, sink_b, epsilon)
    return sb >= sa


def is_strictly_lower(duals, metric, source, sink_a, sink_b, epsilon: float = 0.0) -> bool:
    sa, sb = _lower_slacks(duals, metric, source, sink_a, sink_b, epsilon)
    return sb > sa


def label_pass(
    instance: ProblemInstance,
    duals: DualState,
    plan: TransportPlan,
    admissible_arcs: Callable[[int], Iterable[int]],
    *,
    epsilon: float = 0.0,
    stop_at_breakthrough: bool = False,
) -> LabelState:
    """Alternating reachability marking from the deficient sources.

    Rules: a labeled source labels its admissible sinks; a labeled sink
    labels the sources shipping into it.  Without `stop_at_breakthrough` the
    labeling runs to its fixed point and classifies the outcome; with it the
    pass returns as soon as a labeled sink has spare capacity (the labels
    then cover the found augmenting path, which is all augmentation needs).

    `admissible_arcs` maps a source ordinal to its admissible sink ordinals;
    the solver passes either the pruned or the exhaustive enumerator.
    """
    p = instance.source.masses()
    q = instance.sink.masses()
    ls = LabelState(n_sources=len(p), n_sinks=len(q))
    integral = instance.is_integral
    shipped_row = plan.shipped_row
    if integral:
        for n in range(len(p)):
            if shipped_row[n] < p[n]:
                ls.deficient_sources.add(n)
                ls.labeled_sources.add(n)
                ls.pred_source[n] = None
    else:
        for n in range(len(p)):
            want = p[n]
            if want - shipped_row[n] > MASS_REL_TOL * (1 + abs(want)):
                ls.deficient_sources.add(n)
                ls.labeled_sources.add(n)
                ls.pred_source[n] = None
    queue: deque = deque(("src", n) for n in sorted(ls.deficient_sources))
    while queue:
        kind, idx = queue.popleft()
        if kind == "src":
            for m in admissible_arcs(idx):
                if m in ls.labeled_sinks:
                    continue
                ls.labeled_sinks.add(m)
                ls.pred_sink[m] = idx
                want = q[m]
                tol = 0 if integral else MASS_REL_TOL * (1 + abs(want))
                if want - plan.shipped_col[m] > tol and ls.breakthrough_sink is None:
                    ls.breakthrough_sink = m
                    if stop_at_breakthrough:
                        return ls
                queue.append(("snk", m))
        else:
            for n in sorted(plan.sources_with_flow[idx]):
                if n in ls.labeled_sources:
                    continue
                ls.labeled_sources.add(n)
                ls.pred_source[n] = idx
                queue.append(("src", n))
    return ls


def _augment_at(plan: TransportPlan, label_state: LabelState,
                instance: ProblemInstance, m: int):
    """Push the bottleneck amount along the labeled alternating path from
    sink m back to its deficient root source.  Returns the amount shipped;
    0 means the path went stale (an earlier augmentation of the same
    labeling consumed its spare capacity, deficiency, or a reverse flow)."""
    p = instance.source.masses()
    q = instance.sink.masses()
    forward = []
    reverse = []
    n = label_state.pred_sink[m]
    forward.append((n, m))
    bottleneck = q[m] - plan.shipped_col[m]
    while label_state.pred_source[n] is not None:
        m2 = label_state.pred_source[n]
        reverse.append((n, m2))
        flow = plan.flows.get((n, m2), 0)
        if flow < bottleneck:
            bottleneck = flow
        n = label_state.pred_sink[m2]
        forward.append((n, m2))
    deficiency = p[n] - plan.shipped_row[n]
    if deficiency < bottleneck:
        bottleneck = deficiency
    if bottleneck <= 0:
        return 0
    for arc in forward:
        plan.add_flow(arc[0], arc[1], bottleneck)
    for arc in reverse:
        plan.add_flow(arc[0], arc[1], -bottleneck)
    return bottleneck


def augment_flow(plan: TransportPlan, label_state: LabelState, instance: ProblemInstance) -> TransportPlan:
    """Push the bottleneck amount along the labeled alternating path from the
    breakthrough sink back to its deficient root source, increasing forward
    arcs and decreasing reverse (flow-carrying) arcs."""
    m = label_state.breakthrough_sink
    if m is None:
        raise PreconditionError("no breakthrough recorded in the label state")
    shipped = _augment_at(plan, label_state, instance, m)
    if not shipped > 0:
        raise SolveError("augmentation bottleneck is not positive; labeling is inconsistent")
    return plan


def compute_theta(
    instance: ProblemInstance,
    duals: DualState,
    label_state: LabelState,
    *,
    mode: str = THETA_FULL_SCAN,
    epsilon: float = 0.0,
    partners: Optional[PartnerIndex] = None,
    stats: Optional[SolveStats] = None,
    arrays: Optional[_Arrays] = None,
):
    """Dual-change step: the minimum slack between labeled sources and
    unlabeled sinks (strictly positive at a no-breakthrough fixed point).

    Modes: `full_scan` scans the whole labeled x unlabeled product;
    `unit_integer` returns 1 without scanning (valid only when distances and
    masses are integers); `theorem7` (Euclidean metric) runs the pruned
    running-minimum scan, which returns the same value as full_scan.
    """
    if mode not in THETA_MODES:
        raise PreconditionError(f"unknown theta mode {mode!r}")
    arrays = arrays if arrays is not None else _Arrays(instance)
    L = sorted(label_state.labeled_sources)
    U = label_state.unlabeled_sinks()
    if not L or not U:
        raise SolveError(
            "no labeled-source/unlabeled-sink arcs to scan while the plan is incomplete"
        )
    if mode == THETA_UNIT_INTEGER:
        if not arrays.exact:
            raise PreconditionError(
                "unit_integer theta requires integer masses and an integer-valued metric"
            )
        return 1
    if mode == THETA_THEOREM7:
        if arrays.metric is not Metric.EUCLID:
            raise PreconditionError("theorem7 theta applies to the Euclidean metric only")
        if partners is None:
            partners = PartnerIndex(
                arrays.source_points, arrays.sink_points, arrays.metric, epsilon
            )
        counters = stats.theta_scan if stats is not None else None
        theta = pruning.theta_scan_theorem7(
            arrays.sxs, arrays.sys_, arrays.txs, arrays.tys,
            duals.alpha, duals.beta, L, U, partners, epsilon, counters,
        )
        if stats is not None:
            stats.arc_checks += stats.theta_scan.candidates_examined
    elif arrays.vector:
        beta_u = np.asarray([duals.beta[m] for m in U])
        u_idx = np.asarray(U, dtype=np.intp)
        best = None
        for n in L:
            row = arrays.dist_row(n)[u_idx]
            s = (row - duals.alpha[n]) - beta_u
            v = s.min()
            if best is None or v < best:
                best = v
        theta = best.item()
        if stats is not None:
            stats.arc_checks += len(L) * len(U)
    else:
        dist = arrays.dist
        theta = None
        for n in L:
            sx, sy, a_n = arrays.sxs[n], arrays.sys_[n], duals.alpha[n]
            for m in U:
                s = (dist(sx, sy, arrays.txs[m], arrays.tys[m]) - a_n) - duals.beta[m]
                if theta is None or s < theta:
                    theta = s
        if stats is not None:
            stats.arc_checks += len(L) * len(U)
    if theta <= epsilon:
        raise FeasibilityError(
            f"theta {theta} is not positive: labeling was not at a fixed point"
        )
    return theta


def update_duals(duals: DualState, label_state: LabelState, theta) -> DualState:
    """Raise alpha on labeled sources and lower beta on labeled sinks by theta.

    With theta the minimum labeled-to-unlabeled slack the result stays
    feasible, flow-carrying arcs stay admissible, and only unlabeled-source
    to labeled-sink arcs can lose admissibility.
    """
    if not theta > 0:
        raise PreconditionError(f"theta must be positive, got {theta}")
    new = duals.copy()
    for n in label_state.labeled_sources:
        new.alpha[n] += theta
    for m in label_state.labeled_sinks:
        new.beta[m] -= theta
    return new


def dual_objective(instance: ProblemInstance, duals: DualState):
    p = instance.source.masses()
    q = instance.sink.masses()
    return sum(a * w for a, w in zip(duals.alpha, p)) + sum(
        b * w for b, w in zip(duals.beta, q)
    )


def verify_optimality(
    instance: ProblemInstance,
    plan: TransportPlan,
    duals: DualState,
    *,
    epsilon_adm: float = 1e-9,
) -> OptimalityReport:
    """Independent certificate check: primal completeness, dual feasibility,
    zero duality gap, and complementary slackness.  Failures are reported,
    never raised."""
    arrays = _Arrays(instance)
    eps = 0.0 if arrays.exact else epsilon_adm
    messages: list[str] = []

    primal_complete = plan.is_complete(instance)
    if not primal_complete:
        messages.append("plan does not meet all storages/demands with equality")
    if any(h < 0 for h in plan.flows.values()):
        primal_complete = False
        messages.append("negative flow present")

    dual_feasible = True
    min_slack = None
    if arrays.vector:
        beta_arr = np.asarray(duals.beta)
        for n in range(arrays.n):
            s = (arrays.dist_row(n) - duals.alpha[n]) - beta_arr
            v = s.min()
            if min_slack is None or v < min_slack:
                min_slack = v
        min_slack = min_slack.item()
    else:
        dist = arrays.dist
        for n in range(arrays.n):
            for m in range(arrays.m):
                s = (dist(arrays.sxs[n], arrays.sys_[n], arrays.txs[m], arrays.tys[m])
                     - duals.alpha[n]) - duals.beta[m]
                if min_slack is None or s < min_slack:
                    min_slack = s
    if min_slack < -eps:
        dual_feasible = False
        messages.append(f"dual infeasible: minimum slack {min_slack}")

    primal_value = plan.cost(instance)
    dual_value = dual_objective(instance, duals)
    if arrays.exact:
        duality_gap_ok = primal_value == dual_value
    else:
        duality_gap_ok = abs(primal_value - dual_value) <= 1e-9 * (1 + abs(primal_value))
    if not duality_gap_ok:
        messages.append(f"duality gap: primal {primal_value} vs dual {dual_value}")

    cs_ok = True
    dist = arrays.dist
    for (n, m), h in plan.flows.items():
        if h <= 0:
            continue
        s = (dist(arrays.sxs[n], arrays.sys_[n], arrays.txs[m], arrays.tys[m])
             - duals.alpha[n]) - duals.beta[m]
        if abs(s) > eps:
            cs_ok = False
            messages.append(f"flow {h} on arc ({n}, {m}) with slack {s}")
            break
    return OptimalityReport(
        primal_complete=primal_complete,
        dual_feasible=dual_feasible,
        duality_gap_ok=duality_gap_ok,
        complementary_slackness_ok=cs_ok,
        primal_value=primal_value,
        dual_value=dual_value,
        messages=messages,
    )


def _audit_state(arrays: _Arrays, duals: DualState, plan: TransportPlan, eps: float) -> None:
    """Invariant sweep used in checked mode: dual feasibility, an admissible
    arc for every source and sink, and flow confined to admissible arcs."""
    n_src, n_snk = arrays.n, arrays.m
    sink_ok = [False] * n_snk
    if arrays.vector:
        beta_arr = np.asarray(duals.beta)
        for n in range(n_src):
            s = (arrays.dist_row(n) - duals.alpha[n]) - beta_arr
            if s.min() < -eps:
                raise FeasibilityError(f"source {n}: negative slack {s.min()}")
            adm = np.abs(s) <= eps
            if not adm.any():
                raise FeasibilityError(f"source {n} has no admissible arc")
            for m in np.nonzero(adm)[0]:
                sink_ok[m] = True
    else:
        dist = arrays.dist
        for n in range(n_src):
            any_adm = False
            for m in range(n_snk):
                s = (dist(arrays.sxs[n], arrays.sys_[n], arrays.txs[m], arrays.tys[m])
                     - duals.alpha[n]) - duals.beta[m]
                if s < -eps:
                    raise FeasibilityError(f"arc ({n}, {m}): negative slack {s}")
                if abs(s) <= eps:
                    any_adm = True
                    sink_ok[m] = True
            if not any_adm:
                raise FeasibilityError(f"source {n} has no admissible arc")
    if not all(sink_ok):
        bad = sink_ok.index(False)
        raise FeasibilityError(f"sink {bad} has no admissible arc")
    dist = arrays.dist
    for (n, m), h in plan.flows.items():
        if h > 0:
            s = (dist(arrays.sxs[n], arrays.sys_[n], arrays.txs[m], arrays.tys[m])
                 - duals.alpha[n]) - duals.beta[m]
            if abs(s) > eps:
                raise FeasibilityError(f"flow on non-admissible arc ({n}, {m}), slack {s}")


def _resolve_theta_mode(options: SolveOptions, metric: Metric, exact: bool) -> str:
    mode = options.theta_mode
    if mode is None:
        if metric is Metric.EUCLID and options.pruning:
            return THETA_THEOREM7
        return THETA_FULL_SCAN
    if mode not in THETA_MODES:
        raise PreconditionError(f"unknown theta mode {mode!r}")
    if mode == THETA_UNIT_INTEGER and not exact:
        raise PreconditionError(
            "unit_integer theta requires integer masses and an integer-valued metric"
        )
    if mode == THETA_THEOREM7:
        if metric is not Metric.EUCLID:
            raise PreconditionError("theorem7 theta applies to the Euclidean metric only")
        if not options.pruning:
            return THETA_FULL_SCAN  # theorem7 is itself a pruned scan
    return mode


def solve(instance: ProblemInstance, options: Optional[SolveOptions] = None) -> SolveResult:
    """Compute the Kantorovich distance and an optimal plan.

    Classic primal-dual loop: start from feasible duals, repeatedly find the
    best plan on the admissible arcs by labeling + augmentation, and when no
    breakthrough exists raise the duals by the minimum labeled-to-unlabeled
    slack.  With pruning on, the labeling's arc discovery and (Euclidean) the
    dual-step scan use the geometric stopping rules.
    """
    opts = options if options is not None else SolveOptions()
    problems = validate_instance(instance)
    if problems:
        raise ValidationError("; ".join(problems))
    arrays = _Arrays(instance)
    exact = arrays.exact
    eps = 0.0 if exact else float(opts.epsilon_adm)
    metric = instance.metric
    theta_mode = _resolve_theta_mode(opts, metric, exact)

    duals, seeds = _init_duals_seeded(arrays)
    partners = PartnerIndex(arrays.source_points, arrays.sink_points, metric, eps)
    for m, n in enumerate(seeds):
        partners.note(m, n)
    scanner = SinkScanner(arrays.sink_points)
    stats = SolveStats()
    plan = TransportPlan(arrays.n, arrays.m)

    # Geometric rules need exact arithmetic or the guarded Euclid machinery;
    # anything else (non-integral L1/SqEuclid data) falls back to full scans.
    use_pruned = opts.pruning and (exact or metric is Metric.EUCLID)
    ctx = ScanContext(
        anchor=arrays.source_points[0],
        alpha_anchor=duals.alpha[0],
        duals=duals,
        metric=metric,
        epsilon=eps,
        counters=stats.prune,
        partners=partners if opts.pruning else None,
        anchor_ordinal=0,
    )

    def arcs_pruned(n: int) -> list[int]:
        ctx.anchor = arrays.source_points[n]
        ctx.anchor_ordinal = n
        ctx.alpha_anchor = ctx.duals.alpha[n]
        before = stats.prune.candidates_examined
        result = pruning.enumerate_admissible(ctx, scanner)
        stats.arc_checks += stats.prune.candidates_examined - before
        return result

    if arrays.vector:
        def arcs_full(n: int) -> list[int]:
            s = (arrays.dist_row(n) - duals_box[0].alpha[n]) - np.asarray(duals_box[0].beta)
            stats.prune.candidates_examined += arrays.m
            stats.arc_checks += arrays.m
            if s.min() < -eps:
                raise FeasibilityError(f"negative slack {s.min()} from source {n}")
            return np.nonzero(np.abs(s) <= eps)[0].tolist()
    else:
        def arcs_full(n: int) -> list[int]:
            full_ctx = ScanContext(
                anchor=arrays.source_points[n],
                alpha_anchor=duals_box[0].alpha[n],
                duals=duals_box[0],
                metric=metric,
                epsilon=eps,
                counters=stats.prune,
            )
            result = pruning.full_scan_admissible(full_ctx, scanner)
            stats.arc_checks += arrays.m
            return result

    duals_box = [duals]
    scan = arcs_pruned if use_pruned else arcs_full

    # admissible sets depend only on the duals, so they are reusable across
    # the augmentation passes inside one dual phase
    arc_cache: dict[int, list[int]] = {}

    def arcs(n: int) -> list[int]:
        got = arc_cache.get(n)
        if got is None:
            got = scan(n)
            arc_cache[n] = got
        return got

    if opts.check_invariants:
        _audit_state(arrays, duals, plan, eps)
    if opts.phase_hook is not None:
        opts.phase_hook(PhaseInfo("init", instance, duals, plan, stats))

    q = arrays.q
    integral = arrays.integral

    while not plan.is_complete(instance):
        ls = label_pass(instance, duals, plan, arcs, epsilon=eps)
        if ls.breakthrough:
            # one labeling fixed point usually certifies many augmenting
            # paths; apply each while its bottleneck stays positive
            for m in sorted(ls.labeled_sinks):
                want = q[m]
                tol = 0 if integral else MASS_REL_TOL * (1 + abs(want))
                if want - plan.shipped_col[m] > tol:
                    if _augment_at(plan, ls, instance, m) > 0:
                        stats.augmentations += 1
            continue
        theta = compute_theta(
            instance, duals, ls,
            mode=theta_mode, epsilon=eps, partners=partners, stats=stats, arrays=arrays,
        )
        duals = update_duals(duals, ls, theta)
        duals_box[0] = duals
        ctx.duals = duals
        arc_cache.clear()
        stats.dual_updates += 1
        stats.theta_history.append(theta)
        if opts.max_iterations is not None and stats.dual_updates > opts.max_iterations:
            raise SolveError(f"iteration cap {opts.max_iterations} exceeded")
        if opts.check_invariants:
            _audit_state(arrays, duals, plan, eps)
        if opts.phase_hook is not None:
            opts.phase_hook(
                PhaseInfo("dual_update", instance, duals, plan, stats, theta=theta, label_state=ls)
            )

    stats.pruned_regions = (
        stats.prune.region_exclusions
        + stats.prune.vertical_stops
        + stats.theta_scan.region_exclusions
    )
    value = plan.cost(instance)
    return SolveResult(value=value, plan=plan, duals=duals, stats=stats)
