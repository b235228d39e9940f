"""Planar optimal transport: Kantorovich distance between discrete measures
via the primal-dual method, with geometric pruning of the admissible-arc
search for the L1, squared-Euclidean, and Euclidean ground metrics."""

from .errors import (
    CapExceededError,
    FeasibilityError,
    KantorError,
    ParseError,
    PreconditionError,
    SolveError,
    ValidationError,
)
from .geometry import (
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
from .instance import (
    MassPoint,
    Measure,
    ProblemInstance,
    dump_points,
    format_points,
    load_pgm,
    load_points,
    validate,
)
from .neighbor_index import ROOT, DagIndex, build_index, ne_iter
from .pruning import (
    ExclusionRegion,
    PartnerIndex,
    PruneCounters,
    ScanContext,
    SinkScanner,
    enumerate_admissible,
    full_scan_admissible,
    prop4_euclid_line_stop,
    thm1_l1_ne_exclude,
    thm2_sq_line_stop,
    thm3_sq_vertical_stop,
    thm4_region,
    thm5_euclid_le_stop,
    thm6_euclid_ne_stop,
)
from .dual_core import (
    DualState,
    LabelState,
    OptimalityReport,
    PhaseInfo,
    SolveOptions,
    SolveResult,
    SolveStats,
    THETA_FULL_SCAN,
    THETA_THEOREM7,
    THETA_UNIT_INTEGER,
    TransportPlan,
    augment_flow,
    compute_theta,
    dual_objective,
    init_duals,
    is_admissible,
    is_low,
    is_lower,
    is_strictly_lower,
    label_pass,
    slack,
    solve,
    update_duals,
    verify_optimality,
)
from .oracle import InstanceGenSpec, OracleResult, brute_force_optimal, random_instance

__version__ = "0.1.0"
