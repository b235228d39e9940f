"""Command-line front end.

Subcommands: `solve` (one run with a certificate), `compare` (pruning on vs
off, values must agree), `bench` (grid-size sweep of scan savings), and
`oracle` (random instances checked against the brute-force optimum).

JSON output is the stable contract; in exact integer mode every value-like
number is emitted as a decimal string so nothing is squeezed through a
double.  Text output is for humans and unversioned.

Exit codes: 0 success, 1 assertion/comparison failure, 2 validation,
3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass

from .dual_core import (
    SolveOptions,
    SolveResult,
    THETA_FULL_SCAN,
    THETA_THEOREM7,
    THETA_UNIT_INTEGER,
    solve,
    verify_optimality,
)
from .errors import KantorError, ParseError, PreconditionError, SolveError, ValidationError
from .geometry import Metric
from .instance import Measure, ProblemInstance, format_points, load_pgm, load_points, validate
from .oracle import InstanceGenSpec, brute_force_optimal, random_instance, random_oracle_spec

_THETA_FLAGS = {
    "auto": None,
    "unit": THETA_UNIT_INTEGER,
    "scan": THETA_FULL_SCAN,
    "thm7": THETA_THEOREM7,
}


def _load_measure(path: str) -> Measure:
    if path.endswith(".pgm"):
        return load_pgm(path)
    if path.endswith(".pts"):
        return load_points(path)
    with open(path) as fh:
        head = fh.read(2)
    return load_pgm(path) if head == "P2" else load_points(path)


def _exact_mode(instance: ProblemInstance) -> bool:
    return instance.is_integral and instance.metric.integer_valued


@dataclass
class RunReport:
    """One solve run in the stable JSON schema."""

    value: object            # decimal string in exact mode, float otherwise
    metric: str
    pruning: bool
    theta_mode: str
    epsilon_adm: float
    exact: bool
    stats: dict
    certificate: dict
    wall_time_s: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(**data)


def _numfmt(exact: bool):
    return (lambda v: str(v)) if exact else (lambda v: float(v))


def _make_report(instance, result: SolveResult, opts: SolveOptions, wall: float) -> RunReport:
    exact = _exact_mode(instance)
    num = _numfmt(exact)
    cert = verify_optimality(instance, result.plan, result.duals, epsilon_adm=opts.epsilon_adm)
    cert_dict = cert.as_dict()
    cert_dict["primal_value"] = num(cert.primal_value)
    cert_dict["dual_value"] = num(cert.dual_value)
    stats = result.stats.as_dict()
    stats["theta_history"] = [num(t) for t in stats["theta_history"]]
    theta_mode = opts.theta_mode or (
        THETA_THEOREM7 if (instance.metric is Metric.EUCLID and opts.pruning) else THETA_FULL_SCAN
    )
    return RunReport(
        value=num(result.value),
        metric=instance.metric.value,
        pruning=opts.pruning,
        theta_mode=theta_mode,
        epsilon_adm=opts.epsilon_adm,
        exact=exact,
        stats=stats,
        certificate=cert_dict,
        wall_time_s=wall,
    )


def _print_report(report: RunReport, fmt: str, out=None) -> None:
    out = out if out is not None else sys.stdout
    if fmt == "json":
        json.dump(report.to_dict(), out, indent=2, sort_keys=True)
        out.write("\n")
        return
    cert = report.certificate
    out.write(f"value: {report.value}\n")
    out.write(f"metric: {report.metric}\n")
    out.write(f"pruning: {'on' if report.pruning else 'off'}  theta: {report.theta_mode}\n")
    prune = report.stats["prune"]
    out.write(
        "scan: examined {examined} / {total} candidates, "
        "{ls} line stops, {vs} vertical stops, {re} region exclusions\n".format(
            examined=prune["candidates_examined"],
            total=prune["candidates_examined"] + prune["candidates_skipped"],
            ls=prune["line_stops"],
            vs=prune["vertical_stops"],
            re=prune["region_exclusions"],
        )
    )
    out.write(
        f"dual updates: {report.stats['dual_updates']}  "
        f"augmentations: {report.stats['augmentations']}\n"
    )
    out.write(f"certificate: {'ok' if cert['ok'] else 'FAILED ' + '; '.join(cert['messages'])}\n")
    out.write(f"wall time: {report.wall_time_s:.4f} s\n")


def _dump_plan(path: str, result: SolveResult) -> None:
    with open(path, "w") as fh:
        for (n, m) in sorted(result.plan.flows):
            fh.write(f"{n} {m} {result.plan.flows[(n, m)]}\n")


def _load_instance(args) -> tuple[ProblemInstance, int]:
    """Returns (instance, 0) or (None, exit_code)."""
    try:
        source = _load_measure(args.source)
        sink = _load_measure(args.sink)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, 3
    instance = ProblemInstance(source=source, sink=sink, metric=Metric(args.metric))
    violations = validate(instance)
    if violations:
        for v in violations:
            print(f"validation: {v}", file=sys.stderr)
        return None, 2
    return instance, 0


def _solve_options(args, pruning: bool) -> SolveOptions:
    return SolveOptions(
        pruning=pruning,
        theta_mode=_THETA_FLAGS[args.theta],
        epsilon_adm=args.tol,
    )


def cmd_solve(args) -> int:
    instance, code = _load_instance(args)
    if instance is None:
        return code
    opts = _solve_options(args, args.pruning == "on")
    try:
        t0 = time.perf_counter()
        result = solve(instance, opts)
        wall = time.perf_counter() - t0
    except (PreconditionError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = _make_report(instance, result, opts, wall)
    if args.plan_out:
        _dump_plan(args.plan_out, result)
    _print_report(report, args.format)
    return 0 if report.certificate["ok"] else 1


def _values_equal(a, b, instance: ProblemInstance, tol: float) -> bool:
    if _exact_mode(instance):
        return a == b
    return abs(a - b) <= max(tol, 1e-9) * (1 + abs(a))


def cmd_compare(args) -> int:
    instance, code = _load_instance(args)
    if instance is None:
        return code
    reports = {}
    values = {}
    try:
        for label, pruned in (("pruning_on", True), ("pruning_off", False)):
            opts = _solve_options(args, pruned)
            t0 = time.perf_counter()
            result = solve(instance, opts)
            wall = time.perf_counter() - t0
            reports[label] = _make_report(instance, result, opts, wall)
            values[label] = result.value
    except (PreconditionError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.inject_bad_prune:
        # fault injection: prove the comparison actually trips
        bump = 1 if _exact_mode(instance) else abs(values["pruning_on"]) * 1e-6 + 1e-6
        values["pruning_on"] += bump
        num = _numfmt(_exact_mode(instance))
        reports["pruning_on"].value = num(values["pruning_on"])
    equal = _values_equal(values["pruning_on"], values["pruning_off"], instance, args.tol)
    prune = reports["pruning_on"].stats["prune"]
    total = prune["candidates_examined"] + prune["candidates_skipped"]
    savings_ratio = (prune["candidates_examined"] / total) if total else 1.0
    paired = {
        "values_equal": equal,
        "savings_ratio": savings_ratio,
        "pruning_on": reports["pruning_on"].to_dict(),
        "pruning_off": reports["pruning_off"].to_dict(),
    }
    if args.format == "json":
        json.dump(paired, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        print(f"value (pruning on):  {reports['pruning_on'].value}")
        print(f"value (pruning off): {reports['pruning_off'].value}")
        print(f"values equal: {equal}")
        print(f"savings ratio (examined/full): {savings_ratio:.4f}")
    if not equal:
        print("error: pruned and exhaustive runs disagree", file=sys.stderr)
        return 1
    return 0


def cmd_bench(args) -> int:
    sizes = [int(tok) for tok in args.grid.split(",") if tok]
    metric = Metric(args.metric)
    rows = []
    for idx, n in enumerate(sizes):
        agg = {
            "dual_updates": 0, "augmentations": 0,
            "examined": 0, "full_scan_equiv": 0, "wall_s": 0.0,
        }
        for rep in range(args.reps):
            spec = InstanceGenSpec(
                seed=args.seed + 7919 * idx + rep,
                n_sources=n * n,
                n_sinks=n * n,
                coord_range=n - 1,
                mass_range=(1, 9),
                metric=metric,
                grid=True,
            )
            instance = random_instance(spec)
            opts = SolveOptions(pruning=True, theta_mode=_THETA_FLAGS[args.theta])
            t0 = time.perf_counter()
            result = solve(instance, opts)
            agg["wall_s"] += time.perf_counter() - t0
            agg["dual_updates"] += result.stats.dual_updates
            agg["augmentations"] += result.stats.augmentations
            agg["examined"] += result.stats.prune.candidates_examined
            agg["full_scan_equiv"] += result.stats.prune.total_candidates
        reps = args.reps
        full = agg["full_scan_equiv"] / reps
        examined = agg["examined"] / reps
        rows.append({
            "grid": n,
            "n_sources": n * n,
            "n_sinks": n * n,
            "reps": reps,
            "dual_updates": agg["dual_updates"] / reps,
            "augmentations": agg["augmentations"] / reps,
            "candidates_examined": examined,
            "full_scan_equiv": full,
            "examined_ratio": (examined / full) if full else 1.0,
            "wall_s": agg["wall_s"] / reps,
        })
    if args.format == "json":
        json.dump(rows, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return 0


def _serialize_failure(instance: ProblemInstance, seed: int, detail: str) -> str:
    buf = io.StringIO()
    buf.write(f"# oracle disagreement (seed {seed}): {detail}\n")
    buf.write(f"# metric: {instance.metric.value}\n")
    buf.write("# source measure:\n")
    buf.write(format_points(instance.source))
    buf.write("# sink measure:\n")
    buf.write(format_points(instance.sink))
    return buf.getvalue()


def cmd_oracle(args) -> int:
    metric = Metric(args.metric)
    checked = 0
    for i in range(args.random):
        seed = args.seed + i
        spec = random_oracle_spec(seed, metric, args.max_points)
        instance = random_instance(spec)
        truth = brute_force_optimal(instance)
        for pruned in (True, False):
            result = solve(instance, SolveOptions(pruning=pruned, epsilon_adm=args.tol))
            if _exact_mode(instance):
                ok = result.value == truth.value
            else:
                ok = abs(result.value - truth.value) <= max(args.tol, 1e-9) * (1 + abs(truth.value))
            if not ok:
                detail = (
                    f"pruning={'on' if pruned else 'off'}: "
                    f"solver {result.value} vs oracle {truth.value}"
                )
                sys.stderr.write(_serialize_failure(instance, seed, detail))
                return 1
        checked += 1
    print(json.dumps({"instances": checked, "metric": metric.value, "ok": True}))
    return 0


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--metric", required=True, choices=[m.value for m in Metric])
    p.add_argument("--source", required=True, help=".pts or plain-text PGM file")
    p.add_argument("--sink", required=True, help=".pts or plain-text PGM file")
    p.add_argument("--pruning", choices=["on", "off"], default="on")
    p.add_argument("--theta", choices=list(_THETA_FLAGS), default="auto")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="admissibility tolerance outside exact integer mode")
    p.add_argument("--format", choices=["json", "text"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kantor",
        description="Kantorovich distance between planar measures (primal-dual with scan pruning)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance and print a certified report")
    _add_instance_flags(p)
    p.add_argument("--plan-out", help="write the optimal plan as 'src_idx sink_idx flow' lines")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="run pruning on and off; values must agree")
    _add_instance_flags(p)
    p.add_argument("--inject-bad-prune", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="grid-size sweep reporting scan savings")
    p.add_argument("--grid", required=True, help="comma-separated grid sides, e.g. 8,16,32")
    p.add_argument("--metric", choices=[m.value for m in Metric], default="sqeuclid")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--theta", choices=list(_THETA_FLAGS), default="auto")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="check random instances against the brute-force optimum")
    p.add_argument("--random", type=int, required=True, metavar="COUNT")
    p.add_argument("--max-points", type=int, default=4, choices=range(1, 5),
                   help="max sources/sinks per side (oracle cap)")
    p.add_argument("--metric", choices=[m.value for m in Metric], default="l1")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KantorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
