"""Command-line front end for the decision pipeline.

Subcommands run the pipeline end to end or step by step:

    validate     check a scenario file, print the violation report
    weights      per-stakeholder and group criterion weights + CR table
    screen       knock-out screening: retained and eliminated alternatives
    rank         screening + scored ranking (the full pipeline)
    sensitivity  one-at-a-time weight sweep, stability interval, sampling
    report       exportable ranking report (markdown / csv / json)
    serve        start the HTTP/JSON service

Exit codes: 0 success, 1 validation failure, 2 usage error. Output for
a fixed invocation and scenario is byte-identical across runs (sampling
included, since the seed defaults to a constant).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import ahp, io_formats
from .errors import ModelRankError, ScenarioError, ValidationFailure
from .model import apply_knockouts
from .scoring import total_scores
from .sensitivity import oat_sweep, random_weight_sampling, stability_interval

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2

DEFAULT_PORT = 8080
PORT_ENV_VAR = "MODELRANK_PORT"
DATA_DIR_ENV_VAR = "MODELRANK_DATA_DIR"


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _load(path: str):
    """Load a scenario, mapping failures onto the exit-code contract."""
    scenario_path = Path(path)
    if not scenario_path.exists():
        raise _UsageError(f"scenario file not found: {scenario_path}")
    return io_formats.load_scenario(scenario_path)


class _UsageError(Exception):
    pass


def _weight_header(columns) -> str:
    return f"{'':<16} " + "  ".join(f"{c:>{max(6, len(c))}}" for c in columns)


def _format_weight_row(label: str, vector, columns) -> str:
    return f"{label:<16} " + "  ".join(
        f"{vector.weight_for(c):>{max(6, len(c))}.2f}" for c in columns
    )


def cmd_validate(args) -> int:
    try:
        scenario = _load(args.scenario)
    except ValidationFailure as exc:
        print("scenario INVALID:")
        for violation in exc.violations:
            print(f"  - {violation}")
        return EXIT_VALIDATION
    print(f"scenario OK: {len(scenario.problem.alternatives)} alternatives, "
          f"{len(scenario.problem.criteria)} criteria, "
          f"{len(scenario.problem.knockouts)} knock-out rule(s)")
    for warning in scenario.warnings:
        print(f"warning: {warning}")
    return EXIT_OK


def cmd_weights(args) -> int:
    scenario = _load(args.scenario)
    problem = scenario.problem
    method = "geometric" if args.method == "geometric" else "eigen"
    threshold = args.cr_threshold

    if not scenario.judgments:
        print("no stakeholder judgments in scenario; literal weights in effect")
    for criterion_id, group in sorted(scenario.judgments.items()):
        columns = group[0].matrix.labels
        print(f"criterion group {criterion_id!r} ({args.method} priorities)")
        print(_weight_header(columns) + f"  {'CR':>7}  flag")
        reports = ahp.stakeholder_reports(group, method=method, threshold=threshold)
        for judgment, weights, report in reports:
            flag = "ok" if report.acceptable else f"CR {report.cr:.3f} > {threshold:.2f}"
            print(_format_weight_row(judgment.stakeholder_id, weights, columns)
                  + f"  {report.cr:>7.3f}  {flag}")
        if args.aggregate == "aip":
            group_weights = ahp.aggregate_priorities([w for _, w, _ in reports])
        else:
            merged = ahp.aggregate_judgments(list(group))
            prioritize = ahp.priorities_geometric if method == "geometric" else ahp.priorities_eigen
            group_weights = prioritize(merged)
        print(_format_weight_row(f"group ({args.aggregate})", group_weights, columns))
        if criterion_id in problem.sub_weights:
            effective = problem.sub_weights[criterion_id]
            print(_format_weight_row("in effect", effective, columns))
        print()

    top = problem.top_level_weights
    print("top-level weights")
    print(_format_weight_row("literal", top, top.labels))
    print("  labels: " + ", ".join(top.labels))
    return EXIT_OK


def cmd_screen(args) -> int:
    scenario = _load(args.scenario)
    screening = apply_knockouts(scenario.problem, verbose=args.verbose)
    print(f"retained {len(screening.retained)} of "
          f"{len(scenario.problem.alternatives)} alternatives")
    for alternative in screening.retained:
        print(f"  keep  {alternative.id}")
    for elimination in screening.eliminated:
        print(f"  drop  {elimination.alternative.id}: {elimination.reason}")
        if args.verbose:
            for reason in elimination.all_failures[1:]:
                print(f"        also: {reason}")
    return EXIT_OK


def cmd_rank(args) -> int:
    scenario = _load(args.scenario)
    problem = scenario.problem
    screening = apply_knockouts(problem)
    breakdowns = total_scores(problem, screening.retained, validate=False)
    if args.format in ("markdown", "csv", "json"):
        sys.stdout.write(io_formats.export_report(problem, breakdowns, fmt=args.format))
        return EXIT_OK
    print(f"screened out {len(screening.eliminated)} of "
          f"{len(problem.alternatives)} alternatives; ranking the rest")
    for warning in scenario.warnings:
        print(f"warning: {warning}")
    header = ["rank", "alternative"] + [f"{cid}" for cid in problem.top_level_weights.labels] + ["total"]
    print("  ".join(f"{cell:>12}" for cell in header))
    for b in breakdowns:
        cells = [str(b.rank), b.alternative_id]
        cells += [f"{b.criterion_scores[cid]:.3f}" for cid in problem.top_level_weights.labels]
        cells += [f"{b.total:.3f}"]
        print("  ".join(f"{cell:>12}" for cell in cells))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    scenario = _load(args.scenario)
    problem = scenario.problem
    if args.criterion not in problem.top_level_weights.labels:
        raise _UsageError(
            f"unknown criterion {args.criterion!r}; "
            f"choose from {', '.join(problem.top_level_weights.labels)}"
        )
    result = oat_sweep(problem, args.criterion, grid=args.grid)
    interval = stability_interval(problem, args.criterion, tol=args.tol)
    print(f"sweep of {args.criterion} weight over [0, 1), {args.grid} points "
          f"(baseline {result.baseline_weight:.4f})")
    previous_top = None
    for point in result.sweep:
        top = point.ranking[0]
        marker = ""
        if previous_top is not None and top != previous_top:
            marker = "  <- top changes"
        if abs(point.weight - result.baseline_weight) < 0.5 / args.grid:
            marker += "  (baseline)"
        print(f"  w = {point.weight:.4f}  top = {top}  "
              f"ranking = {' > '.join(point.ranking)}{marker}")
        previous_top = top
    if interval.tie_at_baseline:
        print("tie at baseline: stability interval degenerate")
    print(f"top-ranked alternative stable for {args.criterion} weight in "
          f"[{interval.lower:.4f}, {interval.upper:.4f}]")
    for reversal in result.reversals:
        print(f"reversal near {reversal.weight:.4f}: "
              f"{reversal.displacing} overtakes {reversal.displaced}")
    if args.samples:
        frequencies = random_weight_sampling(problem, args.samples, seed=args.seed)
        print(f"top-rank frequencies over {args.samples} simplex samples (seed {args.seed}):")
        for alternative_id, frequency in frequencies.items():
            print(f"  {alternative_id}: {frequency:.4f}")
    return EXIT_OK


def cmd_report(args) -> int:
    scenario = _load(args.scenario)
    problem = scenario.problem
    screening = apply_knockouts(problem)
    breakdowns = total_scores(problem, screening.retained, validate=False)
    sweeps = []
    for criterion_id in args.sweep or []:
        if criterion_id not in problem.top_level_weights.labels:
            raise _UsageError(f"unknown criterion {criterion_id!r} for --sweep")
        sweeps.append(oat_sweep(problem, criterion_id, grid=args.grid))
    document = io_formats.export_report(problem, breakdowns, sweeps, fmt=args.format)
    if args.output:
        Path(args.output).write_text(document, encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(document)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    data_dir = Path(args.data_dir)
    app = create_app(data_dir=data_dir, cors_origins=args.cors_origin)
    if args.scenario:
        scenario = _load(args.scenario)
        session = app.state.store.create(scenario.document)
        print(f"preloaded scenario as session {session.id}")
    print(f"serving on port {args.port}, sessions in {data_dir}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelrank",
        description="Rank alternatives under conflicting criteria: "
                    "screening, pairwise weighting, weighted-sum scoring, sensitivity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("weights", help="criterion weights and consistency table")
    p.add_argument("scenario")
    p.add_argument("--method", choices=("geometric", "eigen"), default="geometric")
    p.add_argument("--aggregate", choices=("aip", "aij"), default="aip",
                   help="aggregate priorities (aip) or judgments (aij)")
    p.add_argument("--cr-threshold", type=float, default=ahp.CR_THRESHOLD)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("screen", help="apply knock-out rules")
    p.add_argument("scenario")
    p.add_argument("--verbose", action="store_true", help="list every failing rule")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("rank", help="screen, score, and rank")
    p.add_argument("scenario")
    p.add_argument("--format", choices=("table", "markdown", "csv", "json"), default="table")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sensitivity", help="weight sweep and stability interval")
    p.add_argument("scenario")
    p.add_argument("--criterion", required=True)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--samples", type=int, default=0,
                   help="additionally sample this many random weight vectors")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("report", help="export the ranking report")
    p.add_argument("scenario")
    p.add_argument("--format", choices=("markdown", "csv", "json"), default="markdown")
    p.add_argument("--output", help="write to this file instead of stdout")
    p.add_argument("--sweep", action="append", metavar="CRITERION",
                   help="include a sensitivity sweep (repeatable)")
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP/JSON service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT)))
    p.add_argument("--data-dir",
                   default=os.environ.get(DATA_DIR_ENV_VAR, "modelrank_sessions"))
    p.add_argument("--scenario", help="preload this scenario as a session")
    p.add_argument("--cors-origin", action="append", default=None,
                   help="allowed browser origin (repeatable; default *)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        return _fail_usage(str(exc))
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ModelRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
