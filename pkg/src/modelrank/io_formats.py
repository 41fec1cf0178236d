"""Scenario documents, metric tables, bundled datasets, and report export.

A scenario is a single JSON document (``format_version`` 1) carrying the
objective, the criteria tree with scales, weights (literal vectors
and/or raw stakeholder judgment matrices), knock-out rules, and the
alternatives with raw metrics. Documents are strict: unknown fields are
rejected with their location so typos never pass silently.

Saving always emits the canonical form (sorted keys, two-space indent,
trailing newline), so load followed by save is byte-stable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from . import ahp
from .ahp import PairwiseMatrix, PriorityVector, StakeholderJudgment
from .errors import ScenarioError, ValidationFailure
from .model import (
    Alternative,
    CategoricalScale,
    Criterion,
    DecisionProblem,
    KnockoutRule,
    ScaleBin,
    validate_problem,
)
from .scoring import ScoreBreakdown
from .sensitivity import SensitivityResult

FORMAT_VERSION = 1

#: Scenarios shipped with the package, keyed by short name.
BUNDLED_SCENARIOS = {
    "logistics": "logistics_investment.scenario.json",
    "logistics-alt-scales": "logistics_investment_alt_scales.scenario.json",
}
BUNDLED_METRICS = "logistics_model_quality.csv"


@dataclass
class Scenario:
    """A loaded scenario: the validated problem, any raw stakeholder
    judgments, warnings gathered while resolving weights, and the
    canonical document for round-tripping."""

    problem: DecisionProblem
    judgments: dict[str, tuple[StakeholderJudgment, ...]]
    warnings: tuple[str, ...]
    document: dict


# ---------------------------------------------------------------------------
# document structure checking


def _check_keys(node: Mapping, allowed: Iterable[str], required: Iterable[str], where: str):
    allowed_set = set(allowed)
    for key in node:
        if key not in allowed_set:
            raise ScenarioError(f"unknown field {key!r}", location=where)
    for key in required:
        if key not in node:
            raise ScenarioError(f"missing required field {key!r}", location=where)


def _expect(condition: bool, message: str, where: str):
    if not condition:
        raise ScenarioError(message, location=where)


def _check_number(value, where: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool),
            f"expected a number, got {value!r}", where)
    return float(value)


def _check_str(value, where: str) -> str:
    _expect(isinstance(value, str), f"expected a string, got {value!r}", where)
    return value


def _check_list(value, where: str) -> list:
    _expect(isinstance(value, list), f"expected a list, got {type(value).__name__}", where)
    return value


def _check_dict(value, where: str) -> dict:
    _expect(isinstance(value, dict), f"expected an object, got {type(value).__name__}", where)
    return value


def _parse_scale(node, where: str) -> CategoricalScale:
    node = _check_dict(node, where)
    _check_keys(node, ("kind", "bins", "levels"), ("kind",), where)
    kind = _check_str(node.get("kind"), f"{where}.kind")
    if kind == "numeric":
        _expect("bins" in node, "numeric scale needs 'bins'", where)
        _expect("levels" not in node, "numeric scale must not carry 'levels'", where)
        bins = []
        for k, raw in enumerate(_check_list(node["bins"], f"{where}.bins")):
            bin_where = f"{where}.bins[{k}]"
            raw = _check_dict(raw, bin_where)
            _check_keys(raw, ("label", "lower", "upper", "score"), ("label", "lower", "score"), bin_where)
            upper = raw.get("upper")
            bins.append(ScaleBin(
                label=_check_str(raw["label"], f"{bin_where}.label"),
                lower=_check_number(raw["lower"], f"{bin_where}.lower"),
                upper=None if upper is None else _check_number(upper, f"{bin_where}.upper"),
                score=_check_number(raw["score"], f"{bin_where}.score"),
            ))
        return CategoricalScale("numeric", tuple(bins))
    if kind == "label":
        _expect("levels" in node, "label scale needs 'levels'", where)
        _expect("bins" not in node, "label scale must not carry 'bins'", where)
        levels = []
        for k, raw in enumerate(_check_list(node["levels"], f"{where}.levels")):
            level_where = f"{where}.levels[{k}]"
            raw = _check_dict(raw, level_where)
            _check_keys(raw, ("label", "score"), ("label", "score"), level_where)
            levels.append(ScaleBin(
                label=_check_str(raw["label"], f"{level_where}.label"),
                score=_check_number(raw["score"], f"{level_where}.score"),
            ))
        return CategoricalScale("label", tuple(levels))
    raise ScenarioError(f"unknown scale kind {kind!r}", location=f"{where}.kind")


def _parse_vector(node, where: str) -> PriorityVector:
    node = _check_dict(node, where)
    _check_keys(node, ("labels", "values"), ("labels", "values"), where)
    labels = [_check_str(v, f"{where}.labels[{k}]")
              for k, v in enumerate(_check_list(node["labels"], f"{where}.labels"))]
    values = [_check_number(v, f"{where}.values[{k}]")
              for k, v in enumerate(_check_list(node["values"], f"{where}.values"))]
    _expect(len(labels) == len(values),
            f"{len(labels)} labels but {len(values)} values", where)
    return PriorityVector(tuple(labels), values)


def _parse_matrix(node, where: str) -> PairwiseMatrix:
    node = _check_dict(node, where)
    _check_keys(node, ("labels", "entries"), ("labels", "entries"), where)
    labels = [_check_str(v, f"{where}.labels[{k}]")
              for k, v in enumerate(_check_list(node["labels"], f"{where}.labels"))]
    rows = _check_list(node["entries"], f"{where}.entries")
    entries = []
    for r, row in enumerate(rows):
        row = _check_list(row, f"{where}.entries[{r}]")
        entries.append([_check_number(v, f"{where}.entries[{r}][{c}]")
                        for c, v in enumerate(row)])
        _expect(len(row) == len(labels),
                f"row {r} has {len(row)} entries for {len(labels)} labels", where)
    _expect(len(entries) == len(labels),
            f"{len(entries)} rows for {len(labels)} labels", where)
    return PairwiseMatrix(tuple(labels), entries)


def parse_document(document: Mapping) -> Scenario:
    """Build a validated scenario from a parsed JSON document.

    Weight resolution: a composite criterion takes its literal sub
    weights when present; otherwise the weights are derived from its
    stakeholder judgments (geometric-mean priorities per stakeholder,
    arithmetic-mean aggregation). Judgments present alongside literal
    weights are kept and consistency-checked, but the literal vector
    stays in effect. Consistency ratios above the 0.10 threshold are
    reported as warnings, never as failures.

    Raises:
        ScenarioError: structural problems (unknown/missing fields,
            wrong types), each naming its location in the document.
        ValidationFailure: the assembled problem breaks a semantic
            invariant; carries the full validation report.
    """
    document = _check_dict(document, "$")
    _check_keys(
        document,
        ("format_version", "objective", "criteria", "weights", "judgments",
         "knockouts", "alternatives"),
        ("format_version", "objective", "criteria", "weights", "alternatives"),
        "$",
    )
    version = document["format_version"]
    if version != FORMAT_VERSION:
        raise ScenarioError(
            f"unsupported format_version {version!r}; this build reads version {FORMAT_VERSION}",
            location="format_version",
        )
    objective = _check_str(document["objective"], "objective")

    criteria = []
    for k, raw in enumerate(_check_list(document["criteria"], "criteria")):
        where = f"criteria[{k}]"
        raw = _check_dict(raw, where)
        _check_keys(raw, ("id", "name", "kind", "direction", "scale", "children"),
                    ("id", "name"), where)
        scale = None
        if "scale" in raw and raw["scale"] is not None:
            scale = _parse_scale(raw["scale"], f"{where}.scale")
        children = tuple(
            _check_str(c, f"{where}.children[{j}]")
            for j, c in enumerate(_check_list(raw.get("children", []), f"{where}.children"))
        )
        criteria.append(Criterion(
            id=_check_str(raw["id"], f"{where}.id"),
            name=_check_str(raw["name"], f"{where}.name"),
            kind=_check_str(raw.get("kind", "quantitative"), f"{where}.kind"),
            direction=_check_str(raw.get("direction", "benefit"), f"{where}.direction"),
            scale=scale,
            children=children,
        ))

    weights_node = _check_dict(document["weights"], "weights")
    _check_keys(weights_node, ("top_level", "sub"), ("top_level",), "weights")
    top_level = _parse_vector(weights_node["top_level"], "weights.top_level")
    literal_sub = {}
    for criterion_id, raw in _check_dict(weights_node.get("sub", {}), "weights.sub").items():
        literal_sub[criterion_id] = _parse_vector(raw, f"weights.sub.{criterion_id}")

    judgments: dict[str, tuple[StakeholderJudgment, ...]] = {}
    for criterion_id, raw_list in _check_dict(document.get("judgments", {}), "judgments").items():
        parsed = []
        for k, raw in enumerate(_check_list(raw_list, f"judgments.{criterion_id}")):
            where = f"judgments.{criterion_id}[{k}]"
            raw = _check_dict(raw, where)
            _check_keys(raw, ("stakeholder", "labels", "entries"),
                        ("stakeholder", "labels", "entries"), where)
            matrix = _parse_matrix({"labels": raw["labels"], "entries": raw["entries"]}, where)
            parsed.append(StakeholderJudgment(
                stakeholder_id=_check_str(raw["stakeholder"], f"{where}.stakeholder"),
                matrix=matrix,
            ))
        judgments[criterion_id] = tuple(parsed)

    knockouts = []
    for k, raw in enumerate(_check_list(document.get("knockouts", []), "knockouts")):
        where = f"knockouts[{k}]"
        raw = _check_dict(raw, where)
        _check_keys(raw, ("criterion", "predicate", "threshold", "reason"),
                    ("criterion", "predicate", "threshold"), where)
        predicate = _check_str(raw["predicate"], f"{where}.predicate")
        threshold = raw["threshold"]
        if predicate == "in":
            labels = _check_list(threshold, f"{where}.threshold")
            threshold = frozenset(_check_str(v, f"{where}.threshold[{j}]")
                                  for j, v in enumerate(labels))
        else:
            threshold = _check_number(threshold, f"{where}.threshold")
        knockouts.append(KnockoutRule(
            criterion_id=_check_str(raw["criterion"], f"{where}.criterion"),
            predicate=predicate,
            threshold=threshold,
            reason_template=_check_str(raw.get("reason", ""), f"{where}.reason"),
        ))

    alternatives = []
    for k, raw in enumerate(_check_list(document["alternatives"], "alternatives")):
        where = f"alternatives[{k}]"
        raw = _check_dict(raw, where)
        _check_keys(raw, ("id", "metrics"), ("id", "metrics"), where)
        metrics = {}
        for criterion_id, value in _check_dict(raw["metrics"], f"{where}.metrics").items():
            if isinstance(value, str):
                metrics[criterion_id] = value
            else:
                metrics[criterion_id] = _check_number(value, f"{where}.metrics.{criterion_id}")
        alternatives.append(Alternative(id=_check_str(raw["id"], f"{where}.id"), metrics=metrics))

    warnings: list[str] = []
    sub_weights = dict(literal_sub)
    for criterion_id, group in judgments.items():
        reports = ahp.stakeholder_reports(group)
        for judgment, _, report in reports:
            if not report.acceptable:
                warnings.append(
                    f"stakeholder {judgment.stakeholder_id} on {criterion_id!r}: "
                    f"CR {report.cr:.3f} exceeds {ahp.CR_THRESHOLD:.2f}"
                )
        if criterion_id not in sub_weights:
            sub_weights[criterion_id] = ahp.aggregate_priorities(
                [weights for _, weights, _ in reports]
            )

    problem = DecisionProblem(
        objective=objective,
        criteria=tuple(criteria),
        top_level_weights=top_level,
        sub_weights=sub_weights,
        alternatives=tuple(alternatives),
        knockouts=tuple(knockouts),
    )
    violations = validate_problem(problem)
    if violations:
        raise ValidationFailure("scenario failed validation", violations)
    return Scenario(
        problem=problem,
        judgments=judgments,
        warnings=tuple(warnings),
        document=json.loads(dumps_scenario(document)),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Load and validate a scenario file.

    Raises:
        ScenarioError: unreadable file or malformed JSON (with line and
            column) or structural schema problems (with location).
        ValidationFailure: semantic validation report.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}", location=str(path)) from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"malformed JSON: {exc.msg}", location=f"{path}:{exc.lineno}:{exc.colno}"
        ) from exc
    return parse_document(document)


def dumps_scenario(document: Mapping) -> str:
    """Serialize a scenario document in canonical form."""
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save_scenario(document: Mapping, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_scenario(document), encoding="utf-8")


def bundled_scenario_path(name: str = "logistics") -> Path:
    """Filesystem path of a bundled scenario (see BUNDLED_SCENARIOS)."""
    filename = BUNDLED_SCENARIOS.get(name, name)
    path = resources.files("modelrank.data") / filename
    return Path(str(path))


def bundled_metrics_path() -> Path:
    return Path(str(resources.files("modelrank.data") / BUNDLED_METRICS))


# ---------------------------------------------------------------------------
# metric tables


@dataclass(frozen=True)
class MetricsTable:
    """Rectangular table of per-alternative metric values."""

    header: tuple[str, ...]
    rows: tuple[tuple[str, dict], ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(row_id for row_id, _ in self.rows)

    def metrics_for(self, row_id: str) -> dict:
        for candidate, values in self.rows:
            if candidate == row_id:
                return values
        raise KeyError(f"no row {row_id!r}")


def load_metrics_csv(
    path: Union[str, Path],
    label_columns: Sequence[str] = (),
) -> MetricsTable:
    """Load a metrics CSV: header row, first column alternative id.

    Cells must parse as numbers except in columns named by
    ``label_columns``, which stay strings (qualitative metrics).

    Raises:
        ScenarioError: missing header, ragged rows, duplicate ids, or
            non-numeric cells, each reported with its row number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read metrics file: {exc}", location=str(path)) from exc
    reader = csv.reader(text.splitlines())
    rows = list(reader)
    if not rows or not rows[0]:
        raise ScenarioError("missing header row", location=str(path))
    header = tuple(cell.strip() for cell in rows[0])
    if len(header) < 2:
        raise ScenarioError("header must name an id column and at least one metric",
                            location=f"{path}:1")
    labels = set(label_columns)
    parsed: list[tuple[str, dict]] = []
    seen: set[str] = set()
    for line_number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ScenarioError(
                f"expected {len(header)} cells, got {len(row)}",
                location=f"{path}:{line_number}",
            )
        row_id = row[0].strip()
        if row_id in seen:
            raise ScenarioError(f"duplicate id {row_id!r}", location=f"{path}:{line_number}")
        seen.add(row_id)
        values: dict = {}
        for column, cell in zip(header[1:], row[1:]):
            cell = cell.strip()
            if column in labels:
                values[column] = cell
                continue
            try:
                values[column] = float(cell)
            except ValueError:
                raise ScenarioError(
                    f"non-numeric value {cell!r} in column {column!r}",
                    location=f"{path}:{line_number}",
                ) from None
        parsed.append((row_id, values))
    return MetricsTable(header=header, rows=tuple(parsed))


# ---------------------------------------------------------------------------
# report export


def _report_columns(problem: DecisionProblem) -> list[tuple[str, str, str]]:
    """Column plan: (header, kind, criterion id) in presentation order."""
    columns: list[tuple[str, str, str]] = [("alternative", "id", "")]
    for criterion_id in problem.top_level_weights.labels:
        criterion = problem.criterion(criterion_id)
        if criterion.children:
            for child in criterion.children:
                columns.append((child, "raw_fraction", child))
            columns.append((criterion_id, "score", criterion_id))
        elif criterion.scale is not None and criterion.scale.kind == "numeric":
            columns.append((f"{criterion_id}_value", "raw_value", criterion_id))
            columns.append((criterion_id, "scored_label", criterion_id))
        else:
            columns.append((criterion_id, "scored_label", criterion_id))
    columns.append(("total", "total", ""))
    return columns


def _cell(breakdown: ScoreBreakdown, kind: str, criterion_id: str) -> str:
    if kind == "id":
        return breakdown.alternative_id
    if kind == "raw_fraction":
        return f"{breakdown.sub_scores[criterion_id]:.3f}"
    if kind == "raw_value":
        return f"{breakdown.sub_scores[criterion_id]:g}"
    if kind == "score":
        return f"{breakdown.criterion_scores[criterion_id]:.3f}"
    if kind == "scored_label":
        score = breakdown.criterion_scores[criterion_id]
        label = breakdown.labels.get(criterion_id)
        return f"{score:.3f} ({label})" if label else f"{score:.3f}"
    if kind == "total":
        return f"{breakdown.total:.3f}"
    raise ValueError(f"unknown column kind {kind!r}")


def _sensitivity_lines(result: SensitivityResult) -> list[str]:
    lines = [
        f"sweep of {result.criterion_id} (baseline {result.baseline_weight:.3f}): "
        f"top stable on [{result.stability_interval.lower:.3f}, "
        f"{result.stability_interval.upper:.3f}]"
    ]
    for reversal in result.reversals:
        lines.append(
            f"reversal at {reversal.weight:.4f}: {reversal.displacing} "
            f"overtakes {reversal.displaced}"
        )
    return lines


def export_report(
    problem: DecisionProblem,
    breakdowns: Sequence[ScoreBreakdown],
    sensitivity: Sequence[SensitivityResult] = (),
    fmt: str = "markdown",
) -> str:
    """Render scored alternatives (and optional sweeps) as a document.

    Output is deterministic for fixed inputs: fixed column order derived
    from the problem, three decimals for scores, full precision in JSON.

    Args:
        fmt: ``markdown`` (one table row per alternative, best first),
            ``csv`` (same cells), or ``json`` (full precision).
    """
    if fmt == "json":
        payload = {
            "objective": problem.objective,
            "breakdowns": [
                {
                    "alternative_id": b.alternative_id,
                    "criterion_scores": b.criterion_scores,
                    "sub_scores": b.sub_scores,
                    "labels": b.labels,
                    "total": b.total,
                    "rank": b.rank,
                }
                for b in breakdowns
            ],
            "sensitivity": [
                {
                    "criterion_id": s.criterion_id,
                    "baseline_weight": s.baseline_weight,
                    "stability_interval": {
                        "lower": s.stability_interval.lower,
                        "upper": s.stability_interval.upper,
                        "tie_at_baseline": s.stability_interval.tie_at_baseline,
                    },
                    "reversals": [
                        {"weight": r.weight, "displaced": r.displaced, "displacing": r.displacing}
                        for r in s.reversals
                    ],
                    "sweep": [
                        {"weight": p.weight, "ranking": list(p.ranking), "totals": p.totals}
                        for p in s.sweep
                    ],
                }
                for s in sensitivity
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    columns = _report_columns(problem)
    header = [name for name, _, _ in columns]
    body = [[_cell(b, kind, cid) for _, kind, cid in columns] for b in breakdowns]

    if fmt == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(row) for row in body)
        for result in sensitivity:
            lines.append("")
            lines.extend(_sensitivity_lines(result))
        return "\n".join(lines) + "\n"

    if fmt == "markdown":
        widths = [max(len(header[k]), *(len(row[k]) for row in body)) if body else len(header[k])
                  for k in range(len(header))]
        def fmt_row(cells):
            return "| " + " | ".join(cell.ljust(widths[k]) for k, cell in enumerate(cells)) + " |"
        lines = [fmt_row(header),
                 "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
        lines.extend(fmt_row(row) for row in body)
        for result in sensitivity:
            lines.append("")
            lines.extend(_sensitivity_lines(result))
        return "\n".join(lines) + "\n"

    raise ValueError(f"unknown report format {fmt!r}")
