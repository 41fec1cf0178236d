"""Decision problem representation, knock-out screening, and scale mapping.

A :class:`DecisionProblem` holds a two-level criteria tree (top-level
criteria, optionally with leaf sub-criteria), the alternatives with
their raw metrics, categorical scales that turn raw values into scores,
knock-out rules, and the weight vectors. Everything is an immutable
value; operations are pure functions over them.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .ahp import PriorityVector
from .errors import ScaleError, ValidationFailure

QUANTITATIVE = "quantitative"
QUALITATIVE = "qualitative"

BENEFIT = "benefit"
COST = "cost"

#: Knock-out predicates: an alternative survives a rule when its value
#: satisfies the predicate against the threshold.
PREDICATES = (">=", "<=", "=", "in")


def _is_number(value) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


@dataclass(frozen=True)
class ScaleBin:
    """One bin of a categorical scale: a label, its score, and (for
    numeric scales) the half-open value range [lower, upper) it covers."""

    label: str
    score: float
    lower: Optional[float] = None
    upper: Optional[float] = None


@dataclass(frozen=True)
class CategoricalScale:
    """Maps raw metric values (or qualitative labels) onto scored categories.

    ``kind`` is ``"numeric"`` for scales over a contiguous range of
    half-open bins (lower-inclusive, upper-exclusive, last bin may be
    unbounded above) or ``"label"`` for direct label-to-score lists.
    """

    kind: str
    bins: tuple[ScaleBin, ...]

    def __post_init__(self):
        object.__setattr__(self, "bins", tuple(self.bins))

    @classmethod
    def numeric(cls, bins: Sequence[tuple[str, float, Optional[float], float]]) -> "CategoricalScale":
        """Build a numeric scale from (label, lower, upper, score) tuples."""
        return cls("numeric", tuple(
            ScaleBin(label=label, lower=float(lower),
                     upper=None if upper is None else float(upper), score=float(score))
            for label, lower, upper, score in bins
        ))

    @classmethod
    def labels(cls, levels: Sequence[tuple[str, float]]) -> "CategoricalScale":
        """Build a label scale from (label, score) pairs."""
        return cls("label", tuple(
            ScaleBin(label=label, score=float(score)) for label, score in levels
        ))

    def validate(self) -> list[str]:
        """Return violations of the scale invariants, empty if fine."""
        violations: list[str] = []
        if self.kind not in ("numeric", "label"):
            return [f"unknown scale kind {self.kind!r}"]
        if not self.bins:
            return ["scale has no bins"]
        seen = set()
        for k, b in enumerate(self.bins):
            if b.label in seen:
                violations.append(f"duplicate scale label {b.label!r}")
            seen.add(b.label)
            if not (0.0 < b.score <= 1.0):
                violations.append(f"bin {b.label!r} score {b.score} must be in (0, 1]")
            if self.kind == "label":
                if b.lower is not None or b.upper is not None:
                    violations.append(f"label-scale bin {b.label!r} must not carry bounds")
            else:
                if b.lower is None:
                    violations.append(f"numeric bin {b.label!r} needs a lower bound")
                if b.upper is not None and b.lower is not None and b.upper <= b.lower:
                    violations.append(f"bin {b.label!r} upper bound {b.upper} must exceed lower {b.lower}")
                if b.upper is None and k != len(self.bins) - 1:
                    violations.append(f"only the last numeric bin may be unbounded, not {b.label!r}")
        if self.kind == "numeric" and not violations:
            for prev, nxt in zip(self.bins, self.bins[1:]):
                if prev.upper != nxt.lower:
                    violations.append(
                        f"bins {prev.label!r} and {nxt.label!r} do not tile contiguously "
                        f"({prev.upper} vs {nxt.lower})"
                    )
        return violations

    def coverage(self) -> str:
        if self.kind == "label":
            return "{" + ", ".join(b.label for b in self.bins) + "}"
        last = self.bins[-1]
        upper = "inf" if last.upper is None else f"{last.upper:g}"
        return f"[{self.bins[0].lower:g}, {upper})"


def map_categorical(value, scale: CategoricalScale) -> tuple[str, float]:
    """Assign a raw value to its scale bin.

    Numeric scales use lower-inclusive / upper-exclusive bins, so a
    value sitting exactly on a boundary falls into the higher bin.

    Returns:
        (label, score) of the matched bin.

    Raises:
        ScaleError: value outside the covered range, unknown label, or a
            value of the wrong type for the scale.
    """
    if scale.kind == "label":
        if not isinstance(value, str):
            raise ScaleError(f"label scale expects a label, got {value!r}")
        for b in scale.bins:
            if b.label == value:
                return b.label, b.score
        raise ScaleError(f"label {value!r} not in scale {scale.coverage()}")
    if not _is_number(value):
        raise ScaleError(f"numeric scale expects a number, got {value!r}")
    v = float(value)
    for b in scale.bins:
        if v >= b.lower and (b.upper is None or v < b.upper):
            return b.label, b.score
    raise ScaleError(f"value {v:g} outside scale coverage {scale.coverage()}")


@dataclass(frozen=True)
class Criterion:
    """A node of the criteria tree.

    Composite criteria list their children (leaf ids) and carry no
    scale; leaves may carry a scale that maps raw values to scores.
    Direction marks whether larger raw values are better (benefit) or
    worse (cost); it matters only to normalization helpers, since
    scales already encode direction in their scores.
    """

    id: str
    name: str
    kind: str = QUANTITATIVE
    direction: str = BENEFIT
    scale: Optional[CategoricalScale] = None
    children: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class Alternative:
    """A candidate under evaluation: an id plus raw metric values keyed
    by leaf criterion id (numbers for quantitative leaves, labels for
    qualitative ones)."""

    id: str
    metrics: Mapping[str, Union[float, str]]

    def __post_init__(self):
        object.__setattr__(self, "metrics", dict(self.metrics))


@dataclass(frozen=True)
class KnockoutRule:
    """Hard constraint an alternative must satisfy to stay in the running."""

    criterion_id: str
    predicate: str
    threshold: Union[float, frozenset]
    reason_template: str = ""

    def __post_init__(self):
        threshold = self.threshold
        if isinstance(threshold, (list, tuple, set, frozenset)):
            threshold = frozenset(threshold)
        object.__setattr__(self, "threshold", threshold)

    def satisfied(self, value) -> bool:
        if self.predicate == "in":
            return value in self.threshold
        if not _is_number(value):
            return False
        if self.predicate == ">=":
            return value >= self.threshold
        if self.predicate == "<=":
            return value <= self.threshold
        if self.predicate == "=":
            return value == self.threshold
        raise ValidationFailure(f"unknown predicate {self.predicate!r}")

    def describe_threshold(self) -> str:
        if isinstance(self.threshold, frozenset):
            return "{" + ", ".join(sorted(self.threshold)) + "}"
        return f"{self.threshold:g}"

    def reason(self, value) -> str:
        fields = {
            "criterion": self.criterion_id,
            "predicate": self.predicate,
            "threshold": self.describe_threshold(),
            "value": value if isinstance(value, str) else f"{value:g}",
        }
        if self.reason_template:
            return self.reason_template.format(**fields)
        return "{criterion} value {value} fails requirement {criterion} {predicate} {threshold}".format(**fields)


@dataclass(frozen=True)
class DecisionProblem:
    """A complete decision problem ready for screening and scoring."""

    objective: str
    criteria: tuple[Criterion, ...]
    top_level_weights: PriorityVector
    sub_weights: Mapping[str, PriorityVector]
    alternatives: tuple[Alternative, ...]
    knockouts: tuple[KnockoutRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "sub_weights", dict(self.sub_weights))
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "knockouts", tuple(self.knockouts))

    def criterion(self, criterion_id: str) -> Criterion:
        for criterion in self.criteria:
            if criterion.id == criterion_id:
                return criterion
        raise KeyError(f"unknown criterion {criterion_id!r}")

    def has_criterion(self, criterion_id: str) -> bool:
        return any(criterion.id == criterion_id for criterion in self.criteria)

    def top_level_ids(self) -> tuple[str, ...]:
        """Criteria that are nobody's child, in declaration order."""
        child_ids = {child for criterion in self.criteria for child in criterion.children}
        return tuple(c.id for c in self.criteria if c.id not in child_ids)

    def leaf_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.criteria if c.is_leaf)


@dataclass(frozen=True)
class Elimination:
    """Record of a screened-out alternative: the first failing rule and
    why, plus every failing rule when screening ran in verbose mode."""

    alternative: Alternative
    rule: KnockoutRule
    reason: str
    all_failures: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScreeningResult:
    retained: tuple[Alternative, ...]
    eliminated: tuple[Elimination, ...]

    @property
    def retained_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.retained)


def _first_failure(alternative: Alternative, rules: Sequence[KnockoutRule]):
    """First rule the alternative fails (rule order), or None if it survives.

    A rule whose metric the alternative does not carry counts as failed:
    screening never retains an alternative it cannot vouch for.
    """
    for rule in rules:
        if rule.criterion_id not in alternative.metrics:
            return rule, f"no value for criterion {rule.criterion_id}", False
        value = alternative.metrics[rule.criterion_id]
        if not rule.satisfied(value):
            return rule, rule.reason(value), True
    return None


def apply_knockouts(problem: DecisionProblem, verbose: bool = False) -> ScreeningResult:
    """Partition alternatives into retained and eliminated.

    Eliminations cite the first failing rule in rule order; with
    ``verbose`` every failing rule is listed as well. Retained
    alternatives keep their input order.

    Raises:
        ValidationFailure: a rule references a criterion the problem
            does not define.
    """
    for rule in problem.knockouts:
        if not problem.has_criterion(rule.criterion_id):
            raise ValidationFailure(
                f"knock-out rule references unknown criterion {rule.criterion_id!r}"
            )
    retained: list[Alternative] = []
    eliminated: list[Elimination] = []
    for alternative in problem.alternatives:
        failure = _first_failure(alternative, problem.knockouts)
        if failure is None:
            retained.append(alternative)
            continue
        rule, reason, _ = failure
        all_failures: tuple[str, ...] = ()
        if verbose:
            reasons = []
            for candidate in problem.knockouts:
                if candidate.criterion_id not in alternative.metrics:
                    reasons.append(f"no value for criterion {candidate.criterion_id}")
                    continue
                value = alternative.metrics[candidate.criterion_id]
                if not candidate.satisfied(value):
                    reasons.append(candidate.reason(value))
            all_failures = tuple(reasons)
        eliminated.append(Elimination(alternative, rule, reason, all_failures))
    return ScreeningResult(tuple(retained), tuple(eliminated))


def _excused_from_coverage(alternative: Alternative, rules: Sequence[KnockoutRule]) -> bool:
    """True when screening provably eliminates the alternative from the
    metrics it does carry, so missing values for other leaves are moot."""
    failure = _first_failure(alternative, rules)
    return failure is not None and failure[2]


def validate_problem(problem: DecisionProblem) -> list[str]:
    """Check every structural invariant of a decision problem.

    Returns one entry per violation; an empty list means the problem is
    ready for screening and scoring. Alternatives must supply a value
    for every leaf criterion unless a knock-out rule demonstrably
    eliminates them from the values they do supply (screening runs
    before scoring, so screened-out alternatives are never scored).
    """
    violations: list[str] = []
    ids = [criterion.id for criterion in problem.criteria]
    id_set = set(ids)
    for criterion_id in sorted({i for i in ids if ids.count(i) > 1}):
        violations.append(f"duplicate criterion id {criterion_id!r}")

    parents: dict[str, str] = {}
    for criterion in problem.criteria:
        if criterion.children and criterion.scale is not None:
            violations.append(f"composite criterion {criterion.id!r} must not carry a scale")
        if criterion.kind not in (QUANTITATIVE, QUALITATIVE):
            violations.append(f"criterion {criterion.id!r} has unknown kind {criterion.kind!r}")
        if criterion.direction not in (BENEFIT, COST):
            violations.append(f"criterion {criterion.id!r} has unknown direction {criterion.direction!r}")
        for child_id in criterion.children:
            if child_id not in id_set:
                violations.append(
                    f"criterion {criterion.id!r} references unknown child {child_id!r}"
                )
                continue
            if child_id in parents:
                violations.append(f"criterion {child_id!r} has multiple parents")
            parents[child_id] = criterion.id
            if child_id == criterion.id:
                violations.append(f"criterion {criterion.id!r} is its own child")
        if criterion.scale is not None:
            for problem_text in criterion.scale.validate():
                violations.append(f"scale of {criterion.id!r}: {problem_text}")

    for criterion in problem.criteria:
        if not criterion.children:
            continue
        for child_id in criterion.children:
            if child_id in id_set:
                try:
                    child = problem.criterion(child_id)
                except KeyError:
                    continue
                if child.children:
                    violations.append(
                        f"criterion {child_id!r} nests below {criterion.id!r}; "
                        "hierarchies deeper than two levels are not supported"
                    )

    top_ids = problem.top_level_ids()
    for text in problem.top_level_weights.validate():
        violations.append(f"top-level weights: {text}")
    if set(problem.top_level_weights.labels) != set(top_ids):
        violations.append(
            f"top-level weights cover {sorted(problem.top_level_weights.labels)}, "
            f"expected exactly {sorted(top_ids)}"
        )
    else:
        total = float(np.sum(problem.top_level_weights.weights))
        if abs(total - 1.0) > 1e-9:
            violations.append(f"top-level weights sum {total:.2f} != 1")

    composite_ids = {c.id for c in problem.criteria if c.children}
    for criterion_id, vector in problem.sub_weights.items():
        if criterion_id not in composite_ids:
            violations.append(f"sub-weights given for non-composite criterion {criterion_id!r}")
            continue
        children = problem.criterion(criterion_id).children
        if set(vector.labels) != set(children):
            violations.append(
                f"sub-weights for {criterion_id!r} cover {sorted(vector.labels)}, "
                f"expected exactly {sorted(children)}"
            )
        for text in vector.validate():
            violations.append(f"sub-weights for {criterion_id!r}: {text}")
    for criterion_id in sorted(composite_ids - set(problem.sub_weights)):
        violations.append(f"no weights for composite criterion {criterion_id!r}")

    for rule in problem.knockouts:
        if rule.criterion_id not in id_set:
            violations.append(f"knock-out rule references unknown criterion {rule.criterion_id!r}")
            continue
        if not problem.criterion(rule.criterion_id).is_leaf:
            violations.append(f"knock-out rule on non-leaf criterion {rule.criterion_id!r}")
        if rule.predicate not in PREDICATES:
            violations.append(f"knock-out rule has unknown predicate {rule.predicate!r}")
        elif rule.predicate == "in":
            if not isinstance(rule.threshold, frozenset):
                violations.append(f"'in' rule on {rule.criterion_id!r} needs a label set")
        elif not _is_number(rule.threshold):
            violations.append(
                f"rule on {rule.criterion_id!r} needs a numeric threshold, got {rule.threshold!r}"
            )

    seen_alternatives = set()
    leaf_ids = [c.id for c in problem.criteria if c.is_leaf]
    for alternative in problem.alternatives:
        if alternative.id in seen_alternatives:
            violations.append(f"duplicate alternative id {alternative.id!r}")
        seen_alternatives.add(alternative.id)
        for criterion_id, value in alternative.metrics.items():
            if criterion_id not in id_set:
                violations.append(
                    f"alternative {alternative.id} carries a value for unknown criterion {criterion_id!r}"
                )
            if _is_number(value) and not np.isfinite(value):
                violations.append(
                    f"alternative {alternative.id} has non-finite value for {criterion_id}"
                )
        excused = _excused_from_coverage(alternative, problem.knockouts)
        for leaf_id in leaf_ids:
            if leaf_id in alternative.metrics:
                value = alternative.metrics[leaf_id]
                criterion = problem.criterion(leaf_id)
                if criterion.kind == QUANTITATIVE and not _is_number(value):
                    violations.append(
                        f"alternative {alternative.id}: {leaf_id} expects a number, got {value!r}"
                    )
                if criterion.kind == QUALITATIVE and not isinstance(value, str):
                    violations.append(
                        f"alternative {alternative.id}: {leaf_id} expects a label, got {value!r}"
                    )
            elif not excused:
                violations.append(
                    f"alternative {alternative.id} missing value for criterion {leaf_id}"
                )
    return violations
