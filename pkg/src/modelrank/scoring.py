"""Weighted-sum scoring and ranking, plus entropy-based objective weighting.

Every retained alternative receives one score per top-level criterion:
composite criteria combine their children's raw scores through the
sub-weight vector, scaled leaves map their raw value through the
categorical scale, and bare leaves contribute their raw value directly
(which must already be a fraction). The total is the weighted sum of
top-level scores; ranking is descending by total with ties broken by
ascending alternative id and tied alternatives sharing the smaller rank.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .ahp import PriorityVector
from .errors import ValidationFailure
from .model import (
    BENEFIT,
    Alternative,
    DecisionProblem,
    map_categorical,
    validate_problem,
)


@dataclass(frozen=True)
class ScoreBreakdown:
    """Full audit of one alternative's score.

    ``criterion_scores`` holds the per-top-level-criterion scores that
    enter the weighted sum; ``sub_scores`` the raw numeric values
    consumed (composite children and scaled-leaf inputs); ``labels`` the
    category assigned by each scale mapping.
    """

    alternative_id: str
    criterion_scores: dict[str, float]
    sub_scores: dict[str, float]
    labels: dict[str, str]
    total: float
    rank: int = 0


def composite_quality(
    metrics: Mapping[str, float],
    sub_weights: PriorityVector,
) -> float:
    """Convex combination of sub-criterion scores under the given weights.

    All inputs must be fractions in [0, 1] and the weights must sum to
    1, so the result always lies between the smallest and largest input.

    Raises:
        ValidationFailure: missing or out-of-range metric, or weights
            that do not sum to 1.
    """
    values = []
    for label in sub_weights.labels:
        if label not in metrics:
            raise ValidationFailure(f"missing metric {label!r} for composite score")
        value = float(metrics[label])
        if not 0.0 <= value <= 1.0:
            raise ValidationFailure(f"metric {label!r} = {value:g} outside [0, 1]")
        values.append(value)
    weights = sub_weights.weights
    if abs(float(weights.sum()) - 1.0) > 1e-6:
        raise ValidationFailure(f"sub-weights sum {float(weights.sum()):.6f} != 1")
    return float(np.dot(weights, values))


def _score_alternative(problem: DecisionProblem, alternative: Alternative) -> ScoreBreakdown:
    criterion_scores: dict[str, float] = {}
    sub_scores: dict[str, float] = {}
    labels: dict[str, str] = {}
    for criterion_id in problem.top_level_ids():
        criterion = problem.criterion(criterion_id)
        if criterion.children:
            child_values = {}
            for child_id in criterion.children:
                if child_id not in alternative.metrics:
                    raise ValidationFailure(
                        f"alternative {alternative.id} missing value for criterion {child_id}"
                    )
                child_values[child_id] = float(alternative.metrics[child_id])
            score = composite_quality(child_values, problem.sub_weights[criterion_id])
            sub_scores.update(child_values)
        elif criterion.scale is not None:
            if criterion_id not in alternative.metrics:
                raise ValidationFailure(
                    f"alternative {alternative.id} missing value for criterion {criterion_id}"
                )
            raw = alternative.metrics[criterion_id]
            label, score = map_categorical(raw, criterion.scale)
            labels[criterion_id] = label
            if not isinstance(raw, str):
                sub_scores[criterion_id] = float(raw)
        else:
            if criterion_id not in alternative.metrics:
                raise ValidationFailure(
                    f"alternative {alternative.id} missing value for criterion {criterion_id}"
                )
            raw = float(alternative.metrics[criterion_id])
            if not 0.0 <= raw <= 1.0:
                raise ValidationFailure(
                    f"alternative {alternative.id}: unscaled criterion {criterion_id} "
                    f"value {raw:g} outside [0, 1]"
                )
            score = raw
            sub_scores[criterion_id] = raw
        criterion_scores[criterion_id] = score
    weight_map = problem.top_level_weights.as_dict()
    total = float(sum(weight_map[cid] * criterion_scores[cid] for cid in criterion_scores))
    return ScoreBreakdown(
        alternative_id=alternative.id,
        criterion_scores=criterion_scores,
        sub_scores=sub_scores,
        labels=labels,
        total=total,
    )


def rank(breakdowns: Sequence[ScoreBreakdown]) -> list[ScoreBreakdown]:
    """Order breakdowns best-first and assign rank numbers.

    Descending total, ties broken by ascending alternative id; tied
    totals share the smaller rank number.
    """
    ordered = sorted(breakdowns, key=lambda b: (-b.total, b.alternative_id))
    totals = [b.total for b in ordered]
    return [
        replace(breakdown, rank=1 + sum(1 for t in totals if t > breakdown.total))
        for breakdown in ordered
    ]


def total_scores(
    problem: DecisionProblem,
    retained: Sequence[Alternative],
    validate: bool = True,
) -> list[ScoreBreakdown]:
    """Score and rank the retained alternatives of a problem.

    Args:
        problem: the decision problem supplying criteria, scales and weights.
        retained: alternatives that survived screening.
        validate: run :func:`validate_problem` first (skipped by sweep
            loops that validated once already).

    Returns:
        ScoreBreakdowns sorted best-first with ranks assigned.
    """
    if validate:
        violations = validate_problem(problem)
        if violations:
            raise ValidationFailure("invalid decision problem", violations)
    return rank([_score_alternative(problem, alternative) for alternative in retained])


def entropy_weights(scores, labels: Sequence[str]) -> PriorityVector:
    """Objective criterion weights from score dispersion (entropy method).

    Each column is normalized into a distribution; criteria whose
    distribution is far from uniform (low entropy, high divergence)
    receive proportionally more weight. A constant column carries no
    information and gets weight 0; if every column is constant the
    weights fall back to uniform.

    Args:
        scores: alternatives x criteria array of nonnegative scores.
        labels: criterion labels, one per column.

    Raises:
        ValidationFailure: negative scores, a zero-sum column, or a
            label/column count mismatch.
    """
    matrix = np.asarray(scores, dtype=float)
    if matrix.ndim != 2:
        raise ValidationFailure("entropy weighting expects a 2-D score matrix")
    m, n = matrix.shape
    if len(labels) != n:
        raise ValidationFailure(f"{len(labels)} labels for {n} score columns")
    if np.any(matrix < 0.0):
        raise ValidationFailure("entropy weighting expects nonnegative scores")
    column_sums = matrix.sum(axis=0)
    if np.any(column_sums <= 0.0):
        bad = [labels[j] for j in range(n) if column_sums[j] <= 0.0]
        raise ValidationFailure(f"zero-sum score column(s): {', '.join(bad)}")
    if m == 1:
        return PriorityVector(tuple(labels), np.full(n, 1.0 / n))
    p = matrix / column_sums
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0.0, p * np.log(p), 0.0)
    entropy = -plogp.sum(axis=0) / np.log(m)
    divergence = np.clip(1.0 - entropy, 0.0, None)
    if divergence.sum() <= 1e-12:
        return PriorityVector(tuple(labels), np.full(n, 1.0 / n))
    return PriorityVector(tuple(labels), divergence / divergence.sum())


def normalize_minmax(values, direction: str = BENEFIT) -> np.ndarray:
    """Min-max normalize raw values onto [0, 1], higher-is-better.

    Optional helper for scenarios whose quantitative leaves are not
    already fractions; the bundled scenarios do not use it. Cost
    criteria are inverted so the cheapest value maps to 1. A constant
    column maps to all ones.
    """
    array = np.asarray(values, dtype=float)
    low, high = float(array.min()), float(array.max())
    if high - low < 1e-12:
        return np.ones_like(array)
    if direction == BENEFIT:
        return (array - low) / (high - low)
    return (high - array) / (high - low)
