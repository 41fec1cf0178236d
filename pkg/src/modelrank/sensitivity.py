"""Ranking stability under weight perturbation.

All analyses perturb one top-level weight at a time: the chosen
criterion is set to a target value and the remaining weights are
rescaled by a common factor so they keep their mutual ratios and the
vector stays on the simplex. Under that rule every alternative's total
is an affine function of the perturbed weight, so the region where any
fixed alternative is top-ranked is an interval and can be located by
bisection.

Screening runs once, up front: perturbing weights never revisits
knock-outs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ahp import PriorityVector
from .errors import ValidationFailure
from .model import Alternative, DecisionProblem, apply_knockouts, validate_problem
from .scoring import total_scores


@dataclass(frozen=True)
class WeightPerturbation:
    """Set one criterion's weight, rescaling the others proportionally."""

    criterion_id: str
    new_weight: float
    renormalization: str = "proportional-others"


@dataclass(frozen=True)
class SweepPoint:
    weight: float
    ranking: tuple[str, ...]
    totals: dict[str, float]


@dataclass(frozen=True)
class RankReversal:
    """Two alternatives swapped relative order between adjacent sweep
    points; recorded at the grid point where the new order first holds."""

    weight: float
    displaced: str
    displacing: str


@dataclass(frozen=True)
class StabilityInterval:
    lower: float
    upper: float
    tie_at_baseline: bool = False


@dataclass(frozen=True)
class SensitivityResult:
    criterion_id: str
    baseline_weight: float
    baseline_ranking: tuple[str, ...]
    sweep: tuple[SweepPoint, ...]
    stability_interval: StabilityInterval
    reversals: tuple[RankReversal, ...]


def reweight(base: PriorityVector, perturbation: WeightPerturbation) -> PriorityVector:
    """Apply a one-at-a-time weight perturbation with proportional renormalization.

    The remaining weights are scaled by (1 - new) / (1 - old), which
    preserves their mutual ratios and keeps the vector summing to 1.

    Raises:
        ValidationFailure: unknown criterion, a base weight that is not
            strictly positive, a target outside [0, 1), or the
            degenerate request to give one criterion all the weight
            while others exist.
    """
    if perturbation.renormalization != "proportional-others":
        raise ValidationFailure(
            f"unknown renormalization {perturbation.renormalization!r}"
        )
    if perturbation.criterion_id not in base.labels:
        raise ValidationFailure(
            f"criterion {perturbation.criterion_id!r} not in weight vector {base.labels}"
        )
    if np.any(base.weights <= 0.0):
        raise ValidationFailure("base weights must be strictly positive")
    new = float(perturbation.new_weight)
    n = len(base.labels)
    if n == 1:
        if new != 1.0:
            raise ValidationFailure("a single-criterion vector must keep weight 1")
        return base
    if not 0.0 <= new < 1.0:
        if new == 1.0:
            raise ValidationFailure(
                "cannot give one criterion the full weight while others remain"
            )
        raise ValidationFailure(f"target weight {new:g} outside [0, 1)")
    index = base.labels.index(perturbation.criterion_id)
    old = float(base.weights[index])
    factor = (1.0 - new) / (1.0 - old)
    weights = base.weights * factor
    weights[index] = new
    return PriorityVector(base.labels, weights)


class _SweepContext:
    """Validated problem, fixed retained set, and totals-at-weight evaluation."""

    def __init__(self, problem: DecisionProblem, criterion_id: str):
        violations = validate_problem(problem)
        if violations:
            raise ValidationFailure("invalid decision problem", violations)
        if criterion_id not in problem.top_level_weights.labels:
            raise ValidationFailure(
                f"criterion {criterion_id!r} is not a weighted top-level criterion"
            )
        self.problem = problem
        self.criterion_id = criterion_id
        self.base = problem.top_level_weights
        self.baseline_weight = self.base.weight_for(criterion_id)
        self.retained: Sequence[Alternative] = apply_knockouts(problem).retained
        # Criterion scores do not depend on the weights, so compute them
        # once and re-weight cheaply per sweep point.
        baseline = total_scores(problem, self.retained, validate=False)
        self._by_id = {b.alternative_id: b for b in baseline}
        self.ids = sorted(self._by_id)
        self._score_matrix = np.array(
            [[self._by_id[i].criterion_scores[c] for c in self.base.labels] for i in self.ids]
        )
        self.baseline_ranking = tuple(b.alternative_id for b in baseline)

    def totals_at(self, weight_value: float) -> dict[str, float]:
        weights = reweight(
            self.base, WeightPerturbation(self.criterion_id, weight_value)
        )
        values = self._score_matrix @ weights.weights
        return {alt_id: float(v) for alt_id, v in zip(self.ids, values)}

    def ranking_at(self, weight_value: float) -> tuple[str, ...]:
        totals = self.totals_at(weight_value)
        return tuple(sorted(totals, key=lambda i: (-totals[i], i)))

    def top_at(self, weight_value: float) -> str:
        return self.ranking_at(weight_value)[0]


def _detect_reversals(points: Sequence[SweepPoint]) -> tuple[RankReversal, ...]:
    """All adjacent-pair order flips along a sweep."""
    reversals = []
    for before, after in zip(points, points[1:]):
        pos_before = {alt_id: k for k, alt_id in enumerate(before.ranking)}
        pos_after = {alt_id: k for k, alt_id in enumerate(after.ranking)}
        for alt_id in before.ranking:
            for other in before.ranking:
                if alt_id >= other:
                    continue
                flipped = (pos_before[alt_id] < pos_before[other]) != (
                    pos_after[alt_id] < pos_after[other]
                )
                if flipped:
                    dropped = alt_id if pos_after[alt_id] > pos_after[other] else other
                    raised = other if dropped == alt_id else alt_id
                    reversals.append(
                        RankReversal(weight=after.weight, displaced=dropped, displacing=raised)
                    )
    return tuple(reversals)


def oat_sweep(
    problem: DecisionProblem,
    criterion_id: str,
    grid: int = 101,
    interval_tol: float = 1e-6,
) -> SensitivityResult:
    """Sweep one top-level weight across [0, 1) on an even grid.

    Evaluates the full ranking at ``grid`` points k/grid, records every
    adjacent-pair rank reversal, and attaches the bisected stability
    interval of the top-ranked alternative.

    Raises:
        ValidationFailure: invalid problem, unknown criterion, or grid < 2.
    """
    if grid < 2:
        raise ValidationFailure(f"grid resolution must be at least 2, got {grid}")
    context = _SweepContext(problem, criterion_id)
    points = []
    for k in range(grid):
        value = k / grid
        totals = context.totals_at(value)
        ranking = tuple(sorted(totals, key=lambda i: (-totals[i], i)))
        points.append(SweepPoint(weight=value, ranking=ranking, totals=totals))
    interval = _stability_interval(context, interval_tol)
    return SensitivityResult(
        criterion_id=criterion_id,
        baseline_weight=context.baseline_weight,
        baseline_ranking=context.baseline_ranking,
        sweep=tuple(points),
        stability_interval=interval,
        reversals=_detect_reversals(points),
    )


def _stability_interval(context: _SweepContext, tol: float) -> StabilityInterval:
    baseline = context.baseline_weight
    totals = context.totals_at(baseline)
    ordered = sorted(totals, key=lambda i: (-totals[i], i))
    top = ordered[0]
    if len(ordered) > 1 and abs(totals[ordered[0]] - totals[ordered[1]]) < 1e-15:
        return StabilityInterval(lower=baseline, upper=baseline, tie_at_baseline=True)

    probe_high = 1.0 - 1e-9

    def is_top(value: float) -> bool:
        return context.top_at(value) == top

    # Totals are affine in the swept weight, so {value: top stays top}
    # is an interval around the baseline; bisect each side.
    if is_top(probe_high):
        upper = 1.0
    else:
        low, high = baseline, probe_high
        while high - low > tol:
            mid = 0.5 * (low + high)
            if is_top(mid):
                low = mid
            else:
                high = mid
        upper = 0.5 * (low + high)

    if is_top(0.0):
        lower = 0.0
    else:
        low, high = 0.0, baseline
        while high - low > tol:
            mid = 0.5 * (low + high)
            if is_top(mid):
                high = mid
            else:
                low = mid
        lower = 0.5 * (low + high)
    return StabilityInterval(lower=lower, upper=upper)


def stability_interval(
    problem: DecisionProblem,
    criterion_id: str,
    tol: float = 1e-4,
) -> StabilityInterval:
    """Largest weight interval around the baseline keeping the same top alternative.

    Located by bisection to width ``tol`` on each side; endpoints are
    reported as 0 or 1 when the top never changes in that direction. A
    tie for first place at the baseline is reported as a degenerate
    interval with the tie flag set.
    """
    if tol <= 0.0:
        raise ValidationFailure("stability tolerance must be positive")
    context = _SweepContext(problem, criterion_id)
    return _stability_interval(context, tol)


def random_weight_sampling(
    problem: DecisionProblem,
    n_samples: int,
    seed: int,
) -> dict[str, float]:
    """Frequency with which each retained alternative ranks first under
    weights drawn uniformly from the simplex.

    Sampling uses the exponential-spacings construction (normalized
    i.i.d. exponentials), is fully determined by ``seed``, and ties go
    to the smaller alternative id. Every retained alternative appears
    in the result, including those that never rank first.
    """
    if n_samples < 1:
        raise ValidationFailure(f"need at least one sample, got {n_samples}")
    violations = validate_problem(problem)
    if violations:
        raise ValidationFailure("invalid decision problem", violations)
    retained = apply_knockouts(problem).retained
    breakdowns = total_scores(problem, retained, validate=False)
    by_id = {b.alternative_id: b for b in breakdowns}
    ids = sorted(by_id)
    labels = problem.top_level_weights.labels
    score_matrix = np.array(
        [[by_id[i].criterion_scores[c] for c in labels] for i in ids]
    )
    rng = np.random.default_rng(seed)
    spacings = rng.exponential(size=(n_samples, len(labels)))
    weights = spacings / spacings.sum(axis=1, keepdims=True)
    totals = weights @ score_matrix.T
    # argmax returns the first maximum, i.e. the smallest id on ties.
    winners = np.argmax(totals, axis=1)
    counts = np.bincount(winners, minlength=len(ids))
    frequencies = {ids[k]: float(counts[k]) / n_samples for k in range(len(ids))}
    return dict(sorted(frequencies.items(), key=lambda item: (-item[1], item[0])))
