"""Composite scores, weighted totals, ranking, and entropy weighting."""

from dataclasses import replace

import numpy as np
import pytest

from modelrank import (
    Alternative,
    PriorityVector,
    ValidationFailure,
    apply_knockouts,
    composite_quality,
    entropy_weights,
    normalize_minmax,
    rank,
    total_scores,
)
from conftest import make_two_criterion_problem

SUB_WEIGHTS = PriorityVector(("fitness", "precision", "generalization"), (0.57, 0.22, 0.21))

# Golden values computed independently from the raw metric table and
# the published weight vectors (full precision, not the 3-decimal prints).
GOLD_COMPOSITE = {
    "411": 0.951754709, "412": 0.934506466, "413": 0.949402824,
    "422": 0.948333780, "532": 0.964150780,
}
GOLD_TOTALS = {
    "411": 0.818201883, "412": 0.761302586, "413": 0.817261130,
    "422": 0.766833512, "532": 0.810660312,
}
PUBLISHED_COMPOSITE = {"411": 0.952, "412": 0.934, "413": 0.949, "422": 0.948, "532": 0.964}
PUBLISHED_TOTALS = {"411": 0.818, "412": 0.761, "413": 0.817, "422": 0.767, "532": 0.811}

# Entropy weights of the 5x3 score matrix (columns quality, throughput,
# risk; rows by ascending id), frozen from a hand computation.
GOLD_ENTROPY = (0.00107396, 0.75854155, 0.24038449)


class TestCompositeQuality:
    def test_high_fitness_configuration(self):
        value = composite_quality(
            {"fitness": 0.999546682, "precision": 0.79968, "generalization": 0.98135},
            SUB_WEIGHTS,
        )
        assert value == pytest.approx(GOLD_COMPOSITE["411"], abs=1e-8)
        assert value == pytest.approx(PUBLISHED_COMPOSITE["411"], abs=1e-3)

    def test_best_quality_configuration(self):
        value = composite_quality(
            {"fitness": 0.999671544, "precision": 0.8379, "generalization": 1.0},
            SUB_WEIGHTS,
        )
        assert value == pytest.approx(GOLD_COMPOSITE["532"], abs=1e-8)
        assert value == pytest.approx(PUBLISHED_COMPOSITE["532"], abs=1e-3)

    def test_perfect_scores_give_one(self):
        weights = PriorityVector(("a", "b", "c"), (1 / 3, 1 / 3, 1 / 3))
        assert composite_quality({"a": 1.0, "b": 1.0, "c": 1.0}, weights) == pytest.approx(1.0)

    def test_out_of_range_metric_rejected(self):
        with pytest.raises(ValidationFailure):
            composite_quality({"fitness": 1.2, "precision": 0.8, "generalization": 0.9},
                              SUB_WEIGHTS)

    def test_missing_metric_rejected(self):
        with pytest.raises(ValidationFailure):
            composite_quality({"fitness": 0.9, "precision": 0.8}, SUB_WEIGHTS)


class TestTotalScores:
    def test_bundled_totals_and_ranking(self, bundled):
        screening = apply_knockouts(bundled.problem)
        breakdowns = total_scores(bundled.problem, screening.retained)
        assert [b.alternative_id for b in breakdowns] == ["411", "413", "532", "422", "412"]
        assert [b.rank for b in breakdowns] == [1, 2, 3, 4, 5]
        by_id = {b.alternative_id: b for b in breakdowns}
        for alternative_id, expected in GOLD_TOTALS.items():
            assert by_id[alternative_id].total == pytest.approx(expected, abs=1e-9)
            assert by_id[alternative_id].total == pytest.approx(
                PUBLISHED_TOTALS[alternative_id], abs=1e-3)

    def test_breakdown_audit_trail(self, bundled):
        screening = apply_knockouts(bundled.problem)
        breakdowns = total_scores(bundled.problem, screening.retained)
        top = breakdowns[0]
        assert top.alternative_id == "411"
        assert top.labels == {"throughput": "medium", "risk": "medium"}
        assert top.sub_scores["throughput"] == pytest.approx(73.3)
        assert top.sub_scores["fitness"] == pytest.approx(0.999546682)
        assert top.criterion_scores["throughput"] == pytest.approx(0.70)
        assert top.criterion_scores["risk"] == pytest.approx(0.75)

    def test_alternate_scale_variant_scores_differ(self, bundled_alt):
        screening = apply_knockouts(bundled_alt.problem)
        breakdowns = total_scores(bundled_alt.problem, screening.retained)
        by_id = {b.alternative_id: b for b in breakdowns}
        # throughput medium scores 0.75 and risk medium 0.70 in this variant
        assert by_id["411"].criterion_scores["throughput"] == pytest.approx(0.75)
        assert by_id["411"].criterion_scores["risk"] == pytest.approx(0.70)
        assert by_id["411"].total != pytest.approx(GOLD_TOTALS["411"], abs=1e-6)

    def test_single_alternative_gets_rank_one(self):
        problem = make_two_criterion_problem(
            [Alternative(id="only", metrics={"speed": 0.1, "cost_fit": 0.2})])
        breakdowns = total_scores(problem, problem.alternatives)
        assert breakdowns[0].rank == 1

    def test_identical_alternatives_share_rank_one_ordered_by_id(self):
        problem = make_two_criterion_problem([
            Alternative(id="b", metrics={"speed": 0.5, "cost_fit": 0.5}),
            Alternative(id="a", metrics={"speed": 0.5, "cost_fit": 0.5}),
        ])
        breakdowns = total_scores(problem, problem.alternatives)
        assert [b.alternative_id for b in breakdowns] == ["a", "b"]
        assert [b.rank for b in breakdowns] == [1, 1]

    def test_invalid_problem_rejected(self, bundled):
        problem = replace(bundled.problem, sub_weights={})
        with pytest.raises(ValidationFailure):
            total_scores(problem, problem.alternatives[:1])


class TestRank:
    def test_empty_input(self):
        assert rank([]) == []

    def test_tied_totals_share_smaller_rank(self, two_criterion_problem):
        breakdowns = total_scores(two_criterion_problem, two_criterion_problem.alternatives)
        tied = [replace(breakdowns[0], total=0.5), replace(breakdowns[1], total=0.5),
                replace(breakdowns[2], total=0.1)]
        ranked = rank(tied)
        assert [b.rank for b in ranked] == [1, 1, 3]


class TestEntropyWeights:
    def test_constant_column_gets_zero_weight(self):
        matrix = [[0.5, 0.2], [0.5, 0.9], [0.5, 0.4]]
        weights = entropy_weights(matrix, ("flat", "varying"))
        assert weights.weight_for("flat") == pytest.approx(0.0, abs=1e-12)
        assert weights.weight_for("varying") == pytest.approx(1.0, abs=1e-12)

    def test_all_uniform_columns_fall_back_to_uniform_weights(self):
        matrix = np.full((4, 3), 0.25)
        weights = entropy_weights(matrix, ("a", "b", "c"))
        np.testing.assert_allclose(weights.weights, np.full(3, 1 / 3), atol=1e-12)

    def test_bundled_score_matrix_concentrates_on_varying_columns(self, bundled):
        screening = apply_knockouts(bundled.problem)
        breakdowns = total_scores(bundled.problem, screening.retained)
        order = sorted(b.alternative_id for b in breakdowns)
        by_id = {b.alternative_id: b for b in breakdowns}
        labels = bundled.problem.top_level_weights.labels
        matrix = [[by_id[i].criterion_scores[c] for c in labels] for i in order]
        weights = entropy_weights(matrix, labels)
        np.testing.assert_allclose(weights.weights, GOLD_ENTROPY, atol=1e-6)
        assert weights.weight_for("quality") == min(weights.as_dict().values())

    def test_zero_sum_column_rejected(self):
        with pytest.raises(ValidationFailure) as excinfo:
            entropy_weights([[0.0, 1.0], [0.0, 2.0]], ("dead", "live"))
        assert "dead" in str(excinfo.value)

    def test_negative_scores_rejected(self):
        with pytest.raises(ValidationFailure):
            entropy_weights([[-0.1, 1.0]], ("a", "b"))

    def test_single_alternative_gives_uniform_weights(self):
        weights = entropy_weights([[0.3, 0.9]], ("a", "b"))
        np.testing.assert_allclose(weights.weights, (0.5, 0.5), atol=1e-12)

    def test_weights_are_nonnegative_and_sum_to_one(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            matrix = rng.random((int(rng.integers(2, 8)), int(rng.integers(2, 6)))) + 0.01
            labels = tuple(f"c{k}" for k in range(matrix.shape[1]))
            weights = entropy_weights(matrix, labels)
            assert np.all(weights.weights >= 0.0)
            assert float(weights.weights.sum()) == pytest.approx(1.0, abs=1e-9)


class TestScoringInvariants:
    def test_dominance_implies_strictly_higher_total(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            base = rng.random(2) * 0.8
            bumped = base + rng.random(2) * 0.19 + 0.005
            weights = rng.random(2) + 0.05
            weights /= weights.sum()
            problem = make_two_criterion_problem(
                [
                    Alternative(id="low", metrics={"speed": base[0], "cost_fit": base[1]}),
                    Alternative(id="high", metrics={"speed": bumped[0], "cost_fit": bumped[1]}),
                ],
                weights=tuple(weights),
            )
            breakdowns = total_scores(problem, problem.alternatives)
            assert breakdowns[0].alternative_id == "high"
            assert breakdowns[0].total > breakdowns[1].total

    def test_weight_rescaling_reproduces_identical_totals(self, bundled):
        screening = apply_knockouts(bundled.problem)
        baseline = total_scores(bundled.problem, screening.retained)
        scaled_raw = bundled.problem.top_level_weights.weights * 7.3
        rescaled = PriorityVector(
            bundled.problem.top_level_weights.labels, scaled_raw / scaled_raw.sum())
        shifted = total_scores(
            replace(bundled.problem, top_level_weights=rescaled), screening.retained)
        for before, after in zip(baseline, shifted):
            assert after.total == pytest.approx(before.total, abs=1e-12)
            assert after.alternative_id == before.alternative_id

    def test_totals_are_convex_combinations(self, bundled):
        screening = apply_knockouts(bundled.problem)
        for breakdown in total_scores(bundled.problem, screening.retained):
            scores = list(breakdown.criterion_scores.values())
            assert min(scores) - 1e-12 <= breakdown.total <= max(scores) + 1e-12

    def test_positive_scaling_of_totals_keeps_order(self, bundled):
        screening = apply_knockouts(bundled.problem)
        breakdowns = total_scores(bundled.problem, screening.retained)
        totals = np.array([b.total for b in breakdowns])
        assert list(np.argsort(-totals)) == list(np.argsort(-totals * 42.0))


class TestNormalizeMinmax:
    def test_benefit_and_cost_directions(self):
        values = [10.0, 20.0, 30.0]
        np.testing.assert_allclose(normalize_minmax(values, "benefit"), [0.0, 0.5, 1.0])
        np.testing.assert_allclose(normalize_minmax(values, "cost"), [1.0, 0.5, 0.0])

    def test_constant_column_maps_to_ones(self):
        np.testing.assert_allclose(normalize_minmax([3.0, 3.0], "benefit"), [1.0, 1.0])
