"""Decision problem validation, knock-out screening, and scale mapping."""

from dataclasses import replace

import numpy as np
import pytest

from modelrank import (
    Alternative,
    CategoricalScale,
    Criterion,
    KnockoutRule,
    PriorityVector,
    ScaleError,
    ValidationFailure,
    apply_knockouts,
    map_categorical,
    validate_problem,
)
from conftest import make_two_criterion_problem

RETAINED_IDS = ("411", "412", "413", "422", "532")

THROUGHPUT_SCALE = CategoricalScale.numeric([
    ("low", 0.0, 50.0, 1.0),
    ("medium", 50.0, 100.0, 0.70),
    ("high", 100.0, None, 0.50),
])
RISK_SCALE = CategoricalScale.labels([("low", 1.0), ("medium", 0.75), ("high", 0.50)])


class TestCategoricalScale:
    def test_bundled_scales_are_valid(self):
        assert THROUGHPUT_SCALE.validate() == []
        assert RISK_SCALE.validate() == []

    def test_gap_between_bins_reported(self):
        scale = CategoricalScale.numeric([
            ("low", 0.0, 50.0, 1.0), ("high", 60.0, None, 0.5),
        ])
        assert any("contiguously" in v for v in scale.validate())

    def test_duplicate_labels_reported(self):
        scale = CategoricalScale.labels([("low", 1.0), ("low", 0.5)])
        assert any("duplicate" in v for v in scale.validate())

    def test_score_outside_unit_interval_reported(self):
        scale = CategoricalScale.labels([("low", 1.5)])
        assert any("(0, 1]" in v for v in scale.validate())

    def test_unbounded_bin_only_last(self):
        scale = CategoricalScale.numeric([
            ("low", 0.0, None, 1.0), ("high", 50.0, None, 0.5),
        ])
        assert any("unbounded" in v for v in scale.validate())


class TestMapCategorical:
    def test_mid_range_minutes_map_to_medium(self):
        assert map_categorical(73.3, THROUGHPUT_SCALE) == ("medium", 0.70)

    def test_low_minutes_map_to_low(self):
        assert map_categorical(33.13, THROUGHPUT_SCALE) == ("low", 1.0)

    def test_boundary_is_lower_inclusive(self):
        assert map_categorical(50.0, THROUGHPUT_SCALE)[0] == "medium"
        assert map_categorical(49.999, THROUGHPUT_SCALE)[0] == "low"
        assert map_categorical(100.0, THROUGHPUT_SCALE)[0] == "high"

    def test_unbounded_top_bin(self):
        assert map_categorical(1e9, THROUGHPUT_SCALE) == ("high", 0.50)

    def test_value_below_coverage_rejected(self):
        with pytest.raises(ScaleError) as excinfo:
            map_categorical(-1.0, THROUGHPUT_SCALE)
        assert "-1" in str(excinfo.value)

    def test_label_lookup(self):
        assert map_categorical("medium", RISK_SCALE) == ("medium", 0.75)

    def test_unknown_label_rejected(self):
        with pytest.raises(ScaleError) as excinfo:
            map_categorical("extreme", RISK_SCALE)
        assert "extreme" in str(excinfo.value)

    def test_type_mismatches_rejected(self):
        with pytest.raises(ScaleError):
            map_categorical("low", THROUGHPUT_SCALE)
        with pytest.raises(ScaleError):
            map_categorical(3.0, RISK_SCALE)


class TestApplyKnockouts:
    def test_bundled_screening_retains_the_five_fit_models(self, bundled):
        screening = apply_knockouts(bundled.problem)
        assert screening.retained_ids == RETAINED_IDS
        assert len(screening.eliminated) == 22
        assert all("fitness" in e.reason for e in screening.eliminated)

    def test_no_rules_retains_everything(self, bundled):
        problem = replace(bundled.problem, knockouts=())
        screening = apply_knockouts(problem)
        assert len(screening.retained) == 27
        assert screening.eliminated == ()

    def test_unsatisfiable_threshold_eliminates_everything(self, bundled):
        rule = KnockoutRule("fitness", ">=", 1.5)
        screening = apply_knockouts(replace(bundled.problem, knockouts=(rule,)))
        assert screening.retained == ()
        assert len(screening.eliminated) == 27
        assert all(e.rule is rule for e in screening.eliminated)

    def test_first_failing_rule_cited_in_rule_order(self, bundled):
        generalization_rule = KnockoutRule("generalization", ">=", 0.95)
        fitness_rule = KnockoutRule("fitness", ">=", 0.999)
        problem = replace(bundled.problem, knockouts=(generalization_rule, fitness_rule))
        screening = apply_knockouts(problem)
        # 412 fails both rules; the first in rule order is cited
        elimination = next(e for e in screening.eliminated if e.alternative.id == "412")
        assert elimination.rule is generalization_rule

    def test_verbose_mode_lists_every_failure(self, bundled):
        problem = replace(bundled.problem, knockouts=(
            KnockoutRule("generalization", ">=", 0.95),
            KnockoutRule("precision", ">=", 0.81),
        ))
        screening = apply_knockouts(problem, verbose=True)
        # 412 misses both the generalization and the precision bar
        elimination = next(e for e in screening.eliminated if e.alternative.id == "412")
        assert len(elimination.all_failures) == 2

    def test_unknown_rule_criterion_rejected(self, bundled):
        problem = replace(bundled.problem, knockouts=(KnockoutRule("latency", ">=", 1.0),))
        with pytest.raises(ValidationFailure):
            apply_knockouts(problem)

    def test_missing_metric_fails_the_rule(self):
        problem = make_two_criterion_problem(
            [Alternative(id="x1", metrics={"speed": 0.9})],
            knockouts=(KnockoutRule("cost_fit", ">=", 0.5),),
        )
        screening = apply_knockouts(problem)
        assert screening.retained == ()
        assert "no value" in screening.eliminated[0].reason

    def test_label_membership_rule(self, bundled):
        rule = KnockoutRule("risk", "in", frozenset({"low", "medium"}))
        problem = replace(bundled.problem, knockouts=(*bundled.problem.knockouts, rule))
        screening = apply_knockouts(problem)
        # 532 carries high risk and now gets knocked out as well
        assert screening.retained_ids == ("411", "412", "413", "422")

    def test_retained_order_matches_input_order(self, bundled):
        screening = apply_knockouts(bundled.problem)
        input_order = [a.id for a in bundled.problem.alternatives if a.id in RETAINED_IDS]
        assert list(screening.retained_ids) == input_order


class TestScreeningProperties:
    def test_tightening_threshold_never_grows_retained_set(self, bundled):
        rng = np.random.default_rng(21)
        rule = bundled.problem.knockouts[0]
        for _ in range(50):
            lo, hi = sorted(rng.uniform(0.96, 1.0, size=2))
            loose = apply_knockouts(replace(
                bundled.problem, knockouts=(replace(rule, threshold=lo),)))
            tight = apply_knockouts(replace(
                bundled.problem, knockouts=(replace(rule, threshold=hi),)))
            assert set(tight.retained_ids) <= set(loose.retained_ids)

    def test_retained_set_independent_of_rule_order(self, bundled):
        rules = (
            KnockoutRule("fitness", ">=", 0.999),
            KnockoutRule("generalization", ">=", 0.95),
        )
        forward = apply_knockouts(replace(bundled.problem, knockouts=rules))
        backward = apply_knockouts(replace(bundled.problem, knockouts=rules[::-1]))
        assert set(forward.retained_ids) == set(backward.retained_ids)
        assert forward.retained_ids == ("411", "413", "422", "532")


class TestValidateProblem:
    def test_bundled_problem_is_valid(self, bundled):
        assert validate_problem(bundled.problem) == []

    def test_weight_sum_violation_message(self, bundled):
        bad = PriorityVector(("quality", "throughput", "risk"), (0.5, 0.25, 0.35))
        problem = replace(bundled.problem, top_level_weights=bad)
        violations = validate_problem(problem)
        assert any("sum 1.10 != 1" in v for v in violations)

    def test_missing_label_on_retained_alternative_reported(self, bundled):
        alternatives = tuple(
            Alternative(a.id, {k: v for k, v in a.metrics.items() if k != "risk"})
            if a.id == "411" else a
            for a in bundled.problem.alternatives
        )
        violations = validate_problem(replace(bundled.problem, alternatives=alternatives))
        assert any("411" in v and "risk" in v for v in violations)

    def test_screened_out_alternatives_may_omit_unneeded_metrics(self, bundled):
        # the 22 alternatives failing the fitness rule carry no
        # throughput or risk values, yet the problem validates clean
        sparse = [a for a in bundled.problem.alternatives if "throughput" not in a.metrics]
        assert len(sparse) == 22
        assert validate_problem(bundled.problem) == []

    def test_without_knockouts_sparse_alternatives_are_violations(self, bundled):
        problem = replace(bundled.problem, knockouts=())
        violations = validate_problem(problem)
        assert sum("missing value" in v for v in violations) == 44  # 22 x {throughput, risk}

    def test_duplicate_criterion_ids_reported(self, two_criterion_problem):
        doubled = replace(
            two_criterion_problem,
            criteria=two_criterion_problem.criteria + (Criterion(id="speed", name="Again"),),
        )
        assert any("duplicate criterion" in v for v in validate_problem(doubled))

    def test_unknown_child_reported(self, two_criterion_problem):
        criteria = two_criterion_problem.criteria + (
            Criterion(id="combo", name="Combo", children=("speed", "ghost")),
        )
        violations = validate_problem(replace(two_criterion_problem, criteria=criteria))
        assert any("ghost" in v for v in violations)

    def test_multiple_parents_reported(self, bundled):
        criteria = bundled.problem.criteria + (
            Criterion(id="quality2", name="Quality again", children=("fitness",)),
        )
        violations = validate_problem(replace(bundled.problem, criteria=criteria))
        assert any("multiple parents" in v for v in violations)

    def test_hierarchy_deeper_than_two_levels_reported(self, two_criterion_problem):
        criteria = (
            Criterion(id="root", name="Root", children=("mid",)),
            Criterion(id="mid", name="Mid", children=("speed",)),
        ) + two_criterion_problem.criteria
        violations = validate_problem(replace(two_criterion_problem, criteria=criteria))
        assert any("two levels" in v for v in violations)

    def test_composite_with_scale_reported(self, two_criterion_problem):
        criteria = two_criterion_problem.criteria + (
            Criterion(id="combo", name="Combo", children=("speed",),
                      scale=CategoricalScale.labels([("ok", 1.0)])),
        )
        violations = validate_problem(replace(two_criterion_problem, criteria=criteria))
        assert any("must not carry a scale" in v for v in violations)

    def test_missing_sub_weights_reported(self, bundled):
        problem = replace(bundled.problem, sub_weights={})
        violations = validate_problem(problem)
        assert any("no weights for composite" in v for v in violations)

    def test_sub_weight_label_mismatch_reported(self, bundled):
        wrong = {"quality": PriorityVector(("fitness", "precision"), (0.7, 0.3))}
        violations = validate_problem(replace(bundled.problem, sub_weights=wrong))
        assert any("sub-weights for 'quality'" in v for v in violations)

    def test_knockout_on_composite_reported(self, bundled):
        rule = KnockoutRule("quality", ">=", 0.9)
        violations = validate_problem(replace(
            bundled.problem, knockouts=bundled.problem.knockouts + (rule,)))
        assert any("non-leaf" in v for v in violations)

    def test_qualitative_leaf_requires_label(self, bundled):
        alternatives = tuple(
            Alternative(a.id, {**a.metrics, "risk": 0.5}) if a.id == "411" else a
            for a in bundled.problem.alternatives
        )
        violations = validate_problem(replace(bundled.problem, alternatives=alternatives))
        assert any("expects a label" in v for v in violations)

    def test_non_finite_metric_reported(self, two_criterion_problem):
        alternatives = (Alternative(id="x1", metrics={"speed": float("nan"), "cost_fit": 0.5}),)
        violations = validate_problem(replace(two_criterion_problem, alternatives=alternatives))
        assert any("non-finite" in v for v in violations)
