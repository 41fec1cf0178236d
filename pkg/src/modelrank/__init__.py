"""modelrank: multi-criteria decision support for ranking alternatives.

Pipeline: validate the problem, screen alternatives against knock-out
rules, derive criterion weights from pairwise judgments (with
consistency checking and multi-stakeholder aggregation), score the
survivors with a weighted sum over categorical/composite criterion
scores, and probe how stable the resulting ranking is under weight
perturbation.
"""

from .ahp import (
    CR_THRESHOLD,
    RANDOM_INDEX,
    ConsistencyReport,
    PairwiseMatrix,
    PriorityVector,
    StakeholderJudgment,
    aggregate_judgments,
    aggregate_priorities,
    consistency,
    priorities_eigen,
    priorities_geometric,
    validate_matrix,
)
from .errors import (
    ConvergenceError,
    ModelRankError,
    ScaleError,
    ScenarioError,
    ValidationFailure,
)
from .model import (
    Alternative,
    CategoricalScale,
    Criterion,
    DecisionProblem,
    Elimination,
    KnockoutRule,
    ScaleBin,
    ScreeningResult,
    apply_knockouts,
    map_categorical,
    validate_problem,
)
from .scoring import (
    ScoreBreakdown,
    composite_quality,
    entropy_weights,
    normalize_minmax,
    rank,
    total_scores,
)
from .sensitivity import (
    RankReversal,
    SensitivityResult,
    StabilityInterval,
    SweepPoint,
    WeightPerturbation,
    oat_sweep,
    random_weight_sampling,
    reweight,
    stability_interval,
)
from .io_formats import (
    MetricsTable,
    Scenario,
    bundled_metrics_path,
    bundled_scenario_path,
    dumps_scenario,
    export_report,
    load_metrics_csv,
    load_scenario,
    parse_document,
    save_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "Alternative",
    "CategoricalScale",
    "ConsistencyReport",
    "ConvergenceError",
    "CR_THRESHOLD",
    "Criterion",
    "DecisionProblem",
    "Elimination",
    "KnockoutRule",
    "MetricsTable",
    "ModelRankError",
    "PairwiseMatrix",
    "PriorityVector",
    "RANDOM_INDEX",
    "RankReversal",
    "ScaleBin",
    "ScaleError",
    "Scenario",
    "ScenarioError",
    "ScoreBreakdown",
    "ScreeningResult",
    "SensitivityResult",
    "StabilityInterval",
    "StakeholderJudgment",
    "SweepPoint",
    "ValidationFailure",
    "WeightPerturbation",
    "aggregate_judgments",
    "aggregate_priorities",
    "apply_knockouts",
    "bundled_metrics_path",
    "bundled_scenario_path",
    "composite_quality",
    "consistency",
    "dumps_scenario",
    "entropy_weights",
    "export_report",
    "load_metrics_csv",
    "load_scenario",
    "map_categorical",
    "normalize_minmax",
    "oat_sweep",
    "parse_document",
    "priorities_eigen",
    "priorities_geometric",
    "random_weight_sampling",
    "rank",
    "reweight",
    "save_scenario",
    "stability_interval",
    "total_scores",
    "validate_matrix",
    "validate_problem",
]
