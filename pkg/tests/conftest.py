import numpy as np
import pytest

from modelrank import (
    Alternative,
    Criterion,
    DecisionProblem,
    PairwiseMatrix,
    PriorityVector,
    bundled_scenario_path,
    load_scenario,
)

CRITERIA = ("fitness", "precision", "generalization")

# The three stakeholder judgment matrices of the bundled scenario,
# built from their upper-triangle judgments (exact reciprocals below).
STAKEHOLDER_UPPER = {
    "stakeholder-1": (6.0, 7.0, 1.0),
    "stakeholder-2": (5.0, 5.0, 1.0),
    "stakeholder-3": (1.0, 0.33, 2.0),
}


@pytest.fixture(scope="session")
def stakeholder_matrices():
    return {
        name: PairwiseMatrix.from_upper_triangle(CRITERIA, upper)
        for name, upper in STAKEHOLDER_UPPER.items()
    }


@pytest.fixture(scope="session")
def bundled():
    return load_scenario(bundled_scenario_path())


@pytest.fixture(scope="session")
def bundled_alt():
    return load_scenario(bundled_scenario_path("logistics-alt-scales"))


def make_two_criterion_problem(alternatives, weights=(0.6, 0.4), knockouts=()):
    """Minimal problem: two bare leaf criteria scored on raw fractions."""
    return DecisionProblem(
        objective="pick the best option",
        criteria=(
            Criterion(id="speed", name="Speed"),
            Criterion(id="cost_fit", name="Cost fit"),
        ),
        top_level_weights=PriorityVector(("speed", "cost_fit"), weights),
        sub_weights={},
        alternatives=tuple(alternatives),
        knockouts=tuple(knockouts),
    )


@pytest.fixture
def two_criterion_problem():
    return make_two_criterion_problem([
        Alternative(id="x1", metrics={"speed": 0.9, "cost_fit": 0.4}),
        Alternative(id="x2", metrics={"speed": 0.5, "cost_fit": 0.8}),
        Alternative(id="x3", metrics={"speed": 0.3, "cost_fit": 0.3}),
    ])


def random_reciprocal_matrix(rng, n):
    """Random valid judgment matrix with ratios spread over the 1/9..9 range."""
    entries = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            value = float(np.exp(rng.uniform(-np.log(9.0), np.log(9.0))))
            entries[i, j] = value
            entries[j, i] = 1.0 / value
    labels = tuple(f"c{k}" for k in range(n))
    return PairwiseMatrix(labels, entries)
