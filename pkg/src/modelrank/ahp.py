"""Pairwise-comparison weighting engine.

Derives criterion priority weights from square reciprocal judgment
matrices (ratio judgments on the classic 1-9 scale), measures how
internally consistent those judgments are, and merges several
stakeholders into a single group weight vector.

Two prioritization methods are provided:

* row geometric mean (default) -- closed form, deterministic, and for
  3x3 matrices identical to the principal eigenvector;
* principal eigenvector via power iteration -- the classic
  prescription, useful as a cross-check and for callers that want it.

Group aggregation likewise comes in two flavours: averaging the
per-stakeholder priority vectors (the default) or taking the
element-wise geometric mean of the judgment matrices and prioritizing
the merged matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, ValidationFailure

# Random consistency indices for matrix sizes 1..10 (Saaty's constants).
RANDOM_INDEX = {
    1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
    6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
}

#: Conventional acceptability bound for the consistency ratio.
CR_THRESHOLD = 0.10

# Judgments are often recorded with two printed decimals (0.17 standing
# for 1/6).  A stored lower-triangle entry within this relative distance
# of the exact reciprocal of its mirror cell is snapped onto it.  The
# epsilon keeps two-decimal prints of 1/6 and 1/7, which land exactly on
# the 2% boundary, inside the tolerance despite float rounding.
RECIPROCAL_SNAP_TOL = 0.02
_SNAP_EPS = 1e-9

# Strict reciprocity tolerance used by validation, applied to the
# product entries[i][j] * entries[j][i] relative to 1.
_RECIPROCITY_TOL = 1e-6


def _snap_reciprocals(entries: np.ndarray) -> np.ndarray:
    """Recompute near-reciprocal lower-triangle cells from the upper triangle."""
    n = entries.shape[0]
    out = entries.copy()
    for i in range(n):
        for j in range(i + 1, n):
            upper = out[i, j]
            if not np.isfinite(upper) or upper <= 0.0:
                continue
            exact = 1.0 / upper
            deviation = abs(out[j, i] - exact) / exact
            if deviation <= RECIPROCAL_SNAP_TOL + _SNAP_EPS:
                out[j, i] = exact
    return out


@dataclass(frozen=True)
class PairwiseMatrix:
    """Square matrix of pairwise importance ratios over labelled criteria.

    ``entries[i][j]`` states how many times more important
    ``labels[i]`` is than ``labels[j]``.  The diagonal is 1 and mirror
    cells are reciprocals of each other.  Construction snaps stored
    lower-triangle judgments that sit within 2% of the exact reciprocal
    (e.g. a recorded 0.33 opposite a 3) onto the exact value; anything
    further off is left untouched for :func:`validate_matrix` to report.
    """

    labels: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        entries = np.array(self.entries, dtype=float)
        if entries.ndim == 2 and entries.shape[0] == entries.shape[1]:
            entries = _snap_reciprocals(entries)
        entries.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_upper_triangle(cls, labels: Sequence[str], upper: Sequence[float]) -> "PairwiseMatrix":
        """Build a full reciprocal matrix from row-major upper-triangle judgments.

        For labels (A, B, C), ``upper`` is (A/B, A/C, B/C).
        """
        n = len(labels)
        expected = n * (n - 1) // 2
        if len(upper) != expected:
            raise ValueError(f"expected {expected} upper-triangle judgments for {n} labels, got {len(upper)}")
        entries = np.ones((n, n))
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                value = float(upper[k])
                entries[i, j] = value
                entries[j, i] = 1.0 / value
                k += 1
        return cls(tuple(labels), entries)

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class PriorityVector:
    """Ordered criterion weights, normally summing to 1."""

    labels: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        weights = np.array(self.weights, dtype=float)
        weights.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    def as_dict(self) -> dict[str, float]:
        return {label: float(w) for label, w in zip(self.labels, self.weights)}

    def weight_for(self, label: str) -> float:
        try:
            return float(self.weights[self.labels.index(label)])
        except ValueError:
            raise KeyError(f"no weight for label {label!r}") from None

    def validate(self) -> list[str]:
        """Return violations of the unit-sum/shape invariants, empty if fine."""
        violations = []
        if self.weights.ndim != 1 or len(self.weights) != len(self.labels):
            violations.append(
                f"weights length {self.weights.size} does not match {len(self.labels)} labels"
            )
            return violations
        if not np.all(np.isfinite(self.weights)):
            violations.append("weights must be finite")
        if np.any(self.weights < 0.0) or np.any(self.weights > 1.0):
            violations.append("weights must lie in [0, 1]")
        total = float(self.weights.sum())
        if abs(total - 1.0) > 1e-9:
            violations.append(f"weights sum {total:.2f} != 1")
        return violations


@dataclass(frozen=True)
class ConsistencyReport:
    """Consistency diagnostics for one judgment matrix."""

    lambda_max: float
    ci: float
    ri: float
    cr: float
    acceptable: bool


@dataclass(frozen=True)
class StakeholderJudgment:
    """One stakeholder's judgment matrix, tagged with an identifier."""

    stakeholder_id: str
    matrix: PairwiseMatrix


def validate_matrix(matrix: PairwiseMatrix) -> list[str]:
    """Check the reciprocal-matrix invariants, returning one entry per violation.

    Never raises: an empty list means the matrix is valid. Violations
    name the offending cell and the rule it breaks.
    """
    entries = matrix.entries
    violations: list[str] = []
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        violations.append(f"matrix must be square, got shape {entries.shape}")
        return violations
    n = entries.shape[0]
    if n != len(matrix.labels):
        violations.append(f"{len(matrix.labels)} labels do not match matrix size {n}")
        return violations
    if n < 2:
        violations.append("matrix must compare at least 2 criteria")
    for i in range(n):
        for j in range(n):
            value = entries[i, j]
            if not np.isfinite(value) or value <= 0.0:
                violations.append(f"entry ({i},{j}) = {value} must be a positive finite ratio")
    if violations:
        return violations
    for i in range(n):
        if entries[i, i] != 1.0:
            violations.append(f"diagonal entry ({i},{i}) = {entries[i, i]} must equal 1")
    for i in range(n):
        for j in range(i + 1, n):
            product = entries[i, j] * entries[j, i]
            if abs(product - 1.0) > _RECIPROCITY_TOL:
                violations.append(
                    f"reciprocity violated at ({j},{i}): "
                    f"{entries[j, i]:g} is not the reciprocal of {entries[i, j]:g}"
                )
    return violations


def _require_valid(matrix: PairwiseMatrix) -> None:
    violations = validate_matrix(matrix)
    if violations:
        raise ValidationFailure(
            f"invalid pairwise matrix over {matrix.labels}", violations
        )


def priorities_geometric(matrix: PairwiseMatrix) -> PriorityVector:
    """Derive priority weights as normalized row geometric means.

    Args:
        matrix: validated reciprocal judgment matrix.

    Returns:
        PriorityVector summing to 1, in the matrix's label order.

    Raises:
        ValidationFailure: if the matrix breaks a reciprocal-matrix invariant.
    """
    _require_valid(matrix)
    log_means = np.log(matrix.entries).mean(axis=1)
    raw = np.exp(log_means)
    return PriorityVector(matrix.labels, raw / raw.sum())


def priorities_eigen(
    matrix: PairwiseMatrix,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> PriorityVector:
    """Derive priority weights as the principal right eigenvector.

    Runs power iteration from the uniform vector, normalizing each
    iterate to unit sum, until successive iterates differ by less than
    ``tol`` in max-norm.

    Raises:
        ValidationFailure: if the matrix is invalid or ``tol`` is not positive.
        ConvergenceError: if the iteration does not settle within ``max_iter``.
    """
    _require_valid(matrix)
    if tol <= 0.0:
        raise ValidationFailure("power iteration tolerance must be positive")
    n = matrix.size
    weights = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        candidate = matrix.entries @ weights
        candidate /= candidate.sum()
        if np.max(np.abs(candidate - weights)) < tol:
            return PriorityVector(matrix.labels, candidate)
        weights = candidate
    raise ConvergenceError(
        f"power iteration did not converge within {max_iter} iterations "
        f"for the matrix over {matrix.labels}"
    )


def consistency(
    matrix: PairwiseMatrix,
    weights: PriorityVector,
    threshold: float = CR_THRESHOLD,
) -> ConsistencyReport:
    """Compute lambda_max, CI and CR for a matrix and its priority vector.

    ``lambda_max`` is estimated as the mean over rows of
    ``(A w)_i / w_i``; for reciprocal matrices this is always >= n, and
    equals the principal eigenvalue whenever ``weights`` is the
    principal eigenvector (always the case for 3x3 matrices, where the
    geometric-mean vector coincides with it).

    An unacceptable ratio is reported, never raised: callers decide
    whether to warn or proceed.

    Raises:
        ValidationFailure: degenerate weights (any w_i <= 0) or a matrix
            larger than the random-index table covers.
    """
    n = matrix.size
    w = weights.weights
    if len(w) != n:
        raise ValidationFailure(
            f"priority vector of length {len(w)} does not match matrix size {n}"
        )
    if np.any(w <= 0.0):
        raise ValidationFailure("degenerate priority vector: all weights must be positive")
    if n not in RANDOM_INDEX:
        raise ValidationFailure(f"consistency table exhausted: no random index for n = {n}")
    ratios = (matrix.entries @ w) / w
    lambda_max = float(ratios.mean())
    ci = (lambda_max - n) / (n - 1) if n > 1 else 0.0
    ri = RANDOM_INDEX[n]
    cr = ci / ri if ri > 0.0 else 0.0
    return ConsistencyReport(
        lambda_max=lambda_max,
        ci=ci,
        ri=ri,
        cr=cr,
        acceptable=cr <= threshold,
    )


def aggregate_priorities(
    vectors: Sequence[PriorityVector],
    method: str = "arithmetic-mean",
) -> PriorityVector:
    """Merge per-stakeholder priority vectors into one group vector.

    ``arithmetic-mean`` averages component-wise (unit sum is preserved);
    ``geometric-mean`` takes component-wise geometric means and
    renormalizes. All vectors must share labels and order.
    """
    if not vectors:
        raise ValidationFailure("need at least one priority vector to aggregate")
    labels = vectors[0].labels
    for vector in vectors[1:]:
        if vector.labels != labels:
            raise ValidationFailure(
                f"label mismatch: {vector.labels} does not match {labels}"
            )
    stacked = np.stack([vector.weights for vector in vectors])
    if method == "arithmetic-mean":
        merged = stacked.mean(axis=0)
    elif method == "geometric-mean":
        merged = np.exp(np.log(stacked).mean(axis=0))
        merged = merged / merged.sum()
    else:
        raise ValidationFailure(
            f"unknown aggregation method {method!r}; "
            "expected 'arithmetic-mean' or 'geometric-mean'"
        )
    return PriorityVector(labels, merged)


def aggregate_judgments(judgments: Sequence[StakeholderJudgment]) -> PairwiseMatrix:
    """Merge judgment matrices element-wise by geometric mean.

    The geometric mean preserves reciprocity, so the merged matrix is
    itself a valid judgment matrix and can be prioritized directly.
    Every input matrix is validated first; all must share labels.
    """
    if not judgments:
        raise ValidationFailure("need at least one judgment to aggregate")
    labels = judgments[0].matrix.labels
    for judgment in judgments:
        if judgment.matrix.labels != labels:
            raise ValidationFailure(
                f"label mismatch for stakeholder {judgment.stakeholder_id!r}: "
                f"{judgment.matrix.labels} does not match {labels}"
            )
        violations = validate_matrix(judgment.matrix)
        if violations:
            raise ValidationFailure(
                f"invalid matrix for stakeholder {judgment.stakeholder_id!r}", violations
            )
    stacked = np.stack([judgment.matrix.entries for judgment in judgments])
    merged = np.exp(np.log(stacked).mean(axis=0))
    return PairwiseMatrix(labels, merged)


def stakeholder_reports(
    judgments: Iterable[StakeholderJudgment],
    method: str = "geometric",
    threshold: float = CR_THRESHOLD,
) -> list[tuple[StakeholderJudgment, PriorityVector, ConsistencyReport]]:
    """Prioritize each stakeholder's matrix and attach its consistency report."""
    prioritize = priorities_geometric if method == "geometric" else priorities_eigen
    results = []
    for judgment in judgments:
        weights = prioritize(judgment.matrix)
        report = consistency(judgment.matrix, weights, threshold=threshold)
        results.append((judgment, weights, report))
    return results
