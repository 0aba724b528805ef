"""Judging attack output against simulator ground truth.

The simulator knows the real assignment matrix; grouping its identical
columns gives the true deduplicated system (unique trajectories with
per-trajectory aggregate values).  A certified variable counts as a
recovery only when its candidate trajectory column exactly equals a
true trajectory and the certified value equals that trajectory's
aggregate, all in exact arithmetic.

A run passes when its certificate is sound (no certified nonzero value
is wrong; all-zero certifications merely assert an unused candidate)
and at least one correct recovery concerns a trajectory that actually
switched clusters.  Stationary recoveries alone do not qualify: for a
run that never moved a point they reproduce the disclosed sums
verbatim, which is not new information.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rref import LeakageCertificate
from .simulation import Dataset, GroundTruthAssignments
from .trajectory import RecordMatrix


@dataclass(frozen=True)
class TrueSystem:
    """Deduplicated ground-truth trajectories with their aggregates."""

    w_star_true: tuple[tuple[int, ...], ...]
    y_true: tuple[tuple[int, ...], ...]
    multiplicity: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.y_true)


@dataclass(frozen=True)
class TrialReport:
    """Outcome of one simulated attack run."""

    success: bool
    exact_input_recoveries: int
    aggregate_recoveries: int
    mismatches: int
    iterations: int
    l2_errors: tuple[int, ...]
    converged: bool = True
    switching_recoveries: int = 0
    zero_certifications: int = 0
    # (sample index, recovered d-vector) for each multiplicity-1 recovery
    recovered_samples: tuple[tuple[int, tuple[int, ...]], ...] = field(default=())


def true_system(ground: GroundTruthAssignments, dataset: Dataset) -> TrueSystem:
    """Group identical assignment columns into unique trajectories.

    Row i of ``y_true`` is the exact sum of all samples sharing
    trajectory i; ``multiplicity`` records how many samples that is.
    First-seen column order is preserved.
    """
    n = ground.n
    if n != dataset.n:
        raise ValueError(f"assignment matrix covers {n} samples, dataset has {dataset.n}")
    groups: dict[tuple[int, ...], list[int]] = {}
    for i in range(n):
        groups.setdefault(ground.column(i), []).append(i)
    cols = list(groups)
    y = []
    for col in cols:
        total = [0] * dataset.d
        for i in groups[col]:
            for j, v in enumerate(dataset.values[i]):
                total[j] += v
        y.append(tuple(total))
    w_rows = tuple(tuple(col[r] for col in cols) for r in range(len(ground.w_true)))
    return TrueSystem(
        w_star_true=w_rows,
        y_true=tuple(y),
        multiplicity=tuple(len(groups[c]) for c in cols),
        members=tuple(tuple(groups[c]) for c in cols),
    )


def truncate_ground_truth(ground: GroundTruthAssignments, last: int, k: int) -> GroundTruthAssignments:
    """Restrict ground truth to the final ``last`` iteration blocks.

    Used when the attacker only observed a trace suffix: trajectories are
    then defined over that window, so samples distinguished only by
    earlier iterations merge.
    """
    t = len(ground.per_iter_counts)
    if last >= t:
        return ground
    return GroundTruthAssignments(
        w_true=ground.w_true[-last * k:],
        per_iter_counts=ground.per_iter_counts[-last:],
    )


def _is_stationary(column: tuple[int, ...], k: int) -> bool:
    """True when the trajectory stays in one cluster for all iterations."""
    j = next((r for r, v in enumerate(column[:k]) if v), None)
    if j is None:
        return False
    return all(v == (1 if i % k == j else 0) for i, v in enumerate(column))


def classify(
    cert: LeakageCertificate,
    record: RecordMatrix,
    truth: TrueSystem,
    *,
    iterations: int,
    converged: bool = True,
    strict_singleton: bool = False,
) -> TrialReport:
    """Score one attack run against the true deduplicated system.

    Each certified variable is matched to the true trajectory with an
    identical column; a match whose value equals the true aggregate is an
    exact-input recovery (multiplicity 1) or an aggregate recovery
    (multiplicity > 1).  A certified all-zero value is a benign negative
    finding; anything else unmatched is a mismatch that invalidates the
    run.  Success additionally needs one correct recovery of a switching
    trajectory; under ``strict_singleton`` that recovery must be an
    individual sample (multiplicity 1).
    """
    if record.rows != len(truth.w_star_true):
        raise ValueError(
            f"attack matrix has {record.rows} rows, ground truth {len(truth.w_star_true)}"
        )
    k = record.k
    by_column = {}
    for g in range(truth.m):
        col = tuple(row[g] for row in truth.w_star_true)
        by_column[col] = g
    exact = aggregate = mismatch = zero_certs = 0
    switching = switching_exact = 0
    l2: list[int] = []
    recovered: list[tuple[int, tuple[int, ...]]] = []
    for var, value in cert.determined:
        col = record.column(var)
        g = by_column.get(col)
        if g is not None and tuple(value) == tuple(truth.y_true[g]):
            l2.append(0)
            moved = not _is_stationary(col, k)
            if moved:
                switching += 1
            if truth.multiplicity[g] == 1:
                exact += 1
                if moved:
                    switching_exact += 1
                recovered.append((truth.members[g][0], truth.y_true[g]))
            else:
                aggregate += 1
        elif all(v == 0 for v in value):
            zero_certs += 1
        else:
            mismatch += 1
    qualifying = switching_exact if strict_singleton else switching
    return TrialReport(
        success=mismatch == 0 and qualifying >= 1,
        exact_input_recoveries=exact,
        aggregate_recoveries=aggregate,
        mismatches=mismatch,
        iterations=iterations,
        l2_errors=tuple(l2),
        converged=converged,
        switching_recoveries=switching,
        zero_certifications=zero_certs,
        recovered_samples=tuple(recovered),
    )
