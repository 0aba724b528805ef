"""Candidate trajectory matrix construction from a disclosure trace.

The attacker never sees assignments, only per-iteration cluster sums.
Sign changes between consecutive sum vectors reveal which clusters
gained or lost points; from those index sets a binary matrix of
candidate per-sample trajectories is assembled recursively.  Each
column is one candidate trajectory: a one-hot cluster membership per
iteration block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulation import DisclosureTrace


class InsufficientTraceError(ValueError):
    """The trace is too short to expose any iteration-to-iteration change."""


@dataclass(frozen=True)
class IndexSets:
    """Clusters that gained / lost points between two iterations."""

    gains: frozenset[int]
    losses: frozenset[int]

    @property
    def budget(self) -> int:
        return max(len(self.gains), len(self.losses))


@dataclass(frozen=True)
class RecordMatrix:
    """Deduplicated binary matrix of candidate trajectories (kT rows)."""

    w_star: tuple[tuple[int, ...], ...]
    k: int

    @property
    def n_star(self) -> int:
        return len(self.w_star[0]) if self.w_star else 0

    @property
    def rows(self) -> int:
        return len(self.w_star)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.w_star)


def compute_deltas(trace: DisclosureTrace) -> list[list[list[int]]]:
    """Element-wise differences of consecutive sum matrices (length T-1)."""
    if trace.t_actual < 2:
        raise InsufficientTraceError(
            f"need at least 2 disclosed iterations, got {trace.t_actual}"
        )
    deltas = []
    for prev, nxt in zip(trace.sums, trace.sums[1:]):
        deltas.append([[b - a for a, b in zip(pr, nr)] for pr, nr in zip(prev, nxt)])
    return deltas


def index_sets(delta, coord: int = 0) -> IndexSets:
    """Classify clusters by the sign of their change in one coordinate.

    Assignment switches move whole samples, so they show up in every
    coordinate at once; a single designated coordinate suffices to read
    the gain/loss pattern.
    """
    if coord >= len(delta[0]):
        raise ValueError(f"coord {coord} out of range for d={len(delta[0])}")
    gains = frozenset(j for j, row in enumerate(delta) if row[coord] > 0)
    losses = frozenset(j for j, row in enumerate(delta) if row[coord] < 0)
    return IndexSets(gains=gains, losses=losses)


def fill_one(index_set, r: int, k: int, rng: np.random.Generator) -> list[list[int]]:
    """Build a k x r template block, one 1 per column, covering the index set.

    The first ``len(index_set)`` columns place the mandatory indices in
    ascending order; any surplus columns repeat indices drawn uniformly
    from the set.  An empty set yields the all-zero block.
    """
    members = sorted(index_set)
    if r < len(members):
        raise ValueError(f"budget r={r} is below the index set size {len(members)}")
    block = [[0] * r for _ in range(k)]
    if not members:
        return block
    for col, j in enumerate(members):
        block[j][col] = 1
    for col in range(len(members), r):
        block[members[int(rng.integers(len(members)))]][col] = 1
    return block


def build_initial(b1, d1) -> list[list[int]]:
    """Stack the first loss block over the first gain block: 2k x r1.

    Column c reads: the candidate sat in the losing cluster (row of the
    1 in b1) at iteration 1 and moved to the gaining cluster (row of the
    1 in d1) at iteration 2.
    """
    if len(b1) != len(d1) or (b1 and d1 and len(b1[0]) != len(d1[0])):
        raise ValueError("loss and gain blocks must share the k x r shape")
    return [list(row) for row in b1] + [list(row) for row in d1]


def recursive_step(w_prev, b_t, d_t, t: int) -> list[list[int]]:
    """Extend the trajectory matrix by one iteration.

    Existing columns repeat their last k-row block (those candidates stay
    put).  Each new column sits in its losing cluster for all t prior
    iterations (the loss block stacked t times) and moves to its gaining
    cluster in the new block.
    """
    k = len(b_t)
    if len(d_t) != k:
        raise ValueError("loss and gain blocks must have k rows each")
    if len(w_prev) != t * k:
        raise ValueError(f"w_prev has {len(w_prev)} rows, expected t*k={t * k}")
    r_t = len(b_t[0]) if b_t else 0
    if (len(d_t[0]) if d_t else 0) != r_t:
        raise ValueError("loss and gain blocks must share the column budget")
    out = []
    for i, row in enumerate(w_prev):
        out.append(list(row) + list(b_t[i % k]))
    tail = w_prev[-k:]
    for i in range(k):
        out.append(list(tail[i]) + list(d_t[i]))
    return out


def stationary_blocks(k: int, t: int) -> list[list[int]]:
    """T identity blocks stacked: the k never-switching trajectories."""
    if k < 1 or t < 1:
        raise ValueError("k and t must be >= 1")
    return [[1 if c == i % k else 0 for c in range(k)] for i in range(k * t)]


def dedup_columns(m) -> list[list[int]]:
    """Drop duplicate columns, keeping the first occurrence of each."""
    if not m:
        return []
    seen = {}
    for j in range(len(m[0])):
        col = tuple(row[j] for row in m)
        if col not in seen:
            seen[col] = j
    keep = sorted(seen.values())
    return [[row[j] for j in keep] for row in m]


def build_record(trace: DisclosureTrace, rng: np.random.Generator, coord: int = 0) -> RecordMatrix:
    """Assemble the full candidate trajectory matrix for a trace.

    Pipeline: consecutive deltas -> per-step gain/loss index sets and
    column budgets -> fill-one template blocks -> recursive combination
    across iterations -> append the stationary trajectories -> merge
    duplicate columns.
    """
    deltas = compute_deltas(trace)
    k, t_total = trace.k, trace.t_actual
    steps = []
    for delta in deltas:
        sets = index_sets(delta, coord)
        steps.append(sets)

    first = steps[0]
    b1 = fill_one(first.losses, first.budget, k, rng)
    d1 = fill_one(first.gains, first.budget, k, rng)
    w = build_initial(b1, d1)
    for t in range(2, t_total):
        sets = steps[t - 1]
        b_t = fill_one(sets.losses, sets.budget, k, rng)
        d_t = fill_one(sets.gains, sets.budget, k, rng)
        w = recursive_step(w, b_t, d_t, t)

    stationary = stationary_blocks(k, t_total)
    combined = [list(wr) + list(sr) for wr, sr in zip(w, stationary)]
    merged = dedup_columns(combined)
    return RecordMatrix(tuple(tuple(row) for row in merged), k=k)


def truncate_trace(trace: DisclosureTrace, last: int) -> DisclosureTrace:
    """Keep only the final ``last`` disclosed iterations of a trace."""
    if last < 2:
        raise ValueError(f"a truncated trace needs at least 2 iterations, got {last}")
    if last >= trace.t_actual:
        return trace
    return DisclosureTrace(trace.sums[-last:], k=trace.k, d=trace.d)
