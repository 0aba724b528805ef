"""Exact-arithmetic Lloyd's k-means with per-iteration disclosure recording.

Simulates the aggregator's view of a federated k-means run: at every
iteration the per-cluster coordinate sums are disclosed.  All arithmetic
is exact (Python ints for data and sums, Fractions for centroids), so the
recorded trace and the ground-truth assignment matrix satisfy
``W_true @ X == stacked sums`` bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator

from .validation import check_integer_matrix, check_random_state

# Squared int64 terms must not overflow when summed over d coordinates.
_INT64_SAFE = 2**62


class ConfigurationError(ValueError):
    """A clustering configuration is inconsistent with the dataset."""


@dataclass(frozen=True)
class Dataset:
    """An n x d matrix of exact integer feature values (the private inputs)."""

    values: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.values or not self.values[0]:
            raise ValueError("Dataset must have at least one row and one column")

    @classmethod
    def from_rows(cls, rows) -> "Dataset":
        checked = check_integer_matrix(rows, name="dataset")
        return cls(tuple(tuple(r) for r in checked))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def d(self) -> int:
        return len(self.values[0])

    def column_totals(self) -> list[int]:
        totals = [0] * self.d
        for row in self.values:
            for j, v in enumerate(row):
                totals[j] += v
        return totals

    @cached_property
    def _max_abs(self) -> int:
        return max((abs(v) for row in self.values for v in row), default=0)

    @cached_property
    def _as_int64(self) -> "np.ndarray | None":
        # Fast-path cache; None when values do not fit in int64.
        if self._max_abs >= 2**62:
            return None
        return np.asarray(self.values, dtype=np.int64)


INIT_SCHEMES = ("kmeans++", "forgy")


@dataclass(frozen=True)
class ClusterConfig:
    """Parameters of one simulated clustering run."""

    k: int
    max_iter: int
    seed: "int | np.random.SeedSequence | np.random.Generator | None" = None
    init: str = "kmeans++"
    empty_cluster_policy: str = "retain_previous_centroid"

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.init not in INIT_SCHEMES:
            raise ConfigurationError(f"unknown init scheme {self.init!r}; pick from {INIT_SCHEMES}")
        if self.empty_cluster_policy != "retain_previous_centroid":
            raise ConfigurationError(f"unknown empty-cluster policy {self.empty_cluster_policy!r}")


@dataclass(frozen=True)
class DisclosureTrace:
    """What the adversary observes: one k x d integer sum matrix per iteration."""

    sums: tuple[tuple[tuple[int, ...], ...], ...]
    k: int
    d: int

    def __post_init__(self):
        for t, mat in enumerate(self.sums):
            if len(mat) != self.k or any(len(row) != self.d for row in mat):
                raise ValueError(f"iteration {t} sums are not {self.k}x{self.d}")

    @classmethod
    def from_sums(cls, sums) -> "DisclosureTrace":
        """Build a trace from a plain sequence of k x d integer matrices."""
        mats = [check_integer_matrix(m, name="sums") for m in sums]
        if not mats:
            raise ValueError("a trace needs at least one iteration")
        k, d = len(mats[0]), len(mats[0][0])
        return cls(tuple(tuple(tuple(r) for r in m) for m in mats), k=k, d=d)

    @property
    def t_actual(self) -> int:
        return len(self.sums)

    def stacked(self) -> list[list[int]]:
        """All iterations' sums stacked into one (k*T) x d matrix."""
        return [list(row) for mat in self.sums for row in mat]


@dataclass(frozen=True)
class GroundTruthAssignments:
    """Iteration-stacked one-hot assignment matrix, kept by the simulator only."""

    w_true: tuple[tuple[int, ...], ...]
    per_iter_counts: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.w_true[0])

    def column(self, i: int) -> tuple[int, ...]:
        return tuple(row[i] for row in self.w_true)


class LloydResult(NamedTuple):
    trace: DisclosureTrace
    ground_truth: GroundTruthAssignments
    converged: bool
    t_actual: int
    centroids: list[list[Fraction]]
    labels: list[int]


def init_centroids(dataset: Dataset, config: ClusterConfig, rng: np.random.Generator) -> list[list[Fraction]]:
    """Pick k distinct sample rows uniformly without replacement (Forgy)."""
    if config.k > dataset.n:
        raise ConfigurationError(f"k={config.k} exceeds the number of samples n={dataset.n}")
    idx = rng.choice(dataset.n, size=config.k, replace=False)
    return [[Fraction(v) for v in dataset.values[int(i)]] for i in idx]


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrarily large exact bounds."""
    if bound < 2**63:
        return int(rng.integers(bound))
    nbits = bound.bit_length()
    nbytes = (nbits + 7) // 8
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "big") >> (nbytes * 8 - nbits)
        if r < bound:
            return r


def _sq_dists_to_row(dataset: Dataset, row: tuple[int, ...]) -> list[int]:
    """Exact squared distances from every sample to one integer row."""
    arr = dataset._as_int64
    if arr is not None:
        m = 2 * max(dataset._max_abs, max(abs(v) for v in row))
        if dataset.d * m * m < _INT64_SAFE:
            diff = arr - np.asarray(row, dtype=np.int64)
            return [int(v) for v in np.einsum("ij,ij->i", diff, diff)]
    return [sum((a - b) ** 2 for a, b in zip(x, row)) for x in dataset.values]


def init_centroids_plusplus(dataset: Dataset, config: ClusterConfig, rng: np.random.Generator) -> list[list[Fraction]]:
    """Classic D^2-weighted seeding over exact integer distances.

    The first centroid is a uniform sample row; each next row is drawn
    with probability proportional to its squared distance from the
    nearest centroid so far.  Weights are exact integers, so selection
    is exact and deterministic for a given stream.
    """
    if config.k > dataset.n:
        raise ConfigurationError(f"k={config.k} exceeds the number of samples n={dataset.n}")
    n = dataset.n
    first = int(rng.integers(n))
    chosen = [first]
    best = _sq_dists_to_row(dataset, dataset.values[first])
    while len(chosen) < config.k:
        total = sum(best)
        if total == 0:
            # Every sample coincides with a centroid; any unchosen row works.
            rest = [i for i in range(n) if i not in chosen]
            nxt = rest[int(rng.integers(len(rest)))]
        else:
            r = _randbelow(rng, total)
            acc = 0
            for i, weight in enumerate(best):
                acc += weight
                if r < acc:
                    nxt = i
                    break
        chosen.append(nxt)
        for i, d2 in enumerate(_sq_dists_to_row(dataset, dataset.values[nxt])):
            if d2 < best[i]:
                best[i] = d2
    return [[Fraction(v) for v in dataset.values[c]] for c in chosen]


_INITIALIZERS = {"forgy": init_centroids, "kmeans++": init_centroids_plusplus}


def _scaled_centroids(centroids) -> list[tuple[list[int], int]]:
    """Clear denominators: each row as (den * coords as ints, den)."""
    scaled = []
    for row in centroids:
        den = 1
        for f in row:
            den = math.lcm(den, f.denominator)
        vec = [int(f * den) for f in row]
        scaled.append((vec, den))
    return scaled


def _assign_exact(values, scaled) -> list[int]:
    labels = []
    for x in values:
        best_a = best_den2 = None
        best_j = 0
        for j, (vec, den) in enumerate(scaled):
            a = 0
            for xi, vi in zip(x, vec):
                t = den * xi - vi
                a += t * t
            den2 = den * den
            # dist_j < dist_best  <=>  a * best_den2 < best_a * den2
            if best_a is None or a * best_den2 < best_a * den2:
                best_a, best_den2, best_j = a, den2, j
        labels.append(best_j)
    return labels


def _assign_int64(dataset: Dataset, scaled) -> "list[int] | None":
    """Vectorized exact assignment; returns None when int64 could overflow."""
    arr = dataset._as_int64
    if arr is None:
        return None
    d = dataset.d
    bound = 0
    for vec, den in scaled:
        m = den * dataset._max_abs + max((abs(v) for v in vec), default=0)
        bound = max(bound, m)
    if d * bound * bound >= _INT64_SAFE:
        return None
    k = len(scaled)
    dists = np.empty((dataset.n, k), dtype=np.int64)
    for j, (vec, den) in enumerate(scaled):
        diff = arr * den - np.asarray(vec, dtype=np.int64)
        dists[:, j] = np.einsum("ij,ij->i", diff, diff)
    dens2 = [den * den for _, den in scaled]
    if len(set(dens2)) == 1:
        return [int(j) for j in np.argmin(dists, axis=1)]
    labels = []
    for row in dists.tolist():
        best_a = best_den2 = None
        best_j = 0
        for j, a in enumerate(row):
            if best_a is None or a * best_den2 < best_a * dens2[j]:
                best_a, best_den2, best_j = a, dens2[j], j
        labels.append(best_j)
    return labels


def assign(dataset: Dataset, centroids) -> list[int]:
    """Map each sample to the nearest centroid under exact squared distance.

    Distances are compared in rationals with denominators cleared, so no
    rounding can flip an assignment; ties go to the lowest cluster index.
    """
    if not centroids:
        raise ValueError("centroids must contain at least one row")
    scaled = _scaled_centroids(centroids)
    labels = _assign_int64(dataset, scaled)
    if labels is None:
        labels = _assign_exact(dataset.values, scaled)
    return labels


def cluster_sums(dataset: Dataset, assignments, k: int) -> list[list[int]]:
    """Exact per-cluster coordinate sums; empty clusters yield zero rows."""
    sums = [[0] * dataset.d for _ in range(k)]
    for x, j in zip(dataset.values, assignments):
        if not 0 <= j < k:
            raise ValueError(f"assignment index {j} out of range for k={k}")
        row = sums[j]
        for c, v in enumerate(x):
            row[c] += v
    return sums


def run(dataset: Dataset, config: ClusterConfig) -> LloydResult:
    """Execute Lloyd iterations, recording the disclosure trace and ground truth.

    Each assignment step appends one sums matrix to the trace and one
    one-hot block to the assignment matrix.  The run halts as soon as two
    consecutive assignment vectors are identical (the repeated step is
    still recorded) or when ``max_iter`` steps have executed.  Empty
    clusters keep their previous centroid so k stays fixed.
    """
    rng = check_random_state(config.seed)
    k = config.k
    centroids = _INITIALIZERS[config.init](dataset, config, rng)
    sums_seq: list[tuple[tuple[int, ...], ...]] = []
    count_seq: list[tuple[int, ...]] = []
    blocks: list[tuple[int, ...]] = []
    prev = None
    labels: list[int] = []
    converged = False
    for _ in range(config.max_iter):
        labels = assign(dataset, centroids)
        sums = cluster_sums(dataset, labels, k)
        counts = [0] * k
        for j in labels:
            counts[j] += 1
        sums_seq.append(tuple(tuple(r) for r in sums))
        count_seq.append(tuple(counts))
        for j in range(k):
            blocks.append(tuple(1 if lab == j else 0 for lab in labels))
        centroids = [
            [Fraction(s, counts[j]) for s in sums[j]] if counts[j] > 0 else centroids[j]
            for j in range(k)
        ]
        if labels == prev:
            converged = True
            break
        prev = labels
    trace = DisclosureTrace(tuple(sums_seq), k=k, d=dataset.d)
    ground = GroundTruthAssignments(tuple(blocks), tuple(count_seq))
    return LloydResult(trace, ground, converged, len(sums_seq), centroids, labels)


def trace_from_centroid_disclosures(centroids_per_iter, counts_per_iter, d: int) -> DisclosureTrace:
    """Adapter for protocols that disclose centroids and cardinalities.

    Rebuilds the sum trace as centroid * count per cluster; every product
    must come out an exact integer or the disclosure is inconsistent.
    """
    if len(centroids_per_iter) != len(counts_per_iter):
        raise ValueError("centroid and count sequences differ in length")
    sums_seq = []
    k = len(counts_per_iter[0]) if counts_per_iter else 0
    for t, (cents, counts) in enumerate(zip(centroids_per_iter, counts_per_iter)):
        if len(cents) != len(counts):
            raise ValueError(f"iteration {t}: {len(cents)} centroids but {len(counts)} counts")
        mat = []
        for j, (row, cnt) in enumerate(zip(cents, counts)):
            out = []
            for c, f in enumerate(row):
                s = Fraction(f) * cnt
                if s.denominator != 1:
                    raise ValueError(f"iteration {t}, cluster {j}, coord {c}: centroid*count is not an integer")
                out.append(int(s))
            mat.append(tuple(out))
        sums_seq.append(tuple(mat))
    return DisclosureTrace(tuple(sums_seq), k=k, d=d)


class FederatedKMeans(BaseEstimator):
    """Lloyd's k-means over exact integers, exposing the disclosure trace.

    Estimator-style front end for :func:`run`.  After ``fit`` the
    adversary-visible trace is in ``trace_`` and the simulator-private
    assignment matrix in ``ground_truth_``.

    Parameters
    ----------
    n_clusters : number of clusters k.
    max_iter : iteration cap; the run may stop earlier on convergence.
    init : centroid initialization scheme ("kmeans++" or "forgy").
    empty_cluster_policy : what to do with empty clusters
        ("retain_previous_centroid").
    random_state : seed, SeedSequence or Generator for initialization.
    """

    def __init__(self, n_clusters=4, max_iter=10, init="kmeans++",
                 empty_cluster_policy="retain_previous_centroid", random_state=None):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.init = init
        self.empty_cluster_policy = empty_cluster_policy
        self.random_state = random_state

    def _config(self):
        return ClusterConfig(
            k=self.n_clusters,
            max_iter=self.max_iter,
            seed=self.random_state,
            init=self.init,
            empty_cluster_policy=self.empty_cluster_policy,
        )

    def fit(self, X, y=None):
        dataset = X if isinstance(X, Dataset) else Dataset.from_rows(X)
        result = run(dataset, self._config())
        self.dataset_ = dataset
        self.trace_ = result.trace
        self.ground_truth_ = result.ground_truth
        self.converged_ = result.converged
        self.n_iter_ = result.t_actual
        self.centroids_ = result.centroids
        self.labels_ = result.labels
        return self

    def predict(self, X):
        if not hasattr(self, "centroids_"):
            raise RuntimeError("FederatedKMeans instance is not fitted yet")
        dataset = X if isinstance(X, Dataset) else Dataset.from_rows(X)
        return assign(dataset, self.centroids_)

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
