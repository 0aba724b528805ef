"""Trial orchestration, aggregation and report emission.

Every trial derives its three RNG streams (data, clustering, attack
completion) from (master_seed, trial_index), so results are independent
of execution order and safe to compute in parallel; the aggregate is a
deterministic fold over trial indices.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .data import gen_synthetic, load_csv
from .pgm import load_pgm_dir, write_pgm
from .rref import leakage_rows, rref_augmented
from .simulation import ClusterConfig, Dataset, run
from .trajectory import InsufficientTraceError, build_record, truncate_trace
from .verification import TrialReport, classify, true_system, truncate_ground_truth

DATASET_SOURCES = ("synthetic", "csv", "pgm_dir")


@dataclass(frozen=True)
class ExperimentConfig:
    """Bindings for one batch of attack trials."""

    dataset_source: str = "synthetic"
    n: int = 20
    d: int = 1
    value_lo: int = 0
    value_hi: int = 50
    k: int = 4
    max_iter: int = 10
    trials: int = 1000
    master_seed: int = 0
    truncate_l: "int | None" = None
    strict_singleton: bool = False
    scale: int = 1
    input_path: "str | None" = None
    csv_skip_header: bool = False
    coord: int = 0
    init: str = "kmeans++"

    def __post_init__(self):
        if self.dataset_source not in DATASET_SOURCES:
            raise ValueError(f"dataset_source must be one of {DATASET_SOURCES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.value_lo > self.value_hi:
            raise ValueError(f"value_lo={self.value_lo} exceeds value_hi={self.value_hi}")
        if self.truncate_l is not None and self.truncate_l < 2:
            raise ValueError("truncate_l must be >= 2")
        if self.dataset_source != "synthetic" and not self.input_path:
            raise ValueError(f"dataset_source {self.dataset_source!r} needs input_path")

    @property
    def regime(self) -> str:
        return "truncated" if self.truncate_l is not None else "full"

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["input_path"] is not None:
            d["input_path"] = str(d["input_path"])
        return d


@dataclass(frozen=True)
class TrialRecord:
    """One trial's outcome plus its derived seed."""

    seed: int
    iterations: int
    success: bool
    exact_inputs: int
    aggregates: int
    mismatches: int
    converged: bool
    recovered_samples: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "iter": self.iterations,
            "success": self.success,
            "exact_inputs": self.exact_inputs,
            "aggregates": self.aggregates,
            "mismatches": self.mismatches,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class BucketRow:
    iterations: int
    total: int
    passed: int

    @property
    def rate(self) -> float:
        return self.passed / self.total


@dataclass(frozen=True)
class AggregateReport:
    """Success counts bucketed by iterations-to-convergence."""

    config: ExperimentConfig
    buckets: tuple[BucketRow, ...]
    total_all: int
    total_passed: int
    trials: "tuple[TrialRecord, ...] | None" = None

    @property
    def total_rate(self) -> float:
        return self.total_passed / self.total_all

    def to_dict(self, include_trials: "bool | None" = None) -> dict:
        if include_trials is None:
            include_trials = self.trials is not None
        out = {
            "config": self.config.to_dict(),
            "regime": self.config.regime,
            "buckets": [
                {"iter": b.iterations, "all": b.total, "passed": b.passed, "rate": b.rate}
                for b in self.buckets
            ],
            "total": {"all": self.total_all, "passed": self.total_passed, "rate": self.total_rate},
        }
        if include_trials and self.trials is not None:
            out["trials"] = [t.to_dict() for t in self.trials]
        return out


def load_dataset(config: ExperimentConfig) -> "Dataset | None":
    """Load the fixed dataset for csv/pgm sources; synthetic draws per trial."""
    if config.dataset_source == "csv":
        return load_csv(config.input_path, scale=config.scale, skip_header=config.csv_skip_header)
    if config.dataset_source == "pgm_dir":
        return load_pgm_dir(config.input_path)
    return None


def run_single_trial(config: ExperimentConfig, dataset: "Dataset | None", index: int) -> TrialRecord:
    """Execute clustering + attack + verification for one trial index."""
    root = np.random.SeedSequence((config.master_seed, index))
    seed_repr = int(root.generate_state(1, np.uint64)[0])
    data_ss, cluster_ss, attack_ss = root.spawn(3)
    if dataset is None:
        dataset = gen_synthetic(
            config.n, config.d, config.value_lo, config.value_hi, np.random.default_rng(data_ss)
        )
    sim = run(dataset, ClusterConfig(k=config.k, max_iter=config.max_iter, seed=cluster_ss, init=config.init))
    trace = sim.trace
    ground = sim.ground_truth
    if config.truncate_l is not None:
        trace = truncate_trace(trace, config.truncate_l)
        ground = truncate_ground_truth(ground, trace.t_actual, config.k)
    try:
        record = build_record(trace, np.random.default_rng(attack_ss), coord=config.coord)
        cert = leakage_rows(rref_augmented(record.w_star, trace.stacked()))
        truth = true_system(ground, dataset)
        report = classify(
            cert,
            record,
            truth,
            iterations=sim.t_actual,
            converged=sim.converged,
            strict_singleton=config.strict_singleton,
        )
    except InsufficientTraceError:
        # One-iteration traces expose no deltas; the trial simply fails.
        report = TrialReport(
            success=False, exact_input_recoveries=0, aggregate_recoveries=0,
            mismatches=0, iterations=sim.t_actual, l2_errors=(), converged=sim.converged,
        )
    return TrialRecord(
        seed=seed_repr,
        iterations=report.iterations,
        success=report.success,
        exact_inputs=report.exact_input_recoveries,
        aggregates=report.aggregate_recoveries,
        mismatches=report.mismatches,
        converged=report.converged,
        recovered_samples=report.recovered_samples,
    )


_WORKER_STATE: "tuple[ExperimentConfig, Dataset | None] | None" = None


def _init_worker(config, dataset):
    global _WORKER_STATE
    _WORKER_STATE = (config, dataset)


def _worker_trial(index: int) -> TrialRecord:
    config, dataset = _WORKER_STATE
    return run_single_trial(config, dataset, index)


def run_trials(
    config: ExperimentConfig,
    dataset: "Dataset | None" = None,
    jobs: int = 1,
    keep_trials: bool = False,
) -> AggregateReport:
    """Run all trials and fold them into an aggregate report.

    ``jobs > 1`` fans trials out over worker processes; because every
    trial is seeded from its index alone, the report is byte-identical
    to a sequential run.
    """
    if dataset is None:
        dataset = load_dataset(config)
    indices = range(config.trials)
    if jobs <= 1:
        records = [run_single_trial(config, dataset, i) for i in indices]
    else:
        chunk = max(1, config.trials // (jobs * 4))
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(config, dataset)
        ) as pool:
            records = list(pool.map(_worker_trial, indices, chunksize=chunk))
    counts: dict[int, list[int]] = {}
    passed_total = 0
    for rec in records:
        bucket = counts.setdefault(rec.iterations, [0, 0])
        bucket[0] += 1
        if rec.success:
            bucket[1] += 1
            passed_total += 1
    buckets = tuple(
        BucketRow(iterations=it, total=c[0], passed=c[1]) for it, c in sorted(counts.items())
    )
    return AggregateReport(
        config=config,
        buckets=buckets,
        total_all=config.trials,
        total_passed=passed_total,
        trials=tuple(records) if keep_trials else None,
    )


def render_table(report: AggregateReport) -> str:
    """Human-readable success table, one row per iteration bucket."""
    lines = [f"regime: {report.config.regime}", "Iter.  All  Passed  Passed rate"]
    for b in report.buckets:
        lines.append(f"{b.iterations:>5}  {b.total:>4}  {b.passed:>6}  {100 * b.rate:10.1f}%")
    lines.append(
        f"Total  {report.total_all:>4}  {report.total_passed:>6}  {100 * report.total_rate:10.1f}%"
    )
    return "\n".join(lines)


def emit_report(report: AggregateReport, path, fmt: str = "json") -> Path:
    """Write the machine-readable report (JSON or CSV) to ``path``."""
    path = Path(path)
    try:
        if fmt == "json":
            text = json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
        elif fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["iter", "all", "passed", "rate"])
            for b in report.buckets:
                writer.writerow([b.iterations, b.total, b.passed, repr(b.rate)])
            writer.writerow(["Total", report.total_all, report.total_passed, repr(report.total_rate)])
            text = buf.getvalue()
        else:
            raise ValueError(f"unknown report format {fmt!r}")
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def emit_reconstructions(
    trials, dataset: Dataset, width: int, height: int, out_dir
) -> list[Path]:
    """Write byte-identical original/recovered PGM pairs for exact recoveries."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for t, rec in enumerate(trials):
        for sample_idx, values in rec.recovered_samples:
            if any(not 0 <= v <= 255 for v in values):
                raise RuntimeError(
                    f"trial {t}: recovered sample {sample_idx} has values outside [0, 255]"
                )
            if tuple(values) != dataset.values[sample_idx]:
                raise RuntimeError(
                    f"trial {t}: recovered sample {sample_idx} disagrees with the dataset"
                )
            stem = f"trial{t:05d}_sample{sample_idx:04d}"
            orig = out_dir / f"{stem}_original.pgm"
            reco = out_dir / f"{stem}_recovered.pgm"
            write_pgm(orig, width, height, dataset.values[sample_idx])
            write_pgm(reco, width, height, values)
            written.extend([orig, reco])
    return written
