"""Seeded Monte Carlo experiments: pair-count trials, block census, capacity sweeps.

Every trial draws its own generator from (master seed, trial index), so
results are independent of execution order and worker count; aggregation is
a plain mean/standard-error reduction over the per-trial records in trial
order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import structural_rank

from .channel import apply_mask, sample_bernoulli_mask
from .pairing import block_triangulate, extract_blocks, triangulate_mask
from .spectral import srbp_capacity, svd_capacity

BLOCK_CLASSES = ("single", "row_vector", "column_vector", "other")
DEFAULT_SNR_GRID_DB = tuple(float(s) for s in range(0, 31, 2))


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    delta: float | None = None
    trials: int = 10000
    snr_grid_db: tuple = DEFAULT_SNR_GRID_DB
    seed: int = 0
    schemes: tuple = ("svd", "srbp")
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        delta = 1.0 / self.n if self.delta is None else self.delta
        if not 0 < delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {delta}")
        object.__setattr__(self, "delta", float(delta))
        grid = tuple(float(s) for s in self.snr_grid_db)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr grid must be strictly increasing")
        object.__setattr__(self, "snr_grid_db", grid)
        unknown = set(self.schemes) - {"svd", "srbp"}
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        object.__setattr__(self, "schemes", tuple(self.schemes))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "trials": self.trials,
            "snr_grid_db": list(self.snr_grid_db),
            "seed": self.seed,
            "schemes": list(self.schemes),
        }


@dataclass(frozen=True)
class TrialRecord:
    index: int
    n_d: int
    n_ex_active: int
    n_residual: int
    n_bar: int
    svd_rank: int
    block_counts: tuple = (0, 0, 0, 0)
    capacities: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AggregateReport:
    """Means and standard errors over all trials, plus census and curves."""

    config: ExperimentConfig
    metrics: dict
    census: dict
    curves: tuple

    def to_json(self) -> str:
        doc = {
            "config": self.config.to_dict(),
            "per_metric": {
                name: {"mean": mean, "stderr": stderr}
                for name, (mean, stderr) in sorted(self.metrics.items())
            },
            "census": self.census,
            "curves": [dict(point) for point in self.curves],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.curves:
            fields = sorted(self.curves[0])
            writer.writerow(fields)
            for point in self.curves:
                writer.writerow([point[f] for f in fields])
        else:
            writer.writerow(["metric", "mean", "stderr"])
            for name, (mean, stderr) in sorted(self.metrics.items()):
                writer.writerow([name, mean, stderr])
            for cls in BLOCK_CLASSES:
                if cls in self.census:
                    writer.writerow(
                        [f"census_{cls}", self.census[cls]["mean_count"],
                         self.census[cls]["share_pct"]]
                    )
        return buf.getvalue()


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-style per-trial stream: derived from (seed, index) only."""
    return np.random.default_rng([seed, index])


def classify_block(n_rows: int, n_cols: int) -> str:
    if n_rows == 1 and n_cols == 1:
        return "single"
    if n_rows == 1:
        return "row_vector"
    if n_cols == 1:
        return "column_vector"
    return "other"


def _run_trial(cfg: ExperimentConfig, index: int, with_blocks: bool,
               with_capacity: bool) -> TrialRecord:
    rng = trial_rng(cfg.seed, index)
    mask = sample_bernoulli_mask(cfg.n, cfg.n, cfg.delta, rng)
    tri = triangulate_mask(mask, rng)
    rank = int(structural_rank(csr_matrix(mask.bits))) if mask.nnz else 0

    block_counts = (0, 0, 0, 0)
    capacities: dict = {}
    if with_blocks or with_capacity:
        decomp = block_triangulate(tri, mask)
        counts = dict.fromkeys(BLOCK_CLASSES, 0)
        for b in decomp.blocks:
            counts[classify_block(*b.shape)] += 1
        block_counts = tuple(counts[c] for c in BLOCK_CLASSES)
        if with_capacity:
            channel = apply_mask(mask, rng)
            blocks = extract_blocks(decomp, channel)
            for scheme in cfg.schemes:
                caps = []
                for snr_db in cfg.snr_grid_db:
                    rho = 10.0 ** (snr_db / 10.0)
                    if scheme == "svd":
                        caps.append(svd_capacity(channel, rho).capacity)
                    else:
                        caps.append(srbp_capacity(blocks, rho).capacity)
                capacities[scheme] = tuple(caps)

    return TrialRecord(
        index=index,
        n_d=tri.n_d,
        n_ex_active=tri.n_ex_active,
        n_residual=tri.n_residual,
        n_bar=tri.n_bar,
        svd_rank=rank,
        block_counts=block_counts,
        capacities=capacities,
    )


def _collect(cfg: ExperimentConfig, with_blocks: bool, with_capacity: bool):
    if cfg.workers == 1:
        return [_run_trial(cfg, t, with_blocks, with_capacity)
                for t in range(cfg.trials)]
    return Parallel(n_jobs=cfg.workers)(
        delayed(_run_trial)(cfg, t, with_blocks, with_capacity)
        for t in range(cfg.trials)
    )


def _mean_stderr(values) -> tuple:
    arr = np.asarray(values, float)
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, stderr


def _base_metrics(records) -> dict:
    metrics = {}
    for name in ("n_d", "n_ex_active", "n_residual", "n_bar", "svd_rank"):
        metrics[name] = _mean_stderr([getattr(r, name) for r in records])
    metrics["nbar_minus_nd"] = _mean_stderr([r.n_bar - r.n_d for r in records])
    return metrics


def _census(records) -> dict:
    totals = np.array([r.block_counts for r in records], float)
    grand = totals.sum()
    census = {}
    for i, cls in enumerate(BLOCK_CLASSES):
        mean, stderr = _mean_stderr(totals[:, i])
        share = 100.0 * totals[:, i].sum() / grand if grand else 0.0
        census[cls] = {"mean_count": mean, "stderr": stderr, "share_pct": share}
    return census


def run_dof_trials(cfg: ExperimentConfig) -> AggregateReport:
    """Pair count and structural rank statistics over random masks."""
    records = _collect(cfg, with_blocks=False, with_capacity=False)
    return AggregateReport(
        config=cfg, metrics=_base_metrics(records), census={}, curves=()
    )


def run_block_census(cfg: ExperimentConfig) -> AggregateReport:
    """Classify every diagonal block as single / row / column vector / other."""
    records = _collect(cfg, with_blocks=True, with_capacity=False)
    return AggregateReport(
        config=cfg, metrics=_base_metrics(records), census=_census(records),
        curves=(),
    )


def run_capacity_sweep(cfg: ExperimentConfig) -> AggregateReport:
    """Mean capacity of both transceivers on the same realizations, per SNR."""
    records = _collect(cfg, with_blocks=True, with_capacity=True)
    curves = []
    for si, snr_db in enumerate(cfg.snr_grid_db):
        point = {"snr_db": snr_db}
        for scheme in cfg.schemes:
            vals = [r.capacities[scheme][si] for r in records]
            point[f"c_{scheme}"] = float(np.mean(vals))
        if "svd" in cfg.schemes and "srbp" in cfg.schemes and point["c_svd"] > 0:
            point["ratio"] = point["c_srbp"] / point["c_svd"]
        curves.append(point)
    return AggregateReport(
        config=cfg, metrics=_base_metrics(records), census=_census(records),
        curves=tuple(curves),
    )
