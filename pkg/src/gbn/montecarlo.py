"""Replicated-simulation harness for validating the estimators.

Each replicate draws a fresh dataset under the design from its own
spawned random stream, fits it, and contributes one estimate vector in
canonical parameter order.  Aggregation runs in replicate-index order,
so reports are identical whether replicates execute sequentially or on
a thread pool.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (AllReplicatesFailed, DegenerateSystem, ExcessiveFailures,
                     ZeroVarianceWarning)
from .graph import param_labels
from .mle import fit
from .model import GbnParams
from .sampler import DesignSpec, sample

FAILURE_FRACTION_LIMIT = 0.01


@dataclass(frozen=True)
class McReport:
    """Moments of the estimator over successful replicates."""

    reps: int
    estimator_mean: np.ndarray
    estimator_sd: np.ndarray
    estimator_cov: np.ndarray
    failures: int
    seed: int
    params_order: tuple[str, ...]


def worker_count() -> int:
    """Thread cap from GBN_THREADS, defaulting to machine parallelism."""
    env = os.environ.get("GBN_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _estimate_vector(params: GbnParams, design: DesignSpec,
                     rep_seed: np.random.SeedSequence) -> np.ndarray:
    data = sample(params, design, rep_seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroVarianceWarning)
        try:
            result = fit(params.dag, data)
        except DegenerateSystem:
            return np.full(params.dag.n_edges + params.dag.p, np.nan)
    theta = np.concatenate([
        [result.w_hat[e] for e in params.dag.edges],
        result.sigma_hat,
    ])
    return theta


def run_mc(params: GbnParams, design: DesignSpec, reps: int,
           seed: int) -> McReport:
    """Simulate and fit ``reps`` independent datasets; deterministic in
    (params, design, reps, seed).

    Replicates whose fit fails (degenerate system, or any estimate
    undefined) are counted and excluded; more than 1% of them is an
    error rather than a statistic.
    """
    reps = int(reps)
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    labels = param_labels(params.dag)
    children = np.random.SeedSequence(int(seed)).spawn(reps)

    workers = min(worker_count(), reps)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            thetas = list(pool.map(
                lambda s: _estimate_vector(params, design, s), children))
    else:
        thetas = [_estimate_vector(params, design, s) for s in children]

    stacked = np.vstack(thetas)
    good = ~np.isnan(stacked).any(axis=1)
    failures = int(reps - good.sum())
    if good.sum() == 0:
        raise AllReplicatesFailed(f"all {reps} replicates failed to fit")
    if failures > FAILURE_FRACTION_LIMIT * reps:
        raise ExcessiveFailures(
            f"{failures} of {reps} replicates failed to fit "
            f"(limit {FAILURE_FRACTION_LIMIT:.0%})")

    kept = stacked[good]
    mean = kept.mean(axis=0)
    sd = kept.std(axis=0, ddof=1)
    cov = np.cov(kept, rowvar=False, ddof=1)
    return McReport(reps=reps, estimator_mean=mean, estimator_sd=sd,
                    estimator_cov=np.atleast_2d(cov), failures=failures,
                    seed=int(seed), params_order=labels)
