"""Closed-form maximum likelihood via per-child normal equations.

Because the DAG factorizes the likelihood over children, the weight
estimates at node j solve a small linear system built from the centered
scatter of j's parents over K_j, after which the noise scale and
intercept follow in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._linalg import chol_logdet, chol_solve, spd_cholesky
from .errors import (DegenerateSystem, NotObservational, SingularScatter,
                     Unidentifiable, ZeroVarianceWarning)
from .graph import DagStructure, parent_lists
from .likelihood import LOG_2PI
from .sampler import Dataset

# A parent column whose centered sum of squares falls below accumulation
# noise for its magnitude is constant in the data, not merely small.
ZERO_VARIANCE_RTOL = 1e-12


@dataclass(frozen=True)
class ScatterMatrices:
    """Per-child normal-equation blocks over centered data.

    For child j with parents pa(j), a[j] is the matrix of centered
    cross-products among the parents and b[j] the cross-products of each
    parent with j itself, both summed over K_j.  gram_diag carries the
    centered sum of squares of each node's own column.
    """

    dag: DagStructure
    a: tuple[np.ndarray, ...]
    b: tuple[np.ndarray, ...]
    gram_diag: np.ndarray
    n_j: np.ndarray
    means: tuple[np.ndarray | None, ...]

    def system_matrix(self) -> np.ndarray:
        """The stacked weight system: block diagonal across children, in
        canonical edge order."""
        edges = self.dag.edges
        pos = {e: q for q, e in enumerate(edges)}
        plists = parent_lists(self.dag)
        out = np.zeros((len(edges), len(edges)))
        for j0, pa0 in enumerate(plists):
            for a_loc, i0 in enumerate(pa0):
                qa = pos[(i0 + 1, j0 + 1)]
                for b_loc, i1 in enumerate(pa0):
                    out[qa, pos[(i1 + 1, j0 + 1)]] = self.a[j0][a_loc, b_loc]
        return out

    def rhs(self) -> np.ndarray:
        edges = self.dag.edges
        pos = {e: q for q, e in enumerate(edges)}
        plists = parent_lists(self.dag)
        out = np.zeros(len(edges))
        for j0, pa0 in enumerate(plists):
            for a_loc, i0 in enumerate(pa0):
                out[pos[(i0 + 1, j0 + 1)]] = self.b[j0][a_loc]
        return out


@dataclass(frozen=True)
class FitResult:
    """Closed-form estimates plus identifiability bookkeeping.

    Unidentifiable entries (nodes clamped in every row) hold NaN and are
    flagged False in ``identifiability``, which is keyed by the
    canonical parameter labels plus the intercepts m[j].
    sigma_hat_corrected, present only when requested, rescales each
    variance by n_j / (n_j - 1); this is not the maximum-likelihood
    value.
    """

    m_hat: np.ndarray
    sigma_hat: np.ndarray
    w_hat: dict[tuple[int, int], float]
    loglik_at_max: float
    identifiability: dict[str, bool]
    sigma_hat_corrected: np.ndarray | None = None


def scatter_matrices(dag: DagStructure, data: Dataset) -> ScatterMatrices:
    """Build every child's normal-equation block from the dataset."""
    if data.p != dag.p:
        raise ValueError(f"dataset has p={data.p}, graph has p={dag.p}")
    plists = parent_lists(dag)
    free = ~data.clamp_mask
    a_blocks, b_blocks, means = [], [], []
    gram_diag = np.zeros(dag.p)
    n_j = np.zeros(dag.p, dtype=np.int64)
    for j0 in range(dag.p):
        cnt, mean, gram = _kernels.masked_mean_gram(data.x, free[:, j0])
        n_j[j0] = cnt
        means.append(mean if cnt else None)
        pa0 = list(plists[j0])
        a_blocks.append(gram[np.ix_(pa0, pa0)])
        b_blocks.append(gram[pa0, j0])
        gram_diag[j0] = gram[j0, j0]
    return ScatterMatrices(dag=dag, a=tuple(a_blocks), b=tuple(b_blocks),
                           gram_diag=gram_diag, n_j=n_j, means=tuple(means))


def fit(dag: DagStructure, data: Dataset, least_squares: bool = False,
        bias_correct: bool = False) -> FitResult:
    """Maximum-likelihood estimates of (m, sigma, w) for a known graph.

    Nodes clamped in every row come back as NaN with identifiability
    flags cleared.  A singular weight system raises DegenerateSystem
    unless ``least_squares`` asks for the minimum-norm solution, in
    which case the affected edges are flagged non-identified.
    """
    sm = scatter_matrices(dag, data)
    plists = parent_lists(dag)
    p = dag.p

    m_hat = np.full(p, np.nan)
    sigma_hat = np.full(p, np.nan)
    w_hat: dict[tuple[int, int], float] = {}
    flags: dict[str, bool] = {}
    loglik = 0.0

    for j0 in range(p):
        j = j0 + 1
        pa0 = list(plists[j0])
        edges_j = [(i0 + 1, j) for i0 in pa0]
        n = int(sm.n_j[j0])

        if n == 0:
            for e in edges_j:
                w_hat[e] = math.nan
                flags[f"w[{e[0]},{e[1]}]"] = False
            flags[f"m[{j}]"] = False
            flags[f"sigma[{j}]"] = False
            continue

        mean = sm.means[j0]
        solved_ok = True
        if pa0:
            a, b = sm.a[j0], sm.b[j0]
            floors = n * (ZERO_VARIANCE_RTOL * (1.0 + np.abs(mean[pa0]))) ** 2
            dead = np.diag(a) <= floors
            c = None if dead.any() else spd_cholesky(a)
            if c is None:
                bad = ([e for e, dd in zip(edges_j, dead) if dd]
                       if dead.any() else edges_j)
                if not least_squares:
                    raise DegenerateSystem(j, bad)
                keep = np.outer(~dead, ~dead)
                wj = np.linalg.lstsq(np.where(keep, a, 0.0),
                                     np.where(dead, 0.0, b), rcond=None)[0]
                solved_ok = False
            else:
                wj = chol_solve(c, b)
        else:
            wj = np.zeros(0)

        for e, v in zip(edges_j, wj):
            w_hat[e] = float(v)
            flags[f"w[{e[0]},{e[1]}]"] = solved_ok

        if n <= len(pa0) + 1:
            warnings.warn(f"node {j}: only {n} unclamped rows for "
                          f"{len(pa0) + 1} location parameters; fitted "
                          "noise scale may be zero", ZeroVarianceWarning,
                          stacklevel=2)

        ss = _kernels.masked_residual_ss(
            data.x, ~data.clamp_mask[:, j0], mean, j0,
            np.array(pa0, dtype=np.int64), np.asarray(wj, dtype=float))
        ss = max(ss, 0.0)
        sigma_hat[j0] = math.sqrt(ss / n)
        m_hat[j0] = float(mean[j0] - sum(wv * mean[i0]
                                         for i0, wv in zip(pa0, wj)))
        flags[f"m[{j}]"] = True
        flags[f"sigma[{j}]"] = solved_ok

        if sigma_hat[j0] > 0:
            loglik += (-0.5 * n * LOG_2PI - n * math.log(sigma_hat[j0])
                       - 0.5 * ss / sigma_hat[j0] ** 2)
        else:
            loglik = math.inf

    corrected = None
    if bias_correct:
        corrected = np.full(p, np.nan)
        for j0 in range(p):
            n = int(sm.n_j[j0])
            if n >= 2 and np.isfinite(sigma_hat[j0]):
                corrected[j0] = sigma_hat[j0] * math.sqrt(n / (n - 1))

    return FitResult(m_hat=m_hat, sigma_hat=sigma_hat, w_hat=w_hat,
                     loglik_at_max=loglik, identifiability=flags,
                     sigma_hat_corrected=corrected)


def profile_m(dag: DagStructure, w, data: Dataset) -> np.ndarray:
    """Intercepts maximizing the likelihood at fixed weights:
    the mean of x_j - sum_i w_ij x_i over each node's unclamped rows."""
    plists = parent_lists(dag)
    rows = data.row_sets()
    out = np.zeros(dag.p)
    for j0 in range(dag.p):
        k = rows[j0]
        if k.size == 0:
            raise Unidentifiable(j0 + 1)
        r = data.x[k, j0].copy()
        for i0 in plists[j0]:
            r -= w[(i0 + 1, j0 + 1)] * data.x[k, i0]
        out[j0] = r.mean()
    return out


def max_loglik_full(data: Dataset) -> float:
    """Maximized log-likelihood of the saturated model (every i < j edge),
    from the determinant of the full centered scatter matrix.

    Only defined for purely observational data.  The value is invariant
    under any permutation of the variable columns.
    """
    if not data.is_observational:
        raise NotObservational("max_loglik_full requires purely observational "
                               "data; some rows carry interventions")
    n, p = data.n, data.p
    y = data.x - data.x.mean(axis=0)
    scatter = y.T @ y
    scatter = (scatter + scatter.T) / 2.0
    c = spd_cholesky(scatter)
    if c is None:
        raise SingularScatter(f"full scatter matrix is singular (n={n}, p={p})")
    return (0.5 * n * p * (math.log(n) - LOG_2PI - 1.0)
            - 0.5 * n * chol_logdet(c))
