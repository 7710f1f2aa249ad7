"""Exact log-likelihood and its analytic derivatives.

Each node j contributes Gaussian regression terms over K_j, the rows in
which it is not clamped; clamped coordinates are deterministic and
contribute nothing.  Profiling out the intercepts m reduces everything
to per-node centered data, which is where the first and second
derivatives with respect to (w, sigma) live.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveSigma
from .graph import parent_lists
from .model import GbnParams
from .sampler import Dataset

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class CenteredData:
    """Per-node centered rows.

    For node j, y[j] holds the rows K_j (where j is unclamped) minus the
    column means taken over those same rows; k_sets[j] gives the
    original 0-based row indices, n_j the counts, and means[j] the
    subtracted mean vector (None when K_j is empty).
    """

    y: tuple[np.ndarray, ...]
    k_sets: tuple[np.ndarray, ...]
    n_j: np.ndarray
    means: tuple[np.ndarray | None, ...]

    @property
    def p(self) -> int:
        return self.n_j.size


def center(data: Dataset) -> CenteredData:
    """Center each node's informative rows by their own column means."""
    blocks, ksets, means = [], [], []
    counts = np.zeros(data.p, dtype=np.int64)
    for j0, rows in enumerate(data.row_sets()):
        counts[j0] = rows.size
        ksets.append(rows)
        if rows.size == 0:
            blocks.append(np.zeros((0, data.p)))
            means.append(None)
            continue
        sub = data.x[rows]
        mean = sub.mean(axis=0)
        blocks.append(sub - mean)
        means.append(mean)
    return CenteredData(y=tuple(blocks), k_sets=tuple(ksets),
                        n_j=counts, means=tuple(means))


def _node_residuals(x, m_j, j0, pa0, weights):
    r = x[:, j0] - m_j
    for i0, w in zip(pa0, weights):
        r = r - w * x[:, i0]
    return r


def _loglik_observational(params: GbnParams, data: Dataset) -> float:
    n, p = data.n, data.p
    plists = parent_lists(params.dag)
    total = -0.5 * n * p * LOG_2PI - n * float(np.sum(np.log(params.sigma)))
    for j0 in range(p):
        weights = [params.w[(i0 + 1, j0 + 1)] for i0 in plists[j0]]
        r = _node_residuals(data.x, params.m[j0], j0, plists[j0], weights)
        total -= 0.5 * float(r @ r) / params.sigma[j0] ** 2
    return total


def _loglik_mixed(params: GbnParams, data: Dataset) -> float:
    plists = parent_lists(params.dag)
    rows = data.row_sets()
    total = 0.0
    for j0 in range(data.p):
        k = rows[j0]
        if k.size == 0:
            continue
        weights = [params.w[(i0 + 1, j0 + 1)] for i0 in plists[j0]]
        r = _node_residuals(data.x[k], params.m[j0], j0, plists[j0], weights)
        sigma = params.sigma[j0]
        total += (-0.5 * k.size * LOG_2PI - k.size * math.log(sigma)
                  - 0.5 * float(r @ r) / sigma ** 2)
    return total


def loglik(params: GbnParams, data: Dataset) -> float:
    """Exact log-likelihood of the data under the model, summing each
    node's regression terms over its unclamped rows only."""
    if data.p != params.dag.p:
        raise ValueError(f"dataset has p={data.p}, model has p={params.dag.p}")
    if data.is_observational:
        return _loglik_observational(params, data)
    return _loglik_mixed(params, data)


def canonical_edges(w) -> tuple[tuple[int, int], ...]:
    """Edge keys sorted by (child, parent): the parameter order used for
    every gradient, Hessian and information matrix."""
    return tuple(sorted(w, key=lambda e: (e[1], e[0])))


def _check_sigma(sigma, n_j):
    sigma = np.asarray(sigma, dtype=float)
    bad = (sigma <= 0) & (np.asarray(n_j) > 0)
    if np.any(bad):
        j = int(np.argmax(bad)) + 1
        raise NonPositiveSigma(f"sigma[{j}] = {sigma[j - 1]} must be > 0")
    return sigma


def _node_terms(w, cdata: CenteredData):
    """Yield (j0, block, n, parents0, weights, residuals) per informative node."""
    edges = canonical_edges(w)
    by_child = {}
    for i, j in edges:
        by_child.setdefault(j - 1, []).append(i - 1)
    for j0 in range(cdata.p):
        n = int(cdata.n_j[j0])
        if n == 0:
            continue
        y = cdata.y[j0]
        pa0 = by_child.get(j0, [])
        weights = [w[(i0 + 1, j0 + 1)] for i0 in pa0]
        r = y[:, j0].copy()
        for i0, wv in zip(pa0, weights):
            r -= wv * y[:, i0]
        yield j0, y, n, pa0, weights, r


def profiled_loglik(sigma, w, cdata: CenteredData) -> float:
    """Log-likelihood with the intercepts profiled out analytically."""
    sigma = _check_sigma(sigma, cdata.n_j)
    total = -0.5 * LOG_2PI * float(np.sum(cdata.n_j))
    for j0, _, n, _, _, r in _node_terms(w, cdata):
        total += -n * math.log(sigma[j0]) - 0.5 * float(r @ r) / sigma[j0] ** 2
    return total


def gradient(sigma, w, cdata: CenteredData) -> np.ndarray:
    """First derivatives of the profiled log-likelihood, in canonical
    parameter order (edge weights, then noise scales)."""
    sigma = _check_sigma(sigma, cdata.n_j)
    edges = canonical_edges(w)
    eidx = {e: q for q, e in enumerate(edges)}
    out = np.zeros(len(edges) + cdata.p)
    for j0, y, n, pa0, _, r in _node_terms(w, cdata):
        s2 = sigma[j0] ** 2
        for i0 in pa0:
            out[eidx[(i0 + 1, j0 + 1)]] = float(y[:, i0] @ r) / s2
        out[len(edges) + j0] = -n / sigma[j0] + float(r @ r) / sigma[j0] ** 3
    return out


def hessian(sigma, w, cdata: CenteredData) -> np.ndarray:
    """Second derivatives of the profiled log-likelihood.

    Parameters of different child nodes never couple, so the matrix is
    block diagonal across children, with
        d2/dw_ij dw_i'j   = -sum y_i y_i' / sigma_j^2
        d2/dw_ij dsigma_j = -2 sum y_i r / sigma_j^3
        d2/dsigma_j^2     = n_j / sigma_j^2 - 3 sum r^2 / sigma_j^4
    where r is the centered regression residual at node j.
    """
    sigma = _check_sigma(sigma, cdata.n_j)
    edges = canonical_edges(w)
    eidx = {e: q for q, e in enumerate(edges)}
    d = len(edges) + cdata.p
    out = np.zeros((d, d))
    for j0, y, n, pa0, _, r in _node_terms(w, cdata):
        s = sigma[j0]
        sj = len(edges) + j0
        for a, i0 in enumerate(pa0):
            qa = eidx[(i0 + 1, j0 + 1)]
            for i1 in pa0[a:]:
                qb = eidx[(i1 + 1, j0 + 1)]
                v = -float(y[:, i0] @ y[:, i1]) / s ** 2
                out[qa, qb] = v
                out[qb, qa] = v
            cross = -2.0 * float(y[:, i0] @ r) / s ** 3
            out[qa, sj] = cross
            out[sj, qa] = cross
        out[sj, sj] = n / s ** 2 - 3.0 * float(r @ r) / s ** 4
    return out
