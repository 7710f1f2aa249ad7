"""Exact Fisher information and Cramér-Rao bounds.

The information matrix for (w, sigma) is block diagonal: weights of
different children never couple, weights never couple with noise
scales, and each noise scale contributes (2 N_j - 3) / sigma_j^2 on the
diagonal.  Under a mixed design the weight blocks combine each
condition's post-intervention covariance with the spread of the
condition means around their per-node average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import chol_inverse, chol_logdet, spd_cholesky
from .errors import InsufficientReplication, SingularInformation
from .graph import param_labels, parent_lists
from .model import GbnParams, mutilate
from .sampler import DesignSpec


@dataclass(frozen=True)
class FisherMatrix:
    """Information matrix over the canonical parameter list."""

    params_order: tuple[str, ...]
    info: np.ndarray


@dataclass(frozen=True)
class CramerRaoBound:
    """Inverse information matrix and the per-parameter sd floor."""

    cov: np.ndarray
    sd: np.ndarray


@dataclass(frozen=True)
class CenteredMoments:
    """Moments of per-node centered rows under a design.

    Stored compactly as each condition's post-intervention moments plus
    membership: mean_vec(c, j) and cov_mat(c, j) expand to the mean and
    covariance of a centered row from condition c at node j.
    """

    mus: np.ndarray        # (C, p) per-condition means
    covs: np.ndarray       # (C, p, p) per-condition covariances
    reps: np.ndarray       # (C,)
    member: np.ndarray     # (C, p) bool: condition c informs node j
    n_j: np.ndarray        # (p,)

    def mean_vec(self, c: int, j: int) -> np.ndarray:
        """m^{c,j}: condition-c mean minus the node-j weighted average."""
        j0 = j - 1
        if not self.member[c, j0]:
            raise ValueError(f"condition {c} clamps node {j}")
        avg = (self.reps[self.member[:, j0]]
               @ self.mus[self.member[:, j0]]) / self.n_j[j0]
        return self.mus[c] - avg

    def cov_mat(self, c: int, j: int) -> np.ndarray:
        """S^{c,j}: covariance of a centered row from condition c."""
        j0 = j - 1
        if not self.member[c, j0]:
            raise ValueError(f"condition {c} clamps node {j}")
        n = self.n_j[j0]
        mask = self.member[:, j0]
        total = np.einsum("c,cab->ab", self.reps[mask].astype(float),
                          self.covs[mask])
        own = self.covs[c]
        return ((n - 1) ** 2 / n ** 2) * own + (total - own) / n ** 2


def centered_moments(params: GbnParams, design: DesignSpec) -> CenteredMoments:
    """Post-intervention moments of every design condition plus node
    membership bookkeeping."""
    p = params.dag.p
    conds = design.conditions
    mus = np.zeros((len(conds), p))
    covs = np.zeros((len(conds), p, p))
    reps = np.zeros(len(conds), dtype=np.int64)
    member = np.zeros((len(conds), p), dtype=bool)
    for c, (target, r) in enumerate(conds):
        mm = mutilate(params, target)
        mus[c] = mm.mean
        covs[c] = mm.cov
        reps[c] = r
        for j in range(1, p + 1):
            member[c, j - 1] = j not in target
    n_j = reps @ member
    return CenteredMoments(mus=mus, covs=covs, reps=reps, member=member,
                           n_j=n_j)


def fisher_observational(params: GbnParams, n: int) -> FisherMatrix:
    """Information matrix for n observational rows.

    Weight entries for edges (i, j) and (i', j) equal
    (n - 1) Sigma_{i,i'} / sigma_j^2; noise entries (2n - 3) / sigma_j^2.
    """
    n = int(n)
    if n < 2:
        raise InsufficientReplication(node=None, n_rows=n)
    from .model import joint_distribution
    cov = joint_distribution(params).cov
    dag = params.dag
    labels = param_labels(dag)
    e = dag.n_edges
    info = np.zeros((e + dag.p, e + dag.p))
    plists = parent_lists(dag)
    pos = {edge: q for q, edge in enumerate(dag.edges)}
    for j0, pa0 in enumerate(plists):
        s2 = params.sigma[j0] ** 2
        for i0 in pa0:
            qa = pos[(i0 + 1, j0 + 1)]
            for i1 in pa0:
                info[qa, pos[(i1 + 1, j0 + 1)]] = (n - 1) * cov[i0, i1] / s2
        info[e + j0, e + j0] = (2 * n - 3) / s2
    return FisherMatrix(params_order=labels, info=info)


def fisher_intervention(params: GbnParams, design: DesignSpec) -> FisherMatrix:
    """Information matrix under a mixed observational/intervention design.

    For edges (i, j), (i', j) sharing child j with N_j >= 2 informative
    rows the entry is

        [ (N_j - 1)/N_j * sum_c reps_c Sigma_c[i,i']
          + sum_c reps_c m^{c,j}_i m^{c,j}_{i'} ] / sigma_j^2

    with the sums over conditions not clamping j and m^{c,j} the offset
    of condition c's mean from the node-j average.  Nodes with N_j = 0
    receive exactly zero rows and columns (nothing informs them); a node
    with N_j = 1 raises, since its profiled information term is
    undefined.
    """
    if not design.conditions:
        raise ValueError("design has no conditions")
    dag = params.dag
    cm = centered_moments(params, design)
    labels = param_labels(dag)
    e = dag.n_edges
    info = np.zeros((e + dag.p, e + dag.p))
    plists = parent_lists(dag)
    pos = {edge: q for q, edge in enumerate(dag.edges)}

    for j0 in range(dag.p):
        n = int(cm.n_j[j0])
        if n == 0:
            continue
        if n == 1:
            raise InsufficientReplication(j0 + 1, n)
        s2 = params.sigma[j0] ** 2
        info[e + j0, e + j0] = (2 * n - 3) / s2
        pa0 = list(plists[j0])
        if not pa0:
            continue
        mask = cm.member[:, j0]
        r = cm.reps[mask].astype(float)
        cov_sum = np.einsum("c,cab->ab", r, cm.covs[mask][:, pa0][:, :, pa0])
        mu_pa = cm.mus[mask][:, pa0]
        avg = r @ mu_pa / n
        offsets = mu_pa - avg
        mean_term = (offsets * r[:, None]).T @ offsets
        block = ((n - 1) / n * cov_sum + mean_term) / s2
        for a_loc, i0 in enumerate(pa0):
            qa = pos[(i0 + 1, j0 + 1)]
            for b_loc, i1 in enumerate(pa0):
                info[qa, pos[(i1 + 1, j0 + 1)]] = block[a_loc, b_loc]
    return FisherMatrix(params_order=labels, info=info)


def cramer_rao(fisher: FisherMatrix) -> CramerRaoBound:
    """Invert the information matrix; the sd vector is the square root
    of its diagonal, the floor on any unbiased estimator's spread."""
    c = spd_cholesky(fisher.info)
    if c is None:
        raise SingularInformation(
            "information matrix is singular; the design leaves some "
            "parameter uninformed")
    cov = chol_inverse(c)
    return CramerRaoBound(cov=cov, sd=np.sqrt(np.diag(cov)))


def design_score(params: GbnParams, design: DesignSpec,
                 criterion: str) -> float:
    """Scalar quality of a design: 'd-opt' is the log-determinant of the
    information matrix, 'a-opt' the negated trace of its inverse.
    Larger is better for both."""
    if criterion not in ("d-opt", "a-opt"):
        raise ValueError(f"unknown criterion {criterion!r}; "
                         "use 'd-opt' or 'a-opt'")
    fm = fisher_intervention(params, design)
    if criterion == "d-opt":
        c = spd_cholesky(fm.info)
        if c is None:
            raise SingularInformation(
                "information matrix is singular; d-optimality is -inf")
        return chol_logdet(c)
    return -float(np.trace(cramer_rao(fm).cov))
