"""Model parameters and exact Gaussian algebra.

A model over a DAG assigns each node an intercept, a noise standard
deviation and one weight per incoming edge.  Stacking the weights into a
matrix W (which is strictly upper triangular once nodes are taken in
topological order) gives the joint distribution in closed form through
the path matrix L = (I - W)^-1, and interventions amount to severing
the clamped nodes' incoming edges and silencing their noise.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import IndexOutOfRange, NonPositiveSigma, NotTriangularError
from .graph import DagStructure, parent_lists

TRIANGULAR_ATOL = 1e-14


class InterventionTarget:
    """A set of clamped nodes with their forced values.

    Empty means purely observational.  Instances are immutable, hashable
    and compare by content.
    """

    __slots__ = ("_items",)

    def __init__(self, targets=()):
        pairs = targets.items() if isinstance(targets, Mapping) else list(targets)
        cleaned = {}
        for node, value in pairs:
            node = int(node)
            if node < 1:
                raise IndexOutOfRange(f"clamped node {node} must be >= 1")
            if node in cleaned:
                raise ValueError(f"node {node} clamped twice in one target")
            cleaned[node] = float(value)
        object.__setattr__(self, "_items", tuple(sorted(cleaned.items())))

    @property
    def targets(self) -> dict[int, float]:
        return dict(self._items)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self._items)

    @property
    def is_observational(self) -> bool:
        return not self._items

    def value(self, node: int) -> float:
        for n, v in self._items:
            if n == node:
                return v
        raise KeyError(node)

    def __len__(self):
        return len(self._items)

    def __contains__(self, node):
        return any(n == node for n, _ in self._items)

    def __eq__(self, other):
        return isinstance(other, InterventionTarget) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        if not self._items:
            return "InterventionTarget()"
        inner = ", ".join(f"{n}: {v}" for n, v in self._items)
        return f"InterventionTarget({{{inner}}})"

    def __setattr__(self, *_):
        raise AttributeError("InterventionTarget is immutable")


def _frozen_array(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if shape is not None and arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GbnParams:
    """Parameters of a linear Gaussian DAG model: intercepts m, noise
    standard deviations sigma, and one weight per edge."""

    dag: DagStructure
    m: np.ndarray
    sigma: np.ndarray
    w: dict[tuple[int, int], float]

    def __post_init__(self):
        p = self.dag.p
        object.__setattr__(self, "m", _frozen_array(self.m, (p,)))
        sigma = _frozen_array(self.sigma, (p,))
        if np.any(sigma <= 0):
            bad = int(np.argmax(sigma <= 0)) + 1
            raise NonPositiveSigma(f"sigma[{bad}] = {sigma[bad - 1]} must be > 0")
        object.__setattr__(self, "sigma", sigma)
        w = {(int(i), int(j)): float(v) for (i, j), v in dict(self.w).items()}
        if set(w) != set(self.dag.edges):
            missing = set(self.dag.edges) - set(w)
            extra = set(w) - set(self.dag.edges)
            raise ValueError(f"weight keys must match the edge set exactly; "
                             f"missing {sorted(missing)}, extra {sorted(extra)}")
        object.__setattr__(self, "w", w)

    def weight_vector(self) -> np.ndarray:
        """Edge weights in canonical (child, parent) order."""
        return np.array([self.w[e] for e in self.dag.edges])


@dataclass(frozen=True)
class JointGaussian:
    """Mean vector and covariance of the joint distribution."""

    mu: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mu = _frozen_array(self.mu)
        cov = _frozen_array(self.cov)
        if cov.shape != (mu.size, mu.size):
            raise ValueError("cov shape does not match mu")
        if np.max(np.abs(cov - cov.T), initial=0.0) > 1e-12:
            raise ValueError("cov is not symmetric")
        if mu.size and np.linalg.eigvalsh(cov).min() < -1e-10:
            raise ValueError("cov is not positive semidefinite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class MutilatedModel:
    """A model after clamping the nodes of an intervention target.

    weights is W with the clamped nodes' incoming columns zeroed, paths
    its accumulated influence matrix, noise_mask the 0/1 vector that
    silences clamped noise, and inputs the vector holding clamped values
    at clamped nodes and intercepts elsewhere.  mean/cov are the joint
    moments; clamped rows and columns of cov are exactly zero.
    """

    base: GbnParams
    target: InterventionTarget
    weights: np.ndarray = field(repr=False)
    paths: np.ndarray = field(repr=False)
    noise_mask: np.ndarray = field(repr=False)
    inputs: np.ndarray = field(repr=False)
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        for name in ("weights", "paths", "noise_mask", "inputs", "mean", "cov"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))


def weight_matrix(params: GbnParams) -> np.ndarray:
    """Dense weight matrix: W[i-1, j-1] = w(i, j) on edges, 0 elsewhere."""
    p = params.dag.p
    w = np.zeros((p, p))
    for (i, j), v in params.w.items():
        w[i - 1, j - 1] = v
    return w


def path_matrix(w_matrix: np.ndarray, order=None) -> np.ndarray:
    """Accumulated influence matrix L solving (I - W) L = I.

    Computed by back-substitution on the triangular system, never by
    general inversion.  ``order`` gives each node's topological position
    (1-based, identity when omitted); the input must be strictly upper
    triangular once rows and columns are permuted to that order.
    """
    w = np.asarray(w_matrix, dtype=float)
    p = w.shape[0]
    if w.shape != (p, p):
        raise ValueError("weight matrix must be square")
    if order is None:
        perm = np.arange(p)
    else:
        perm = np.argsort(np.asarray(order))  # perm[pos] = 0-based label
    wp = w[np.ix_(perm, perm)]
    low = np.tril(wp)
    if np.max(np.abs(low), initial=0.0) > TRIANGULAR_ATOL:
        r, c = np.unravel_index(np.argmax(np.abs(low)), low.shape)
        raise NotTriangularError(
            f"entry ({perm[r] + 1}, {perm[c] + 1}) = {w[perm[r], perm[c]]} is on or "
            "below the diagonal in topological order")
    lp = solve_triangular(np.eye(p) - wp, np.eye(p), lower=False,
                          unit_diagonal=True)
    out = np.empty_like(lp)
    out[np.ix_(perm, perm)] = lp
    return out


def _moments(nu, sigma, paths, noise_mask):
    mu = nu @ paths
    cov = (paths.T * (sigma ** 2 * noise_mask)) @ paths
    return mu, cov


def joint_distribution(params: GbnParams) -> JointGaussian:
    """Joint moments: mu = m L and cov = L^T diag(sigma^2) L."""
    paths = path_matrix(weight_matrix(params), params.dag.order)
    mu, cov = _moments(params.m, params.sigma, paths,
                       np.ones(params.dag.p))
    return JointGaussian(mu=mu, cov=cov)


def mutilate(params: GbnParams, target: InterventionTarget) -> MutilatedModel:
    """Apply an intervention: sever clamped nodes' incoming edges, make
    them deterministic, and recompute the joint moments."""
    p = params.dag.p
    for node in target.nodes:
        if not (1 <= node <= p):
            raise IndexOutOfRange(f"clamped node {node} out of range for p={p}")

    w = weight_matrix(params)
    noise_mask = np.ones(p)
    nu = np.array(params.m, dtype=float)
    for node, value in target.targets.items():
        w[:, node - 1] = 0.0
        noise_mask[node - 1] = 0.0
        nu[node - 1] = value

    paths = path_matrix(w, params.dag.order)
    mu, cov = _moments(nu, params.sigma, paths, noise_mask)
    return MutilatedModel(base=params, target=target, weights=w, paths=paths,
                          noise_mask=noise_mask, inputs=nu, mean=mu, cov=cov)


def packed_parents(params: GbnParams):
    """CSR-style parent layout plus weights, for the sampling kernel."""
    plists = parent_lists(params.dag)
    ptr = np.zeros(params.dag.p + 1, dtype=np.int64)
    idx = []
    wvals = []
    for j0, pa in enumerate(plists):
        ptr[j0 + 1] = ptr[j0] + len(pa)
        for i0 in pa:
            idx.append(i0)
            wvals.append(params.w[(i0 + 1, j0 + 1)])
    return ptr, np.array(idx, dtype=np.int64), np.array(wvals, dtype=float)
