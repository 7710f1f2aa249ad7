"""Synthetic data generation under an intervention design.

Rows are generated ancestrally in topological order with a counter-based
Philox generator, so a (params, design, seed) triple always yields the
same dataset.  The generator and normal-draw method identifiers are
exported for inclusion in file metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import IndexOutOfRange
from .graph import topological_nodes
from .model import GbnParams, InterventionTarget, packed_parents

RNG_ALGORITHM = "numpy-philox4x64"
NORMAL_METHOD = "ziggurat"


@dataclass(frozen=True)
class DesignSpec:
    """Ordered list of (intervention target, repetition count) conditions."""

    conditions: tuple[tuple[InterventionTarget, int], ...]

    def __post_init__(self):
        normalized = []
        for target, reps in self.conditions:
            if not isinstance(target, InterventionTarget):
                target = InterventionTarget(target)
            reps = int(reps)
            if reps < 1:
                raise ValueError(f"condition repetitions must be >= 1, got {reps}")
            normalized.append((target, reps))
        object.__setattr__(self, "conditions", tuple(normalized))

    @classmethod
    def observational(cls, n: int) -> "DesignSpec":
        return cls(((InterventionTarget(), int(n)),))

    @property
    def n_total(self) -> int:
        return sum(reps for _, reps in self.conditions)

    def node_counts(self, p: int) -> np.ndarray:
        """Number of rows in which each node is left unclamped."""
        counts = np.zeros(p, dtype=np.int64)
        for target, reps in self.conditions:
            for j in range(1, p + 1):
                if j not in target:
                    counts[j - 1] += reps
        return counts

    def row_targets(self) -> tuple[InterventionTarget, ...]:
        rows = []
        for target, reps in self.conditions:
            rows.extend([target] * reps)
        return tuple(rows)


@dataclass(frozen=True)
class Dataset:
    """N rows of p values, each annotated with its intervention target.

    Clamped entries hold their declared value exactly; construction
    enforces this.
    """

    x: np.ndarray
    targets: tuple[InterventionTarget, ...]

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 2:
            raise ValueError("x must be a 2-d array")
        targets = tuple(self.targets)
        if len(targets) != x.shape[0]:
            raise ValueError("one target annotation per row is required")
        for k, target in enumerate(targets):
            for node, value in target.targets.items():
                if not (1 <= node <= x.shape[1]):
                    raise IndexOutOfRange(
                        f"row {k + 1} clamps node {node}, but p={x.shape[1]}")
                if x[k, node - 1] != value:
                    raise ValueError(
                        f"row {k + 1}: x{node}={x[k, node - 1]!r} does not equal "
                        f"its declared clamp {value!r}")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "targets", targets)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @cached_property
    def clamp_mask(self) -> np.ndarray:
        mask = np.zeros(self.x.shape, dtype=bool)
        for k, target in enumerate(self.targets):
            for node in target.nodes:
                mask[k, node - 1] = True
        mask.flags.writeable = False
        return mask

    @property
    def is_observational(self) -> bool:
        return all(t.is_observational for t in self.targets)

    def node_counts(self) -> np.ndarray:
        """N_j: rows where node j is unclamped."""
        return (~self.clamp_mask).sum(axis=0)

    def row_sets(self) -> tuple[np.ndarray, ...]:
        """K_j: 0-based row indices where node j is unclamped, ascending."""
        free = ~self.clamp_mask
        return tuple(np.flatnonzero(free[:, j]) for j in range(self.p))


def sample(params: GbnParams, design: DesignSpec,
           seed: int | np.random.SeedSequence) -> Dataset:
    """Draw one dataset under the design, ancestrally and reproducibly.

    Clamped nodes take their target value; every other node j takes
    m_j + sum_i w_ij x_i + sigma_j z with z standard normal.
    """
    p = params.dag.p
    row_targets = design.row_targets()
    n = len(row_targets)

    cmask = np.zeros((n, p), dtype=bool)
    cval = np.zeros((n, p))
    for k, target in enumerate(row_targets):
        for node, value in target.targets.items():
            if not (1 <= node <= p):
                raise IndexOutOfRange(f"clamped node {node} out of range for p={p}")
            cmask[k, node - 1] = True
            cval[k, node - 1] = value

    ss = seed if isinstance(seed, np.random.SeedSequence) \
        else np.random.SeedSequence(int(seed))
    rng = np.random.Generator(np.random.Philox(ss))
    z = rng.standard_normal((n, p))

    topo = np.array(topological_nodes(params.dag), dtype=np.int64)
    ptr, idx, wvals = packed_parents(params)
    x = _kernels.ancestral_fill(z, topo, ptr, idx, wvals,
                                np.asarray(params.m), np.asarray(params.sigma),
                                cmask, cval)
    return Dataset(x=x, targets=row_targets)
