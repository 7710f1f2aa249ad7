"""DAG structure with a validated topological order.

Nodes are labeled 1..p at every public boundary.  Helpers that feed
array code return 0-based positions instead; the convention throughout
the package is that files, CLI output and error messages are 1-based
while everything touching numpy is 0-based.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import CycleError, DuplicateEdgeError, IndexOutOfRange


@dataclass(frozen=True)
class DagStructure:
    """Directed acyclic graph over nodes 1..p.

    ``edges`` is stored sorted by (child, parent) so parameter vectors
    indexed by edge have a single canonical layout everywhere.
    ``order`` maps each node label to its topological position; it is
    the identity permutation whenever the labels already run
    parent < child along every edge.
    """

    p: int
    edges: tuple[tuple[int, int], ...]
    order: tuple[int, ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def parents(self, j: int) -> tuple[int, ...]:
        return parents(self, j)


def build_dag(p, edges) -> DagStructure:
    """Validate an edge set over nodes 1..p and compute its topological order.

    The order is produced by Kahn's method with smallest-label
    tie-breaking, so it is deterministic and reduces to the identity on
    edge sets that already satisfy i < j.

    Raises:
        IndexOutOfRange: an endpoint lies outside 1..p.
        DuplicateEdgeError: the same (i, j) pair appears twice.
        CycleError: no topological order exists.
    """
    p = int(p)
    if p < 1:
        raise IndexOutOfRange(f"node count must be positive, got {p}")

    seen = set()
    pairs = []
    for edge in edges:
        i, j = edge
        i, j = int(i), int(j)
        if not (1 <= i <= p) or not (1 <= j <= p):
            raise IndexOutOfRange(f"edge ({i}, {j}) out of range for p={p}")
        if i == j:
            raise CycleError(f"self-loop at node {i}")
        if (i, j) in seen:
            raise DuplicateEdgeError(f"edge ({i}, {j}) given more than once")
        seen.add((i, j))
        pairs.append((i, j))

    pairs.sort(key=lambda e: (e[1], e[0]))

    children = {n: [] for n in range(1, p + 1)}
    indegree = {n: 0 for n in range(1, p + 1)}
    for i, j in pairs:
        children[i].append(j)
        indegree[j] += 1

    heap = [n for n in range(1, p + 1) if indegree[n] == 0]
    heapq.heapify(heap)
    position = {}
    while heap:
        n = heapq.heappop(heap)
        position[n] = len(position) + 1
        for c in children[n]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(heap, c)
    if len(position) != p:
        stuck = sorted(n for n in range(1, p + 1) if n not in position)
        raise CycleError(f"edge set admits no topological order; "
                         f"cycle through nodes {stuck}")

    order = tuple(position[n] for n in range(1, p + 1))
    return DagStructure(p=p, edges=tuple(pairs), order=order)


def parents(dag: DagStructure, j: int) -> tuple[int, ...]:
    """All parents of node j, ascending (1-based)."""
    if not (1 <= j <= dag.p):
        raise IndexOutOfRange(f"node {j} out of range for p={dag.p}")
    return tuple(i for i, jj in dag.edges if jj == j)


def parent_lists(dag: DagStructure) -> tuple[tuple[int, ...], ...]:
    """Per-node parent lists in 0-based positions, ascending."""
    lists = [[] for _ in range(dag.p)]
    for i, j in dag.edges:
        lists[j - 1].append(i - 1)
    return tuple(tuple(v) for v in lists)


def topological_nodes(dag: DagStructure) -> tuple[int, ...]:
    """0-based node labels sorted so parents come before children."""
    return tuple(sorted(range(dag.p), key=lambda n: dag.order[n]))


def param_labels(dag: DagStructure) -> tuple[str, ...]:
    """Canonical parameter names: edge weights by (child, parent), then
    one noise scale per node."""
    return tuple(f"w[{i},{j}]" for i, j in dag.edges) + tuple(
        f"sigma[{j}]" for j in range(1, dag.p + 1))
