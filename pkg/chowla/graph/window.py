"""The random graph restricted to an integer window.

Vertices are the a in [lo, hi] with n + a squarefree (w-truncated in
profinite mode). Two vertices a < b are joined when q = b - a is an odd
prime dividing n + a.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from chowla.errors import ParameterError
from chowla.graph.profinite import ProfiniteSample
from chowla.sieve.primes import primes_in

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class GraphWindow:
    lo: int
    hi: int
    mask: np.ndarray
    # (E, 3) int64 rows (a, b, q) with a < b
    edges: np.ndarray

    @property
    def vertex_count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def vertex_density(self) -> float:
        return self.vertex_count / self.mask.size if self.mask.size else 0.0

    def vertices(self) -> list[int]:
        return (np.flatnonzero(self.mask) + self.lo).tolist()

    def is_vertex(self, a: int) -> bool:
        return self.lo <= a <= self.hi and bool(self.mask[a - self.lo])

    def edge_list(self) -> list[tuple[int, int, int]]:
        return sorted((int(a), int(b), int(q)) for a, b, q in self.edges)

    @cached_property
    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """vertex -> [(neighbour, gap prime)], neighbours in increasing order."""
        adj: dict[int, list[tuple[int, int]]] = {a: [] for a in self.vertices()}
        for a, b, q in self.edge_list():
            adj[a].append((b, q))
            adj[b].append((a, q))
        for nbrs in adj.values():
            nbrs.sort()
        return adj

    def neighbours(self, a: int) -> list[tuple[int, int]]:
        return self.adjacency.get(a, [])

    def restrict(self, lo: int, hi: int) -> "GraphWindow":
        """Induced subgraph on [lo, hi], a subwindow of this one."""
        if lo < self.lo or hi > self.hi or hi < lo:
            raise ParameterError(f"[{lo}, {hi}] is not inside [{self.lo}, {self.hi}]")
        keep = (self.edges[:, 0] >= lo) & (self.edges[:, 1] <= hi)
        return GraphWindow(lo, hi, self.mask[lo - self.lo : hi - self.lo + 1].copy(), self.edges[keep])

    def summary(self) -> dict:
        return {
            "window": [self.lo, self.hi],
            "vertices": self.vertex_count,
            "edges": self.edge_count,
            "vertex_density": self.vertex_density,
        }


def build_graph(sample: ProfiniteSample, window: tuple[int, int]) -> GraphWindow:
    """Vertices and prime-gap edges of the sampled graph on [lo, hi]."""
    lo, hi = window
    if hi < lo:
        raise ParameterError(f"empty window [{lo}, {hi}]")
    diameter = hi - lo
    if sample.P < diameter:
        raise ParameterError(f"P = {sample.P} is below the window diameter {diameter}")

    mask = sample.vertex_mask(lo, hi)
    parts = []
    gaps = primes_in(3, diameter)
    for q, r in zip(gaps.tolist(), sample.residues_of(gaps).tolist() if gaps.size else []):
        # a ≡ -r (mod q), both a and a + q inside the window
        idx = np.arange((-r - lo) % q, diameter - q + 1, q, dtype=np.int64)
        idx = idx[mask[idx] & mask[idx + q]]
        if idx.size:
            a = idx + lo
            parts.append(np.column_stack([a, a + q, np.full(a.size, q, dtype=np.int64)]))
    edges = np.concatenate(parts) if parts else np.empty((0, 3), dtype=np.int64)
    graph = GraphWindow(lo, hi, mask, edges)
    logger.debug("Built graph on [%d, %d]: %d vertices, %d edges", lo, hi, graph.vertex_count, graph.edge_count)
    return graph
