"""Connected components of a GraphWindow and Monte-Carlo connectivity of {0, X}."""

import logging
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from chowla.graph.profinite import ProfiniteSample, draw_sample
from chowla.graph.window import GraphWindow, build_graph
from chowla.sieve.oracle import is_prime
from chowla.workers import map_ordered

logger = logging.getLogger(__name__)


class UnionFind:
    """Disjoint sets over 0..size-1 with union by size and path halving."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass
class PathResult:
    status: str  # found | disconnected | absent
    path: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == "found"

    @property
    def length(self) -> int | None:
        return len(self.path) - 1 if self.path else None

    @property
    def max_abs(self) -> int | None:
        return max(abs(v) for v in self.path) if self.path else None

    def to_dict(self) -> dict:
        return {"status": self.status, "path": self.path, "length": self.length, "max_abs": self.max_abs}


class ComponentLabeling:
    def __init__(self, graph: GraphWindow):
        self.graph = graph
        self._uf = UnionFind(graph.mask.size)
        lo = graph.lo
        for a, b, _ in graph.edges.tolist():
            self._uf.union(a - lo, b - lo)
        self._roots = [self._uf.find(i) for i in np.flatnonzero(graph.mask).tolist()]

    @property
    def count(self) -> int:
        return len(set(self._roots))

    def component_of(self, a: int) -> int | None:
        if not self.graph.is_vertex(a):
            return None
        return self._uf.find(a - self.graph.lo)

    def connected(self, a: int, b: int) -> bool | None:
        """None when a or b is not a vertex, otherwise whether they share a component."""
        ca, cb = self.component_of(a), self.component_of(b)
        if ca is None or cb is None:
            return None
        return ca == cb

    def sizes(self) -> list[int]:
        return sorted(Counter(self._roots).values(), reverse=True)

    def size_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.sizes()).items()))

    def path(self, a: int, b: int) -> PathResult:
        """Shortest path from a to b by breadth-first search."""
        connected = self.connected(a, b)
        if connected is None:
            return PathResult("absent")
        if not connected:
            return PathResult("disconnected")
        prev: dict[int, int | None] = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for y, _ in self.graph.neighbours(x):
                if y not in prev:
                    prev[y] = x
                    queue.append(y)
        path = [b]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        return PathResult("found", path[::-1])


def components(graph: GraphWindow) -> ComponentLabeling:
    return ComponentLabeling(graph)


def validate_path(sample: ProfiniteSample, path: list[int]) -> bool:
    """Re-check a path against the sample: vertices, odd prime gaps and divisibility."""
    if not path or not all(sample.is_vertex(v) for v in path):
        return False
    for x, y in zip(path, path[1:]):
        q = abs(y - x)
        if q % 2 == 0 or not is_prime(q) or q > sample.P:
            return False
        if not sample.divides(q, min(x, y)):
            return False
    return True


@dataclass
class ConnectivityReport:
    X: int
    w: int
    mode: str
    seed: int
    records: list[dict]

    @property
    def conditioned(self) -> int:
        return sum(1 for r in self.records if r["connected"] is not None)

    @property
    def connected(self) -> int:
        return sum(1 for r in self.records if r["connected"])

    @property
    def fraction(self) -> float | None:
        return self.connected / self.conditioned if self.conditioned else None

    def to_dict(self) -> dict:
        return {
            "X": self.X,
            "w": self.w,
            "mode": self.mode,
            "seed": self.seed,
            "trials": len(self.records),
            "conditioned": self.conditioned,
            "connected": self.connected,
            "fraction": self.fraction,
        }


def connectivity_trial(
    X: int,
    w: int,
    seed: int,
    trial: int,
    *,
    mode: str = "profinite",
    base: int | None = None,
    P: int | None = None,
) -> dict:
    sample = draw_sample(mode, P or max(2 * X, w, 2), w, seed, trial, base=base)
    graph = build_graph(sample, (0, 2 * X))
    labels = components(graph)
    route = labels.path(0, X)
    sizes = labels.sizes()
    return {
        "trial": trial,
        "n0": sample.n0,
        "vertices": graph.vertex_count,
        "edges": graph.edge_count,
        "components": labels.count,
        "largest": sizes[0] if sizes else 0,
        "size_histogram": labels.size_histogram(),
        "connected": labels.connected(0, X),
        "path_length": route.length,
        "max_abs": route.max_abs,
    }


def connectivity_trials(
    X: int,
    w: int = 50,
    trials: int = 1000,
    seed: int = 0,
    *,
    mode: str = "profinite",
    base: int | None = None,
    P: int | None = None,
    workers: int = 1,
) -> ConnectivityReport:
    """Fraction of samples in which 0 and X are connected inside [0, 2X], given both are vertices."""
    records = map_ordered(
        lambda t: connectivity_trial(X, w, seed, t, mode=mode, base=base, P=P), range(trials), workers
    )
    report = ConnectivityReport(X, w, mode, seed, records)
    logger.info(
        "Connectivity X=%d w=%d: %d/%d conditioned samples connected",
        X, w, report.connected, report.conditioned,
    )
    return report
