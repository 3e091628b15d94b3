"""Original rank-degree sampling on undirected graphs with full knowledge.

Serves as the equivalence oracle for the API-constrained walker and as a
standalone sampling baseline: each seed walks to its highest-current-degree
neighbor, the traversed edge is removed from the working graph, and seeds are
redrawn when the walk runs out of usable neighbors.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .graph import DirectedGraph, NodeId


class UndirectedGraph:
    """Simple undirected graph used as the reference sampler's working copy."""

    def __init__(self) -> None:
        self._adj: dict[NodeId, set[NodeId]] = {}
        self._num_edges = 0

    def add_node(self, node: NodeId) -> None:
        if node not in self._adj:
            self._adj[node] = set()

    def add_edge(self, u: NodeId, v: NodeId) -> bool:
        if u == v:
            raise ValueError(f"self-loop rejected: {u}")
        self.add_node(u)
        self.add_node(v)
        if v in self._adj[u]:
            return False
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._num_edges += 1
        return True

    def remove_edge(self, u: NodeId, v: NodeId) -> None:
        self._adj[u].remove(v)
        self._adj[v].remove(u)
        self._num_edges -= 1

    def degree(self, node: NodeId) -> int:
        return len(self._adj[node])

    def neighbors(self, node: NodeId) -> set[NodeId]:
        return self._adj[node]

    @property
    def nodes(self) -> set[NodeId]:
        return set(self._adj)

    def __contains__(self, node: NodeId) -> bool:
        return node in self._adj

    def num_edges(self) -> int:
        return self._num_edges

    def num_nodes(self) -> int:
        return len(self._adj)

    def non_isolated_nodes(self) -> list[NodeId]:
        return sorted(n for n, nbrs in self._adj.items() if nbrs)

    def copy(self) -> "UndirectedGraph":
        g = UndirectedGraph()
        for node, nbrs in self._adj.items():
            g._adj[node] = set(nbrs)
        g._num_edges = self._num_edges
        return g

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple[NodeId, NodeId]], nodes: Iterable[NodeId] = ()
    ) -> "UndirectedGraph":
        g = cls()
        for node in nodes:
            g.add_node(node)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    @classmethod
    def from_directed(cls, graph: DirectedGraph) -> "UndirectedGraph":
        """Collapse a directed graph: every directed edge (and in particular each
        reciprocal pair) becomes one undirected edge."""
        g = cls()
        for node in graph.nodes:
            g.add_node(node)
        for u, v in graph.edges():
            if not (v in g._adj and u in g._adj[v]):
                g.add_edge(u, v)
        return g


@dataclass
class RankDegreeResult:
    """Sample as directed pairs plus the walk-oriented trace.

    edges holds (w, v) and (v, w) for every traversed undirected edge, in
    collection order; walked holds just the walk-oriented (w, v) selections.
    reached_target is False when the graph was exhausted before sample_size.
    """

    edges: list[tuple[NodeId, NodeId]]
    walked: list[tuple[NodeId, NodeId]]
    reached_target: bool


def rank_degree(
    graph: UndirectedGraph,
    initial_seeds: Sequence[NodeId],
    sample_size: int,
    rho: float = 1.0,
    rng_seed: int = 0,
    *,
    collapse: bool = True,
    reseed_on_leaf: bool = True,
    seed_source: Callable[[], NodeId] | None = None,
) -> RankDegreeResult:
    """Run the rank-degree process until the sample holds sample_size directed edges.

    Per seed w, the top-k neighbors by current (dynamically updated) degree are
    selected, ties broken by lowest id; rho == 1 selects the single-best-neighbor
    variant, rho < 1 the top-k variant with k = max(1, floor(rho * degree(w))).
    Selected undirected edges leave the working graph; both orientations enter
    the sample. With collapse=True walkers landing on the same node merge.

    Re-seeding triggers once every current seed has degree <= 1 (or degree 0
    with reseed_on_leaf=False) and draws uniformly from the remaining
    non-isolated nodes, either via the internal RNG or via seed_source, which
    is polled with rejection of unusable ids. Exhausting the graph before
    sample_size returns the partial sample flagged.
    """
    if sample_size < 0:
        raise ValueError("sample_size must be non-negative")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    unknown = [s for s in initial_seeds if s not in graph]
    if unknown:
        raise ValueError(f"seeds not in graph: {unknown}")

    work = graph.copy()
    rng = random.Random(rng_seed)
    threshold = 1 if reseed_on_leaf else 0
    seed_count = max(1, len(initial_seeds))

    edges: list[tuple[NodeId, NodeId]] = []
    walked: list[tuple[NodeId, NodeId]] = []
    seeds = list(initial_seeds)
    fresh = True

    def redraw() -> list[NodeId]:
        eligible = work.non_isolated_nodes()
        if not eligible:
            return []
        if seed_source is not None:
            drawn: list[NodeId] = []
            eligible_set = set(eligible)
            while len(drawn) < seed_count:
                candidate = seed_source()
                if candidate in eligible_set:
                    drawn.append(candidate)
            return drawn
        return [rng.choice(eligible) for _ in range(seed_count)]

    while len(edges) < sample_size:
        if not fresh and all(work.degree(s) <= threshold for s in seeds):
            seeds = redraw()
            fresh = True
            if not seeds:
                return RankDegreeResult(edges, walked, reached_target=False)
        new_seeds: list[NodeId] = []
        for w in seeds:
            if len(edges) >= sample_size:
                break
            neighbors = work.neighbors(w)
            if not neighbors:
                continue
            if rho >= 1.0:
                k = 1
            else:
                k = max(1, math.floor(rho * work.degree(w)))
            ranked = sorted(neighbors, key=lambda v: (-work.degree(v), v))
            for v in ranked[:k]:
                edges.append((w, v))
                edges.append((v, w))
                walked.append((w, v))
                work.remove_edge(w, v)
                new_seeds.append(v)
                if len(edges) >= sample_size:
                    break
        if collapse:
            deduped: list[NodeId] = []
            for v in new_seeds:
                if v not in deduped:
                    deduped.append(v)
            seeds = deduped
        else:
            seeds = new_seeds
        fresh = False

    return RankDegreeResult(edges, walked, reached_target=len(edges) >= sample_size)
