import random

import pytest

from rankwalk.graph import DirectedGraph
from rankwalk.reference import RankDegreeResult, UndirectedGraph, rank_degree


def path_graph():
    return UndirectedGraph.from_edges([(0, 1), (1, 2)])


def star_graph(leaves=4):
    return UndirectedGraph.from_edges([(0, leaf) for leaf in range(1, leaves + 1)])


class TestUndirectedGraph:
    def test_from_directed_collapses_reciprocal_pairs(self):
        d = DirectedGraph.from_edges([(0, 1), (1, 0), (1, 2)])
        u = UndirectedGraph.from_directed(d)
        assert u.num_edges() == 2
        assert u.neighbors(1) == {0, 2}

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            UndirectedGraph.from_edges([(1, 1)])


def simulate_rules(graph, initial_seeds, sample_size, rng_seed):
    """Independent step-by-step simulation of the sampling rules (k = 1,
    collapse on, re-seed when every seed is a leaf)."""
    work = {n: set(graph.neighbors(n)) for n in graph.nodes}
    rng = random.Random(rng_seed)
    seeds = list(initial_seeds)
    fresh = True
    collected = []
    while len(collected) < sample_size:
        if not fresh and all(len(work[s]) <= 1 for s in seeds):
            eligible = sorted(n for n in work if work[n])
            if not eligible:
                return collected, False
            seeds = [rng.choice(eligible) for _ in range(max(1, len(initial_seeds)))]
            fresh = True
        new_seeds = []
        for w in seeds:
            if len(collected) >= sample_size:
                break
            if not work[w]:
                continue
            v = min(work[w], key=lambda x: (-len(work[x]), x))
            collected.append((w, v))
            collected.append((v, w))
            work[w].remove(v)
            work[v].remove(w)
            new_seeds.append(v)
        deduped = []
        for v in new_seeds:
            if v not in deduped:
                deduped.append(v)
        seeds = deduped
        fresh = False
    return collected, True


class TestRankDegree:
    def test_path_forced_walk(self):
        result = rank_degree(path_graph(), [0], 4, rng_seed=0)
        assert set(result.edges) == {(0, 1), (1, 0), (1, 2), (2, 1)}
        assert result.reached_target
        assert result.walked[0] == (0, 1)

    def test_star_matches_direct_rule_simulation(self):
        for seed in range(5):
            graph = star_graph(4)
            result = rank_degree(graph, [1], 8, rng_seed=seed)
            expected, reached = simulate_rules(graph, [1], 8, seed)
            assert result.edges == expected
            assert result.reached_target == reached
            assert result.walked[0] == (1, 0)  # the hub is the only neighbor

    def test_random_graphs_match_direct_rule_simulation(self):
        for seed in range(20):
            rng = random.Random(seed)
            n = rng.randint(5, 40)
            edges = [
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < 0.15
            ]
            if not edges:
                continue
            graph = UndirectedGraph.from_edges(edges, nodes=range(n))
            target = min(2 * len(edges), rng.randrange(2, 2 * len(edges) + 2))
            seeds = [rng.choice(sorted(graph.nodes))]
            result = rank_degree(graph, seeds, target, rng_seed=seed)
            expected, reached = simulate_rules(graph, seeds, target, seed)
            assert result.edges == expected
            assert result.reached_target == reached

    def test_rho_one_selects_single_neighbor_per_step(self):
        # hub degree 4, but rho = 1 is the single-best-neighbor variant
        result = rank_degree(star_graph(4), [0], 2, rho=1.0, rng_seed=0)
        assert len(result.walked) == 1
        assert result.walked[0] == (0, 1)

    def test_rho_variant_selects_top_k(self):
        # k = max(1, floor(0.5 * 4)) = 2 neighbors of the hub in one step
        result = rank_degree(star_graph(4), [0], 4, rho=0.5, rng_seed=0)
        assert result.walked == [(0, 1), (0, 2)]

    def test_sample_edges_come_in_symmetric_pairs(self):
        rng = random.Random(3)
        edges = [(i, j) for i in range(20) for j in range(i + 1, 20) if rng.random() < 0.2]
        graph = UndirectedGraph.from_edges(edges)
        result = rank_degree(graph, [edges[0][0]], 30, rng_seed=1)
        for i in range(0, len(result.edges) - 1, 2):
            w, v = result.edges[i]
            assert result.edges[i + 1] == (v, w)

    def test_exhaustion_returns_partial_flagged(self):
        result = rank_degree(path_graph(), [0], 100, rng_seed=0)
        assert not result.reached_target
        assert len(result.edges) == 4  # both path edges, both orientations

    def test_unknown_seed_rejected(self):
        with pytest.raises(ValueError, match="seeds not in graph"):
            rank_degree(path_graph(), [99], 2)

    def test_collapse_merges_walkers(self):
        # two seeds walking into the same hub collapse into one walker
        graph = star_graph(4)
        merged = rank_degree(graph, [1, 2], 8, rng_seed=5, collapse=True)
        independent = rank_degree(graph, [1, 2], 8, rng_seed=5, collapse=False)
        assert merged.walked[:2] == [(1, 0), (2, 0)]
        assert independent.walked[:2] == [(1, 0), (2, 0)]
        # after the first round both walkers sit on the hub: collapsed keeps one
        assert merged.walked[2][0] == 0
        assert independent.walked[2][0] == 0 and independent.walked[3][0] == 0

    def test_seed_source_rejection_draws(self):
        # seed_source ids outside the working graph are skipped, not walked
        graph = path_graph()
        draws = iter([0, 0, 1, 2, 2, 2, 1])
        result = rank_degree(
            graph, [0], 4, rng_seed=0, reseed_on_leaf=False, seed_source=lambda: next(draws)
        )
        assert result.reached_target
        assert len(result.edges) == 4
