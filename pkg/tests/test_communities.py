import random
from collections import Counter

import pytest

from rankwalk.communities import (
    active_accounts,
    aggregate_weights,
    community_graph,
    community_sizes,
    label_propagation,
    load_assignment,
    write_assignment,
)
from rankwalk.graph import DirectedGraph


def two_cliques_with_bridge():
    g = DirectedGraph()
    for base in (0, 5):
        members = range(base, base + 5)
        for i in members:
            for j in members:
                if i < j:
                    g.add_edge(i, j)
    g.add_edge(4, 5)
    return g


def is_fixpoint(graph, labels):
    """Every node's label is the most frequent among its neighbors (tie: lowest)."""
    for node in graph.nodes:
        neighbors = graph.successors(node) | graph.predecessors(node)
        if not neighbors:
            continue
        counts = Counter(labels[v] for v in neighbors)
        best = min(counts, key=lambda lbl: (-counts[lbl], lbl))
        if labels[node] != best:
            return False
    return True


class TestLabelPropagation:
    def test_two_cliques_split_at_the_bridge(self):
        g = two_cliques_with_bridge()
        for seed in range(5):
            labels = label_propagation(g, rng_seed=seed)
            assert len(set(labels.values())) == 2
            assert len({labels[n] for n in range(5)}) == 1
            assert len({labels[n] for n in range(5, 10)}) == 1
            assert is_fixpoint(g, labels)

    def test_complete_graph_is_one_community(self):
        g = DirectedGraph()
        for i in range(6):
            for j in range(6):
                if i != j:
                    g.add_edge(i, j)
        labels = label_propagation(g, rng_seed=0)
        assert set(labels.values()) == {0}

    def test_edgeless_graph_gives_singletons(self):
        g = DirectedGraph()
        for node in range(4):
            g.add_node(node)
        labels = label_propagation(g, rng_seed=0)
        assert len(set(labels.values())) == 4

    def test_labels_renumbered_by_size(self):
        g = two_cliques_with_bridge()
        g.add_edge(20, 21)  # a 2-node appendage community
        labels = label_propagation(g, rng_seed=1)
        sizes = Counter(labels.values())
        ordered = sorted(sizes.items())
        assert ordered[0][0] == 0
        assert sorted(sizes.values(), reverse=True) == [sizes[c] for c, _ in ordered]

    def test_deterministic_under_seed(self):
        g = two_cliques_with_bridge()
        assert label_propagation(g, rng_seed=3) == label_propagation(g, rng_seed=3)

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            label_propagation(DirectedGraph())


class TestAssignmentIO:
    def test_round_trip(self, tmp_path):
        assignment = {1: 0, 2: 0, 3: 1}
        path = tmp_path / "assignment.csv"
        write_assignment(assignment, path)
        assert load_assignment(path) == assignment

    def test_valid_file_against_graph(self, tmp_path):
        g = DirectedGraph.from_edges([(1, 2), (2, 3)])
        path = tmp_path / "assignment.csv"
        path.write_text("node,community\n1,0\n2,0\n3,1\n")
        assert load_assignment(path, g) == {1: 0, 2: 0, 3: 1}

    def test_missing_node_listed(self, tmp_path):
        g = DirectedGraph.from_edges([(1, 2), (2, 3)])
        path = tmp_path / "assignment.csv"
        path.write_text("node,community\n1,0\n2,0\n")
        with pytest.raises(ValueError, match=r"misses graph nodes: \[3\]"):
            load_assignment(path, g)

    def test_unknown_node_rejected(self, tmp_path):
        g = DirectedGraph.from_edges([(1, 2)])
        path = tmp_path / "assignment.csv"
        path.write_text("node,community\n1,0\n2,0\n99,1\n")
        with pytest.raises(ValueError, match=r"unknown nodes: \[99\]"):
            load_assignment(path, g)

    def test_duplicate_node_rejected(self, tmp_path):
        path = tmp_path / "assignment.csv"
        path.write_text("node,community\n1,0\n1,1\n")
        with pytest.raises(ValueError, match="duplicate node 1"):
            load_assignment(path)


class TestCommunityGraph:
    def test_cross_edges_counted(self):
        g = DirectedGraph.from_edges([(0, 5), (1, 5), (2, 6), (5, 0)])
        assignment = {0: 0, 1: 0, 2: 0, 5: 1, 6: 1}
        meta = community_graph(g, assignment, min_size=1)
        assert meta.weights[(0, 1)] == 3
        assert meta.weights[(1, 0)] == 1

    def test_min_size_filter_can_empty_the_meta_graph(self):
        g = DirectedGraph.from_edges([(0, 5)])
        meta = community_graph(g, {0: 0, 5: 1}, min_size=10)
        assert meta.sizes == {}
        assert meta.weights == {}

    def test_min_weight_filter(self):
        g = DirectedGraph.from_edges([(0, 5), (1, 5), (5, 0)])
        assignment = {0: 0, 1: 0, 5: 1}
        meta = community_graph(g, assignment, min_size=1, min_weight=2)
        assert meta.weights == {(0, 1): 2}

    def test_matches_brute_force_pair_counting(self):
        rng = random.Random(11)
        g = DirectedGraph()
        for node in range(200):
            g.add_node(node)
        for _ in range(900):
            i, j = rng.randrange(200), rng.randrange(200)
            if i != j:
                g.add_edge(i, j)
        assignment = {n: rng.randrange(5) for n in range(200)}
        expected = Counter()
        intra_expected = 0
        for s, t in g.edges():
            if assignment[s] == assignment[t]:
                intra_expected += 1
            else:
                expected[(assignment[s], assignment[t])] += 1
        weights, intra = aggregate_weights(g, assignment)
        assert weights == dict(expected)
        assert intra == intra_expected

    def test_weight_conservation(self):
        rng = random.Random(12)
        g = DirectedGraph()
        for node in range(100):
            g.add_node(node)
        for _ in range(400):
            i, j = rng.randrange(100), rng.randrange(100)
            if i != j:
                g.add_edge(i, j)
        assignment = {n: rng.randrange(4) for n in range(100)}
        weights, intra = aggregate_weights(g, assignment)
        assert sum(weights.values()) + intra == g.num_edges()

    def test_partial_assignment_rejected(self):
        g = DirectedGraph.from_edges([(0, 1)])
        with pytest.raises(ValueError, match="misses"):
            community_graph(g, {0: 0}, min_size=1)


class TestActiveAccounts:
    def test_window_covering_everything(self):
        assignment = {1: 0, 2: 0, 3: 1}
        stamps = {1: [10.0], 2: [20.0], 3: [30.0]}
        assert active_accounts(assignment, 0.0, 100.0, stamps) == {0: 2, 1: 1}

    def test_empty_window(self):
        assignment = {1: 0, 2: 1}
        stamps = {1: [10.0], 2: [20.0]}
        assert active_accounts(assignment, 50.0, 60.0, stamps) == {}

    def test_matches_brute_force_filter(self):
        rng = random.Random(13)
        assignment = {n: rng.randrange(3) for n in range(50)}
        stamps = {n: [rng.uniform(0, 100) for _ in range(rng.randint(0, 4))] for n in range(50)}
        t0, t1 = 25.0, 75.0
        expected = Counter()
        for n, community in assignment.items():
            if any(t0 <= t <= t1 for t in stamps[n]):
                expected[community] += 1
        assert active_accounts(assignment, t0, t1, stamps) == dict(expected)

    def test_inverted_window_rejected(self):
        with pytest.raises(ValueError):
            active_accounts({1: 0}, 10.0, 5.0, {1: [7.0]})


def test_community_sizes():
    assert community_sizes({1: 0, 2: 0, 3: 1}) == {0: 2, 1: 1}
