import random

import pytest

from rankwalk.graph import DirectedGraph, NodeProfile


def make_profiles(graph, language="de", follower_counts=None, languages=None,
                  protected=(), friends_order=None):
    """Closed-world profiles for a graph: follower_count = in-degree unless
    overridden, friends in descending-id order unless given explicitly."""
    profiles = {}
    for node in graph.nodes:
        if friends_order and node in friends_order:
            friends = list(friends_order[node])
        else:
            friends = sorted(graph.successors(node), reverse=True)
        followers = graph.in_degree(node)
        if follower_counts and node in follower_counts:
            followers = follower_counts[node]
        profiles[node] = NodeProfile(
            node=node,
            follower_count=followers,
            friends_recent_first=friends,
            language=(languages or {}).get(node, language),
            protected=node in protected,
            created_at=0.0,
            status_count=0,
        )
    return profiles


def random_digraph(n, p, seed, allow_isolated=True):
    rng = random.Random(seed)
    g = DirectedGraph()
    for node in range(n):
        g.add_node(node)
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                g.add_edge(i, j)
    if not allow_isolated:
        for node in range(n):
            if g.total_degree(node) == 0 and n > 1:
                g.add_edge(node, (node + 1) % n)
    return g


@pytest.fixture
def triangle():
    return DirectedGraph.from_edges([(0, 1), (1, 2), (2, 0)])
