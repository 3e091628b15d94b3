"""Rank-degree sampling of directed follow networks under simulated API rate
limits, with sample-quality evaluation and community/keyword analysis."""

from .graph import (
    DirectedGraph,
    NodeProfile,
    PageRankResult,
    k_core,
    pagerank,
    read_edge_list,
    read_profiles,
    write_edge_list,
    write_profiles,
)
from .oracle import (
    FriendsPage,
    NotFoundError,
    ProtectedError,
    RateLimiter,
    SimulatedClock,
    SimulatedOracle,
    build_simulated_oracle,
)
from .reference import RankDegreeResult, UndirectedGraph, rank_degree
from .sampler import (
    BurnStore,
    RunStats,
    SampleGraph,
    SamplerConfig,
    SeedPool,
    WalkerState,
    run_sample,
    select_target,
    walker_step,
)

__version__ = "0.1.0"

__all__ = [
    "BurnStore",
    "DirectedGraph",
    "FriendsPage",
    "NodeProfile",
    "NotFoundError",
    "PageRankResult",
    "ProtectedError",
    "RankDegreeResult",
    "RateLimiter",
    "RunStats",
    "SampleGraph",
    "SamplerConfig",
    "SeedPool",
    "SimulatedClock",
    "SimulatedOracle",
    "UndirectedGraph",
    "WalkerState",
    "build_simulated_oracle",
    "k_core",
    "pagerank",
    "rank_degree",
    "read_edge_list",
    "read_profiles",
    "run_sample",
    "select_target",
    "walker_step",
    "write_edge_list",
    "write_profiles",
]
