"""Simulated follow-network API: per-key, per-endpoint sliding-window rate
budgets driven by a simulated clock, serving a fixed ground-truth snapshot."""

from __future__ import annotations

import json
import math
import threading
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graph import DirectedGraph, NodeId, NodeProfile


class NotFoundError(LookupError):
    """Queried account id does not exist in the snapshot."""


class ProtectedError(PermissionError):
    """Friends of a protected account were requested."""


class SimulatedClock:
    """Monotone simulated time in seconds. Never reads wall-clock time."""

    def __init__(self, start: float = 0.0) -> None:
        self._now = float(start)

    @property
    def now(self) -> float:
        return self._now

    def advance(self, seconds: float) -> float:
        if seconds < 0:
            raise ValueError("cannot advance the clock backwards")
        self._now += seconds
        return self._now

    def advance_to(self, timestamp: float) -> float:
        if timestamp > self._now:
            self._now = timestamp
        return self._now


@dataclass(frozen=True)
class FriendsPage:
    """One friends-endpoint response: a recency-ordered prefix of the friend list."""

    friends: tuple[NodeId, ...]
    truncated: bool


@dataclass(frozen=True)
class CallRecord:
    t: float
    key: int | None
    endpoint: str
    nodes: tuple[NodeId, ...]
    calls_remaining: int | None


class RateLimiter:
    """Sliding-window budget over a pool of API keys.

    Invariant: at any simulated instant t, each key holds at most
    calls_per_window charges with timestamps in (t - window_seconds, t].
    Not internally locked; the oracle serialises access.
    """

    def __init__(self, calls_per_window: int, window_seconds: float, key_count: int = 1) -> None:
        if calls_per_window < 1 or key_count < 1 or window_seconds <= 0:
            raise ValueError("invalid rate budget parameters")
        self.calls_per_window = calls_per_window
        self.window_seconds = float(window_seconds)
        self.key_count = key_count
        self._charges: list[deque[float]] = [deque() for _ in range(key_count)]

    def _prune(self, key: int, now: float) -> None:
        cutoff = now - self.window_seconds
        charges = self._charges[key]
        # A charge at ts stops counting once ts <= now - window.
        while charges and charges[0] <= cutoff:
            charges.popleft()

    def _available_key(self, now: float) -> int | None:
        """Least-loaded key with remaining budget; ties broken by lowest index."""
        best = None
        best_load = None
        for key in range(self.key_count):
            self._prune(key, now)
            load = len(self._charges[key])
            if load < self.calls_per_window and (best_load is None or load < best_load):
                best, best_load = key, load
        return best

    def next_expiry(self) -> float:
        """Earliest simulated instant at which any key frees one slot."""
        return min(charges[0] + self.window_seconds for charges in self._charges if charges)

    def charge(self, clock: SimulatedClock) -> tuple[int, int]:
        """Charge one call, advancing the clock to the earliest window expiry when
        every key is exhausted. Returns (key, calls remaining on that key)."""
        key = self._available_key(clock.now)
        if key is None:
            clock.advance_to(self.next_expiry())
            key = self._available_key(clock.now)
            assert key is not None, "a slot must free up at the window expiry"
        self._charges[key].append(clock.now)
        return key, self.calls_per_window - len(self._charges[key])

    def in_window(self, key: int, now: float) -> int:
        self._prune(key, now)
        return len(self._charges[key])


class SimulatedOracle:
    """Answers friend and profile lookups from a fixed snapshot.

    Answers are pure functions of (node, construction inputs); only the clock
    and budget state change between identical queries. Safe for concurrent
    walkers: budget check-and-charge is atomic per call.
    """

    FRIENDS = "friends"
    PROFILES = "profiles"

    def __init__(
        self,
        graph: DirectedGraph,
        profiles: Mapping[NodeId, NodeProfile],
        clock: SimulatedClock | None = None,
        friends_limiter: RateLimiter | None = None,
        profiles_limiter: RateLimiter | None = None,
        page_size: int = 5000,
        profile_batch: int = 100,
        validate: bool = True,
    ) -> None:
        if page_size < 1 or profile_batch < 1:
            raise ValueError("page_size and profile_batch must be positive")
        if validate:
            _check_consistency(graph, profiles)
        self.graph = graph
        self.profiles = dict(profiles)
        self.clock = clock if clock is not None else SimulatedClock()
        self.friends_limiter = friends_limiter
        self.profiles_limiter = profiles_limiter
        self.page_size = page_size
        self.profile_batch = profile_batch
        self.call_log: list[CallRecord] = []
        self.calls_by_endpoint: dict[str, int] = {self.FRIENDS: 0, self.PROFILES: 0}
        self.friend_records_served = 0
        self._lock = threading.RLock()

    def _charge(self, endpoint: str, limiter: RateLimiter | None, nodes: tuple[NodeId, ...]) -> None:
        key: int | None = None
        remaining: int | None = None
        if limiter is not None:
            key, remaining = limiter.charge(self.clock)
        self.calls_by_endpoint[endpoint] += 1
        self.call_log.append(CallRecord(self.clock.now, key, endpoint, nodes, remaining))

    def get_friends(self, node: NodeId) -> FriendsPage:
        """First page of the node's friends, most recent first.

        Charges one friends-endpoint call; blocks (on the simulated clock) when
        all keys are exhausted. Unknown ids raise NotFoundError, protected
        accounts ProtectedError; neither consumes budget.
        """
        with self._lock:
            profile = self.profiles.get(node)
            if profile is None:
                raise NotFoundError(f"unknown account id {node}")
            if profile.protected:
                raise ProtectedError(f"account {node} is protected")
            self._charge(self.FRIENDS, self.friends_limiter, (node,))
            friends = tuple(profile.friends_recent_first[: self.page_size])
            self.friend_records_served += len(friends)
            return FriendsPage(friends, truncated=len(profile.friends_recent_first) > self.page_size)

    def get_profile(self, node: NodeId) -> NodeProfile:
        """Single profile snapshot; one profiles-endpoint call."""
        with self._lock:
            profile = self.profiles.get(node)
            if profile is None:
                raise NotFoundError(f"unknown account id {node}")
            self._charge(self.PROFILES, self.profiles_limiter, (node,))
            return profile

    def get_profiles(self, nodes: Sequence[NodeId]) -> dict[NodeId, NodeProfile]:
        """Batched profile lookup: ceil(len(nodes) / profile_batch) calls.

        Unknown ids are silently dropped from the result, mirroring batched
        user-lookup endpoints.
        """
        nodes = list(nodes)
        result: dict[NodeId, NodeProfile] = {}
        with self._lock:
            for start in range(0, len(nodes), self.profile_batch):
                chunk = nodes[start : start + self.profile_batch]
                self._charge(self.PROFILES, self.profiles_limiter, tuple(chunk))
                for node in chunk:
                    profile = self.profiles.get(node)
                    if profile is not None:
                        result[node] = profile
        return result

    def follows(self, source: NodeId, target: NodeId) -> bool:
        """Ground-truth reciprocity check; uncharged and unlogged."""
        return self.graph.has_edge(source, target)

    def profile_calls_for(self, count: int) -> int:
        return math.ceil(count / self.profile_batch)


def _check_consistency(graph: DirectedGraph, profiles: Mapping[NodeId, NodeProfile]) -> None:
    missing = sorted(n for n in graph.nodes if n not in profiles)
    if missing:
        shown = ", ".join(str(n) for n in missing[:10])
        raise ValueError(f"{len(missing)} graph node(s) lack a profile: {shown}")
    mismatched = sorted(
        n for n in graph.nodes if set(profiles[n].friends_recent_first) != graph.successors(n)
    )
    if mismatched:
        shown = ", ".join(str(n) for n in mismatched[:10])
        raise ValueError(
            f"{len(mismatched)} profile friend list(s) disagree with graph out-neighbors: {shown}"
        )


def build_simulated_oracle(
    graph: DirectedGraph,
    profiles: Mapping[NodeId, NodeProfile],
    *,
    clock: SimulatedClock | None = None,
    key_count: int = 12,
    friends_calls_per_window: int = 15,
    friends_window_seconds: float = 900.0,
    profile_calls_per_window: int = 900,
    profile_window_seconds: float = 900.0,
    page_size: int = 5000,
    profile_batch: int = 100,
    rate_limits_enabled: bool = True,
) -> SimulatedOracle:
    """Construct an oracle over a ground-truth snapshot.

    Defaults mirror the public platform quotas: 15 friends calls per key per
    900 s window (5,000 friends each) and 900 batched profile calls per key
    per window. With rate_limits_enabled=False calls are logged but never
    charged or blocked.
    """
    friends_limiter = None
    profiles_limiter = None
    if rate_limits_enabled:
        friends_limiter = RateLimiter(friends_calls_per_window, friends_window_seconds, key_count)
        profiles_limiter = RateLimiter(profile_calls_per_window, profile_window_seconds, key_count)
    return SimulatedOracle(
        graph,
        profiles,
        clock=clock,
        friends_limiter=friends_limiter,
        profiles_limiter=profiles_limiter,
        page_size=page_size,
        profile_batch=profile_batch,
    )


def write_call_log(records: Iterable[CallRecord], path) -> None:
    """JSONL, one record per charged call."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "t": r.t,
                        "key": r.key,
                        "endpoint": r.endpoint,
                        "nodes": list(r.nodes),
                        "calls_remaining": r.calls_remaining,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def assert_budget_safety(
    records: Iterable[CallRecord],
    endpoint: str,
    calls_per_window: int,
    window_seconds: float,
) -> None:
    """Replay a call log and verify the sliding-window invariant for every key.

    Raises AssertionError naming the first violating key and instant.
    """
    by_key: dict[int, list[float]] = {}
    for r in records:
        if r.endpoint == endpoint and r.key is not None:
            by_key.setdefault(r.key, []).append(r.t)
    for key, times in by_key.items():
        times.sort()
        lo = 0
        for hi, t in enumerate(times):
            while times[lo] <= t - window_seconds:
                lo += 1
            count = hi - lo + 1
            if count > calls_per_window:
                raise AssertionError(
                    f"key {key}: {count} {endpoint} calls in window ending at t={t}"
                )
