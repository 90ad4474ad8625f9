"""Ordered-goal path planning with incremental repair.

A route plan becomes a sequencing automaton (visit g_1..g_L in order,
never enter other robots' goal sites) composed with the roadmap into a
product graph whose states are (roadmap node, progress index). Shortest
accepting runs are found with D*-Lite, so when roadmap edges disappear or
appear mid-execution only the affected product states are repaired
instead of replanning from scratch.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

from .geometry import dist
from .roadmap import Roadmap
from .route_solver import RoutePlan

State = tuple[int, int]  # (roadmap node id, progress index)


@dataclass
class SequencingSpec:
    goals: list[int]
    avoid: set[int] = field(default_factory=set)


@dataclass
class PlanResult:
    path: list[int]  # node ids, starting at the start node
    cost: float
    goals_reached: int
    unreachable: list[int] = field(default_factory=list)  # goals beyond the reachable prefix


def build_spec(plan: RoutePlan, others: set[int]) -> SequencingSpec:
    """Goals are the plan's stop sequence (consecutive duplicates collapsed);
    avoid is the other robots' goal sites minus our own goals."""
    goals: list[int] = []
    for n in plan.sequence:
        if not goals or goals[-1] != n:
            goals.append(n)
    return SequencingSpec(goals=goals, avoid=set(others) - set(goals))


class ProductPlanner:
    """D*-Lite over the (roadmap x progress) product graph.

    Holds a live reference to the roadmap; callers report edge changes via
    notify_changes and start moves via set_start, then read path().
    """

    def __init__(self, spec: SequencingSpec, rm: Roadmap, start: int):
        self.spec = spec
        self.rm = rm
        self.L = len(spec.goals)
        self._pos = dict(rm.nodes)  # position cache survives node removal (heuristic only)
        self.start: State = (start, self._advance(start, 0))
        self._last_start = self.start
        self.km = 0.0
        self.g: dict[State, float] = {}
        self.rhs: dict[State, float] = {}
        self._heap: list[tuple[float, float, int, State]] = []
        self._in_queue: dict[State, tuple[float, float]] = {}
        self._counter = itertools.count()
        self.expansions = 0
        self.replans = 0
        if self.L > 0:
            self.goal_state: State = (spec.goals[-1], self.L)
            self.rhs[self.goal_state] = 0.0
            self._push(self.goal_state)

    # -- automaton --------------------------------------------------------

    def _advance(self, node: int, progress: int) -> int:
        if progress < self.L and node == self.spec.goals[progress]:
            return progress + 1
        return progress

    def _successors(self, s: State):
        node, p = s
        if p >= self.L or node not in self.rm.adj:
            return
        for m, w in self.rm.adj[node].items():
            if m in self.spec.avoid:
                continue
            yield (m, self._advance(m, p)), w

    def _predecessors(self, s: State):
        node, p = s
        if node in self.spec.avoid or node not in self.rm.adj:
            return
        for m, w in self.rm.adj[node].items():
            if p < self.L and node != self.spec.goals[p]:
                yield (m, p), w
            if p >= 1 and node == self.spec.goals[p - 1]:
                yield (m, p - 1), w

    # -- D*-Lite core -----------------------------------------------------

    def _h(self, s: State) -> float:
        return dist(self._pos.get(s[0], (0.0, 0.0)), self._pos.get(self.start[0], (0.0, 0.0)))

    def _key(self, s: State) -> tuple[float, float]:
        v = min(self.g.get(s, math.inf), self.rhs.get(s, math.inf))
        return (v + self._h(s) + self.km, v)

    def _push(self, s: State) -> None:
        k = self._key(s)
        self._in_queue[s] = k
        heapq.heappush(self._heap, (k[0], k[1], next(self._counter), s))

    def _update_vertex(self, s: State) -> None:
        if self.L > 0 and s != self.goal_state:
            best = math.inf
            for s2, w in self._successors(s):
                best = min(best, w + self.g.get(s2, math.inf))
            self.rhs[s] = best
        self._in_queue.pop(s, None)
        if self.g.get(s, math.inf) != self.rhs.get(s, math.inf):
            self._push(s)

    def _top(self) -> tuple[tuple[float, float], State] | None:
        while self._heap:
            k1, k2, _, s = self._heap[0]
            cur = self._in_queue.get(s)
            if cur is None or cur != (k1, k2):
                heapq.heappop(self._heap)  # stale entry
                continue
            return (k1, k2), s
        return None

    def compute(self) -> None:
        if self.L == 0:
            return
        while True:
            top = self._top()
            start_key = self._key(self.start)
            start_consistent = self.g.get(self.start, math.inf) == self.rhs.get(self.start, math.inf)
            if top is None or (top[0] >= start_key and start_consistent):
                break
            k_old, u = top
            heapq.heappop(self._heap)
            self._in_queue.pop(u, None)
            k_new = self._key(u)
            if k_old < k_new:
                self._push(u)
                continue
            self.expansions += 1
            if self.g.get(u, math.inf) > self.rhs.get(u, math.inf):
                self.g[u] = self.rhs[u]
                for s, _ in self._predecessors(u):
                    self._update_vertex(s)
            else:
                self.g[u] = math.inf
                self._update_vertex(u)
                for s, _ in self._predecessors(u):
                    self._update_vertex(s)

    # -- public surface ---------------------------------------------------

    def set_start(self, node: int, progress: int) -> None:
        new = (node, progress)
        if new == self.start:
            return
        self.km += dist(
            self._pos.get(self._last_start[0], (0.0, 0.0)),
            self._pos.get(node, (0.0, 0.0)),
        )
        self._last_start = new
        self.start = new

    def notify_changes(self, changed_edges: list[tuple[int, int]]) -> None:
        """Repair after roadmap edge insertions/removals/cost changes."""
        self.replans += 1
        self._pos.update(self.rm.nodes)
        touched: set[State] = set()
        for u, v in changed_edges:
            for p in range(self.L):
                touched.add((u, p))
                touched.add((v, p))
        for s in touched:
            if self.L > 0 and s != self.goal_state:
                self._update_vertex(s)

    def cost(self) -> float:
        self.compute()
        if self.L == 0:
            return 0.0
        return self.rhs.get(self.start, math.inf)

    def path(self) -> list[int] | None:
        """Shortest accepting node path from the current start, or None."""
        self.compute()
        if self.L == 0:
            return [self.start[0]]
        if math.isinf(self.rhs.get(self.start, math.inf)):
            return None
        path = [self.start[0]]
        cur = self.start
        limit = (len(self.rm.nodes) + 1) * (self.L + 1) + 1
        while cur[1] < self.L:
            best = None
            for s2, w in self._successors(cur):
                v = w + self.g.get(s2, math.inf)
                key = (v, -s2[1], s2[0])
                if best is None or key < best[0]:
                    best = (key, s2)
            if best is None or math.isinf(best[0][0]):
                return None
            cur = best[1]
            path.append(cur[0])
            limit -= 1
            if limit <= 0:
                return None
        return path

    def product_size_bound(self) -> int:
        return len(self.rm.nodes) * (self.L + 1)


def plan(spec: SequencingSpec, rm: Roadmap, start: int) -> PlanResult:
    """One-shot planning; on unreachable goals returns the feasible prefix."""
    if start not in rm.nodes:
        raise KeyError(f"start node {start} not in roadmap")
    for trunc in range(len(spec.goals), -1, -1):
        sub = SequencingSpec(goals=spec.goals[:trunc], avoid=spec.avoid)
        planner = ProductPlanner(sub, rm, start)
        p = planner.path()
        if p is not None:
            return PlanResult(
                path=p,
                cost=planner.cost(),
                goals_reached=trunc,
                unreachable=spec.goals[trunc:],
            )
    return PlanResult(path=[start], cost=0.0, goals_reached=0, unreachable=list(spec.goals))
