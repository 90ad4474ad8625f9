"""Task grouping by traversable distance.

Unassigned tasks are clustered with average-linkage agglomerative
clustering over the roadmap (shortest-path) distances between their
pickup nodes, so two tasks separated by a wall never look "close" the way
they would under straight-line distance. Each cluster also carries a
smoothed task-type composition vector used by the auction's
specialization scoring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .roadmap import DistanceMatrix


@dataclass
class Task:
    id: int
    pickup: int  # roadmap node id
    delivery: int  # roadmap node id
    type: int
    priority: float = 1.0
    state: str = "unassigned"  # unassigned | assigned | picked | delivered

    def __post_init__(self) -> None:
        if self.pickup == self.delivery:
            raise ValueError(f"task {self.id}: pickup equals delivery")
        if self.priority <= 0:
            raise ValueError(f"task {self.id}: priority must be positive")


@dataclass
class Cluster:
    id: int
    task_ids: list[int]
    center: tuple[float, float] | None = None
    type_counts: np.ndarray | None = None
    psi: np.ndarray | None = None


def choose_k(n_tasks: int, n_robots: int) -> int:
    """Cluster count: a bit more clusters than robots, capped by task count."""
    if n_robots < 1:
        raise ValueError("need at least one robot")
    if n_tasks == 0:
        return 0
    if n_tasks < n_robots:
        return n_tasks
    return min(n_tasks, max(n_robots + 1, math.ceil(1.5 * n_robots)))


def cluster_stats(type_counts: np.ndarray, theta: float) -> np.ndarray:
    """Smoothed type-composition vector: strictly positive, sums to 1."""
    n = np.asarray(type_counts, dtype=float) + theta
    total = n.sum()
    if total <= 0:
        raise ValueError("cluster must be non-empty (or theta > 0)")
    return n / total


def _avg_linkage(d: np.ndarray, members_a: list[int], members_b: list[int]) -> float:
    s = 0.0
    for i in members_a:
        for j in members_b:
            v = d[i, j]
            if math.isinf(v):
                return math.inf
            s += v
    return s / (len(members_a) * len(members_b))


def cluster_tasks(
    unassigned: list[Task],
    m: DistanceMatrix,
    k: int,
    n_types: int = 0,
    theta: float = 0.1,
    positions: dict[int, tuple[float, float]] | None = None,
) -> list[Cluster]:
    """Average-linkage agglomerative clustering over pickup distances, cut at k.

    Tasks unreachable from every other task become singleton clusters
    first. Merging is deterministic: among equally close pairs the one
    with the lexicographically smallest (min task id, min task id) wins,
    so the partition is invariant to input order.
    """
    if not unassigned:
        return []
    tasks = sorted(unassigned, key=lambda t: t.id)
    if not 1 <= k <= len(tasks):
        raise ValueError(f"k={k} outside [1, {len(tasks)}]")
    n = len(tasks)
    d = np.empty((n, n))
    for i, ti in enumerate(tasks):
        for j, tj in enumerate(tasks):
            d[i, j] = m.get(ti.pickup, tj.pickup)

    isolated = [i for i in range(n) if all(math.isinf(d[i, j]) for j in range(n) if j != i)]
    rest = [i for i in range(n) if i not in isolated]
    groups: list[list[int]] = [[i] for i in rest]
    target = max(1, k - len(isolated))
    while len(groups) > target:
        best = None
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                link = _avg_linkage(d, groups[a], groups[b])
                key = (
                    link,
                    min(tasks[i].id for i in groups[a] + groups[b]),
                    max(min(tasks[i].id for i in groups[a]), min(tasks[i].id for i in groups[b])),
                )
                if best is None or key < best[0]:
                    best = (key, a, b)
        if best is None or math.isinf(best[0][0]):
            break  # remaining groups are in different components
        _, a, b = best
        groups[a] = sorted(groups[a] + groups[b], key=lambda i: tasks[i].id)
        del groups[b]
    groups.extend([i] for i in isolated)
    groups.sort(key=lambda g: min(tasks[i].id for i in g))

    clusters = []
    for cid, g in enumerate(groups):
        member_tasks = [tasks[i] for i in g]
        c = Cluster(id=cid, task_ids=[t.id for t in member_tasks])
        if n_types > 0:
            counts = np.zeros(n_types)
            for t in member_tasks:
                counts[t.type] += 1
            c.type_counts = counts
            c.psi = cluster_stats(counts, theta)
        if positions is not None:
            pts = [positions[t.pickup] for t in member_tasks]
            c.center = (
                sum(p[0] for p in pts) / len(pts),
                sum(p[1] for p in pts) / len(pts),
            )
        clusters.append(c)
    return clusters
