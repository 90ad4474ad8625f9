"""Cluster-weighted auction.

Each robot scores every cluster by roadmap distance to the cluster center
divided by a specialization factor (the inner product of the cluster's
type composition with the robot's normalized capability vector), further
divided by the cluster's maximum member priority. A sequential auction
with displacement then produces a conflict-free robot-to-cluster
assignment: lower score wins, and an outbid robot re-enters on the next
iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clustering import Cluster, Task
from .roadmap import Roadmap, dijkstra_from


@dataclass
class Robot:
    id: int
    position: int  # roadmap node id
    capability: np.ndarray
    capacity: int
    klass: str = "ground"  # ground | drone
    route: list[int] = field(default_factory=list)
    load: int = 0

    def __post_init__(self) -> None:
        self.capability = np.asarray(self.capability, dtype=float)
        if self.capability.sum() <= 0:
            raise ValueError(f"robot {self.id}: capability vector must be nonzero")
        if self.capacity < 1:
            raise ValueError(f"robot {self.id}: capacity must be >= 1")

    @property
    def zeta(self) -> np.ndarray:
        return self.capability / self.capability.sum()

    def can_do(self, task_type: int) -> bool:
        return self.capability[task_type] > 0


@dataclass
class ScoreMatrix:
    robot_ids: list[int]
    cluster_ids: list[int]
    s: np.ndarray
    gamma: np.ndarray
    dist: np.ndarray


@dataclass
class ClusterAssignment:
    assigned: dict[int, int]  # robot id -> cluster id
    unmatched: list[int]


def specialization(psi: np.ndarray, zeta: np.ndarray) -> float:
    """Match between cluster composition and robot capability, in (0,1]."""
    return float(np.dot(psi, zeta))


def score(
    robots: list[Robot],
    clusters: list[Cluster],
    rm: Roadmap,
    tasks_by_id: dict[int, Task],
) -> ScoreMatrix:
    """Score matrix s[r,k] = (distance / specialization) / max member priority.

    A cluster whose every member type is outside the robot's capability
    scores +inf regardless of smoothing, as does an unreachable cluster.
    """
    nr, nk = len(robots), len(clusters)
    s = np.full((nr, nk), math.inf)
    gamma = np.full((nr, nk), math.inf)
    d = np.full((nr, nk), math.inf)
    center_nodes = [rm.nearest_node(c.center) for c in clusters]
    for ri, robot in enumerate(robots):
        dists, _ = dijkstra_from(rm, robot.position)
        zeta = robot.zeta
        for ki, cluster in enumerate(clusters):
            g = specialization(cluster.psi, zeta)
            gamma[ri, ki] = g
            d[ri, ki] = dists[center_nodes[ki]]
            if not any(robot.can_do(tasks_by_id[t].type) for t in cluster.task_ids):
                continue  # hard incompatibility
            if math.isinf(d[ri, ki]) or g <= 0:
                continue
            w = max(tasks_by_id[t].priority for t in cluster.task_ids)
            s[ri, ki] = (d[ri, ki] / g) / w
    return ScoreMatrix(
        robot_ids=[r.id for r in robots],
        cluster_ids=[c.id for c in clusters],
        s=s,
        gamma=gamma,
        dist=d,
    )


def auction(sm: ScoreMatrix) -> ClusterAssignment:
    """Sequential auction with displacement until conflict-free.

    Robots bid in ascending id order; each picks its lowest-score cluster
    whose score beats the standing best bid. A displaced holder re-enters
    the next iteration. Robots with no finite bid remain unmatched.
    """
    nr, nk = sm.s.shape
    order = sorted(range(nr), key=lambda i: sm.robot_ids[i])
    best_bid = [math.inf] * nk
    holder: list[int | None] = [None] * nk
    assigned: dict[int, int | None] = {i: None for i in range(nr)}
    pending = list(order)
    # each winning bid strictly lowers some best_bid, so nr*nk bounds the rounds
    for _ in range(nr * nk + 1):
        if not pending:
            break
        next_pending: list[int] = []
        for ri in pending:
            best_k = None
            for ki in range(nk):
                v = sm.s[ri, ki]
                if math.isinf(v) or v >= best_bid[ki]:
                    continue
                if best_k is None or v < sm.s[ri, best_k]:
                    best_k = ki
            if best_k is None:
                continue  # waits this round
            prev = holder[best_k]
            best_bid[best_k] = sm.s[ri, best_k]
            holder[best_k] = ri
            assigned[ri] = best_k
            if prev is not None:
                assigned[prev] = None
                next_pending.append(prev)
        pending = sorted(next_pending, key=lambda i: sm.robot_ids[i])
    result = {
        sm.robot_ids[ri]: sm.cluster_ids[ki]
        for ri, ki in assigned.items()
        if ki is not None
    }
    unmatched = [sm.robot_ids[ri] for ri, ki in assigned.items() if ki is None]
    return ClusterAssignment(assigned=result, unmatched=sorted(unmatched))
