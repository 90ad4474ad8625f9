"""Comparison allocators behind the same interface as the cluster-auction
pipeline: CBBA (consensus-based bundle building), k-means clustering, and
a nearest-neighbor route heuristic. These isolate the two ingredients the
main pipeline adds — obstacle-aware distances and capability-weighted
auctions — so benchmark differences are attributable.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .auction import Robot
from .clustering import Cluster, Task
from .route_solver import RoutePlan

ALLOCATOR_KINDS = ("oath", "cbba", "kan", "kam")


def euclidean_cost(positions: dict[int, tuple[float, float]]):
    def cost(a: int, b: int) -> float:
        pa, pb = positions[a], positions[b]
        return math.hypot(pa[0] - pb[0], pa[1] - pb[1])

    return cost


# ---------------------------------------------------------------------------
# CBBA

Stop = tuple[int, str, int]  # (node, "pickup"|"deliver", task id)


def _path_cost(path: list[Stop], cost) -> float:
    return sum(cost(path[i][0], path[i + 1][0]) for i in range(len(path) - 1))


def _insertion(path: list[Stop], cost, task: Task, capacity: int):
    """Cheapest feasible insertion of a task's pickup+delivery into a path.

    Returns (cost increase, new path) or None. Feasible means the load
    profile stays within capacity (pickup +1, delivery -1) and the pickup
    comes first.
    """
    base = _path_cost(path, cost)
    n = len(path)
    best = None
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            new = (
                path[:i]
                + [(task.pickup, "pickup", task.id)]
                + path[i:j]
                + [(task.delivery, "deliver", task.id)]
                + path[j:]
            )
            load = 0
            ok = True
            for _, action, _ in new[1:]:
                load += 1 if action == "pickup" else -1
                if load > capacity:
                    ok = False
                    break
            if not ok:
                continue
            delta = _path_cost(new, cost) - base
            if math.isinf(delta):
                continue
            if best is None or delta < best[0] - 1e-12:
                best = (delta, new)
    return best


def cbba_allocate(
    tasks: list[Task],
    robots: list[Robot],
    cost,
    max_rounds: int | None = None,
) -> dict[int, list[Stop]]:
    """Consensus-based bundle allocation over a fully connected team.

    Each robot greedily grows a bundle (at most its capacity) by cheapest
    marginal insertion of a task's pickup and delivery into its path. A
    shared winner board resolves conflicts: the smaller cost increase
    wins, ties break on lower task then robot id. Iterates until a full
    pass changes nothing. Returns robot id -> ordered stop list.
    """
    robots = sorted(robots, key=lambda r: r.id)
    winner: dict[int, int | None] = {t.id: None for t in tasks}
    win_bid: dict[int, float] = {t.id: -math.inf for t in tasks}
    paths: dict[int, list[Stop]] = {r.id: [(r.position, "start", -1)] for r in robots}
    bundles: dict[int, list[int]] = {r.id: [] for r in robots}
    rounds = max_rounds or max(1, len(robots) * max(1, len(tasks)))

    converged = False
    for _ in range(rounds):
        changed = False
        for r in robots:
            path: list[Stop] = [(r.position, "start", -1)]
            bundle: list[int] = []
            while len(bundle) < r.capacity:
                best = None
                for t in tasks:
                    if t.id in bundle or not r.can_do(t.type):
                        continue
                    ins = _insertion(path, cost, t, r.capacity)
                    if ins is None:
                        continue
                    bid = -ins[0]
                    if winner[t.id] != r.id and bid <= win_bid[t.id] + 1e-12:
                        continue
                    key = (-bid, t.id)
                    if best is None or key < best[0]:
                        best = (key, t, ins, bid)
                if best is None:
                    break
                _, t, (_, new_path), bid = best
                path = new_path
                bundle.append(t.id)
                if winner[t.id] != r.id or abs(win_bid[t.id] - bid) > 1e-12:
                    changed = True
                winner[t.id] = r.id
                win_bid[t.id] = bid
            paths[r.id] = path
            bundles[r.id] = bundle
        # consensus: a robot drops stops for tasks it no longer wins
        for r in robots:
            kept = [tid for tid in bundles[r.id] if winner[tid] == r.id]
            if kept != bundles[r.id]:
                changed = True
                bundles[r.id] = kept
                paths[r.id] = [s for s in paths[r.id] if s[2] == -1 or s[2] in kept]
        if not changed:
            converged = True
            break
    if not converged:
        warnings.warn("CBBA did not converge; returning current conflict-free assignment")

    return {r.id: paths[r.id][1:] for r in robots}


# ---------------------------------------------------------------------------
# k-means


def kmeans_cluster(
    tasks: list[Task],
    k: int,
    positions: dict[int, tuple[float, float]],
    rng: np.random.Generator,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> list[Cluster]:
    """Lloyd's algorithm on pickup coordinates with k-means++ seeding.

    An emptied cluster is re-seeded at the point farthest from its
    nearest center.
    """
    if not tasks:
        return []
    tasks = sorted(tasks, key=lambda t: t.id)
    if k > len(tasks):
        raise ValueError("k exceeds task count")
    pts = np.array([positions[t.pickup] for t in tasks])
    n = len(pts)

    centers = [pts[rng.integers(n)]]
    while len(centers) < k:
        d2 = np.min([np.sum((pts - c) ** 2, axis=1) for c in centers], axis=0)
        total = d2.sum()
        if total <= 0:
            centers.append(pts[rng.integers(n)])
            continue
        centers.append(pts[rng.choice(n, p=d2 / total)])
    centers = np.array(centers)

    labels = np.zeros(n, dtype=int)
    for _ in range(max_iters):
        d = np.linalg.norm(pts[:, None, :] - centers[None, :, :], axis=2)
        labels = np.argmin(d, axis=1)
        new_centers = centers.copy()
        for j in range(k):
            members = pts[labels == j]
            if len(members) == 0:
                far = int(np.argmax(np.min(d, axis=1)))
                new_centers[j] = pts[far]
            else:
                new_centers[j] = members.mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        if shift < tol:
            break
    d = np.linalg.norm(pts[:, None, :] - centers[None, :, :], axis=2)
    labels = np.argmin(d, axis=1)

    clusters = []
    cid = 0
    for j in range(k):
        members = [tasks[i] for i in range(n) if labels[i] == j]
        if not members:
            continue
        mpts = [positions[t.pickup] for t in members]
        clusters.append(
            Cluster(
                id=cid,
                task_ids=[t.id for t in members],
                center=(
                    sum(p[0] for p in mpts) / len(mpts),
                    sum(p[1] for p in mpts) / len(mpts),
                ),
            )
        )
        cid += 1
    return clusters


# ---------------------------------------------------------------------------
# nearest-neighbor routing


def nn_route(tasks: list[Task], robot: Robot, cost) -> RoutePlan:
    """Greedy route: always move to the nearest feasible next stop.

    A pickup is feasible while the load and batch size are under capacity;
    a delivery is feasible for any carried task. Stops when nothing
    feasible remains.
    """
    plan = RoutePlan()
    candidates = [t for t in sorted(tasks, key=lambda t: t.id) if robot.can_do(t.type)]
    at = robot.position
    carried: list[Task] = []
    picked_count = 0
    load = 0
    while True:
        options: list[tuple[float, int, str, Task]] = []
        if load < robot.capacity and picked_count < robot.capacity:
            for t in candidates:
                c = cost(at, t.pickup)
                if not math.isinf(c):
                    options.append((c, t.id, "pickup", t))
        for t in carried:
            c = cost(at, t.delivery)
            if not math.isinf(c):
                options.append((c, t.id, "deliver", t))
        if not options:
            break
        options.sort(key=lambda o: (o[0], o[1], o[2]))
        c, _, action, t = options[0]
        plan.total_cost += c
        if action == "pickup":
            candidates.remove(t)
            carried.append(t)
            picked_count += 1
            load += 1
            at = t.pickup
            plan.sequence.append(t.pickup)
            plan.actions.append(("pickup", t.id))
            plan.selected_tasks.append(t.id)
        else:
            carried.remove(t)
            load -= 1
            at = t.delivery
            plan.sequence.append(t.delivery)
            plan.actions.append(("deliver", t.id))
        plan.load_profile.append(load)
    plan.selected_tasks.sort()
    plan.order = list(range(1, len(plan.sequence) + 1))
    return plan
