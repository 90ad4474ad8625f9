"""Exact intra-cluster task selection and pickup-delivery routing.

Given a robot and its auctioned cluster, pick up to `capacity` compatible
tasks and order their pickup/delivery stops to minimize travel cost. The
route starts at the robot's current node, every pickup precedes its
delivery, and the carried load never exceeds capacity. Instances are tiny
by construction (at most 2*capacity+1 stops), so branch-and-bound over
partial sequences is exact; the returned plan carries visit-order
indices that certify subtour-free connectivity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .clustering import Task
from .auction import Robot

SUBSET_ENUM_LIMIT = 2000


@dataclass
class RoutingInstance:
    robot: Robot
    candidate_tasks: list[Task]
    cost: dict[tuple[int, int], float]  # over {robot position} + pickups + deliveries
    capacity: int


@dataclass
class RoutePlan:
    selected_tasks: list[int] = field(default_factory=list)
    sequence: list[int] = field(default_factory=list)  # node ids, excluding start
    actions: list[tuple[str, int]] = field(default_factory=list)  # (pickup|deliver, task id)
    total_cost: float = 0.0
    load_profile: list[int] = field(default_factory=list)
    order: list[int] = field(default_factory=list)  # visit index per stop
    excluded: list[tuple[int, str]] = field(default_factory=list)  # (task id, reason)
    exhaustive: bool = True


class PrecedenceError(ValueError):
    pass


def route_exact(
    start: int,
    stops: list[tuple[int, str, int]],  # (node id, action, task id)
    cost: dict[tuple[int, int], float],
    capacity: int,
) -> tuple[list[int], float] | None:
    """Optimal ordering of the stop indices via depth-first branch and bound.

    Returns (stop order, cost) or None if no feasible order exists.
    Pickups raise the load by one, deliveries lower it; an order is
    feasible iff each task's pickup comes first and the load stays within
    capacity.
    """
    n = len(stops)
    if n == 0:
        return [], 0.0
    pickup_of: dict[int, int] = {}
    for idx, (_, action, tid) in enumerate(stops):
        if action == "pickup":
            if tid in pickup_of:
                raise PrecedenceError(f"duplicate pickup for task {tid}")
            pickup_of[tid] = idx

    best: list[float] = [math.inf]
    best_order: list[list[int]] = [[]]
    # cheapest outgoing hop per remaining stop, a weak admissible bound
    min_in = {}
    for j, (nj, _, _) in enumerate(stops):
        c = min(
            [cost[(stops[i][0], nj)] for i in range(n) if i != j] + [cost[(start, nj)]]
        )
        min_in[j] = c

    def recurse(at_node: int, visited: tuple[int, ...], load: int, acc: float, order: list[int]) -> None:
        if len(order) == n:
            if acc < best[0]:
                best[0] = acc
                best_order[0] = list(order)
            return
        remaining = [i for i in range(n) if i not in visited]
        if acc + sum(min_in[i] for i in remaining) >= best[0]:
            return
        for i in remaining:
            node, action, tid = stops[i]
            if action == "pickup" and load + 1 > capacity:
                continue
            if action == "deliver" and pickup_of.get(tid) not in visited:
                continue
            step = cost[(at_node, node)]
            if math.isinf(step):
                continue
            nl = load + 1 if action == "pickup" else load - 1
            order.append(i)
            recurse(node, visited + (i,), nl, acc + step, order)
            order.pop()

    recurse(start, (), 0, 0.0, [])
    if math.isinf(best[0]):
        return None
    return best_order[0], best[0]


def _standalone_cost(start: int, t: Task, cost: dict[tuple[int, int], float]) -> float:
    return cost[(start, t.pickup)] + cost[(t.pickup, t.delivery)]


def _plan_for_subset(
    inst: RoutingInstance, subset: list[Task]
) -> tuple[float, list[int], list[tuple[int, str, int]]] | None:
    stops: list[tuple[int, str, int]] = []
    for t in subset:
        stops.append((t.pickup, "pickup", t.id))
        stops.append((t.delivery, "deliver", t.id))
    res = route_exact(inst.robot.position, stops, inst.cost, inst.capacity)
    if res is None:
        return None
    order, c = res
    return c, order, stops


def select_and_route(inst: RoutingInstance) -> RoutePlan:
    """Pick the best task batch and route it.

    Objective is lexicographic: first maximize the number of tasks taken
    (capped by capacity), then minimize exact route cost. Tasks whose
    pickup or delivery is unreachable are excluded with a reason rather
    than failing the whole batch. When there are too many capacity-sized
    subsets to enumerate, the cheapest ones by a standalone-cost lower
    bound are tried and the plan is flagged non-exhaustive.
    """
    plan = RoutePlan()
    start = inst.robot.position
    feasible: list[Task] = []
    for t in inst.candidate_tasks:
        if not inst.robot.can_do(t.type):
            plan.excluded.append((t.id, "incompatible type"))
            continue
        if math.isinf(inst.cost[(start, t.pickup)]):
            plan.excluded.append((t.id, "pickup unreachable"))
            continue
        if math.isinf(inst.cost[(t.pickup, t.delivery)]):
            plan.excluded.append((t.id, "delivery unreachable"))
            continue
        feasible.append(t)
    if not feasible:
        return plan

    q = inst.capacity
    batch = min(q, len(feasible))
    if len(feasible) <= q:
        subsets = [feasible]
    else:
        lb = {t.id: _standalone_cost(start, t, inst.cost) for t in feasible}
        all_subsets = combinations(sorted(feasible, key=lambda t: lb[t.id]), batch)
        if math.comb(len(feasible), batch) <= SUBSET_ENUM_LIMIT:
            subsets = [list(s) for s in all_subsets]
        else:
            subsets = [list(s) for _, s in zip(range(SUBSET_ENUM_LIMIT), all_subsets)]
            plan.exhaustive = False

    best = None
    for subset in subsets:
        res = _plan_for_subset(inst, subset)
        if res is None:
            continue
        c, order, stops = res
        key = (-len(subset), c, sorted(t.id for t in subset))
        if best is None or key < best[0]:
            best = (key, c, order, stops, subset)
    if best is None:
        # all capacity-sized subsets infeasible; fall back to smaller batches
        for size in range(batch - 1, 0, -1):
            for subset in combinations(feasible, size):
                res = _plan_for_subset(inst, list(subset))
                if res is None:
                    continue
                c, order, stops = res
                key = (-size, c, sorted(t.id for t in subset))
                if best is None or key < best[0]:
                    best = (key, c, order, stops, list(subset))
            if best is not None:
                break
    if best is None:
        return plan

    _, c, order, stops, subset = best
    plan.selected_tasks = sorted(t.id for t in subset)
    plan.total_cost = c
    load = 0
    for idx in order:
        node, action, tid = stops[idx]
        plan.sequence.append(node)
        plan.actions.append(("pickup" if action == "pickup" else "deliver", tid))
        load += 1 if action == "pickup" else -1
        plan.load_profile.append(load)
    plan.order = list(range(1, len(order) + 1))
    return plan
