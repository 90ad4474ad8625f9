"""Scenario files: the single input describing a simulation run.

A scenario bundles the workspace, robot team, task list, sampling
configuration, allocator choice, and an optional scripted instruction
schedule. Loading validates everything up front and reports all problems
together rather than failing on the first.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import yaml

from .geometry import Obstacle, Workspace
from .halton import HaltonConfig
from .instructions import Instruction, validate_instruction


class ScenarioError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("scenario invalid:\n  " + "\n  ".join(errors))
        self.errors = errors


@dataclass
class RobotSpec:
    id: int
    start: tuple[float, float]
    capability: list[float]
    capacity: int
    klass: str = "ground"


@dataclass
class TaskSpec:
    id: int
    pickup: tuple[float, float]
    delivery: tuple[float, float]
    type: int
    priority: float = 1.0


@dataclass
class Scenario:
    width: float
    height: float
    obstacles: list[Obstacle] = field(default_factory=list)
    delivery_points: dict[str, tuple[float, float]] = field(default_factory=dict)
    robots: list[RobotSpec] = field(default_factory=list)
    tasks: list[TaskSpec] = field(default_factory=list)
    sampling: HaltonConfig = field(default_factory=HaltonConfig)
    allocator: str = "oath"
    seed: int = 0
    steps_cap: int = 5000
    sensing_radius: float = 1.5
    theta: float = 0.1
    n_types: int = 1
    instructions: list[Instruction] = field(default_factory=list)

    def build_workspace(self) -> Workspace:
        return Workspace(
            width=self.width,
            height=self.height,
            known_obstacles=[o for o in self.obstacles if o.known_at_start],
            unknown_obstacles=[o for o in self.obstacles if not o.known_at_start],
        )

    def with_overrides(self, **kw) -> "Scenario":
        return replace(self, **kw)


def _point(v, errors, what):
    if (
        isinstance(v, (list, tuple))
        and len(v) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    ):
        return (float(v[0]), float(v[1]))
    errors.append(f"{what}: expected [x, y], got {v!r}")
    return (0.0, 0.0)


def parse_scenario(raw: dict) -> Scenario:
    errors: list[str] = []
    ws = raw.get("workspace", {})
    width = float(ws.get("width", 0) or 0)
    height = float(ws.get("height", 0) or 0)
    if width <= 0 or height <= 0:
        errors.append("workspace: width and height must be positive")

    def in_bounds(p):
        return 0 <= p[0] <= width and 0 <= p[1] <= height

    obstacles = []
    for i, o in enumerate(raw.get("obstacles", [])):
        try:
            ob = Obstacle(
                id=str(o.get("id", f"obs{i}")),
                polygon=[tuple(map(float, v)) for v in o.get("polygon", [])],
                kind=o.get("kind", "wall"),
                known_at_start=bool(o.get("known_at_start", True)),
            )
            obstacles.append(ob)
        except (ValueError, TypeError) as e:
            errors.append(f"obstacle[{i}]: {e}")

    delivery_points = {}
    for label, p in (raw.get("delivery_points") or {}).items():
        delivery_points[str(label)] = _point(p, errors, f"delivery_points[{label}]")

    n_types = int(raw.get("n_types", 1))
    robots = []
    seen_rids = set()
    for i, r in enumerate(raw.get("robots", [])):
        rid = r.get("id", i)
        if rid in seen_rids:
            errors.append(f"robot[{i}]: duplicate robot id {rid}")
        seen_rids.add(rid)
        start = _point(r.get("start"), errors, f"robot[{rid}].start")
        if width > 0 and not in_bounds(start):
            errors.append(f"robot[{rid}]: start {start} out of bounds")
        cap = r.get("capability", [1.0] * n_types)
        if len(cap) != n_types:
            errors.append(f"robot[{rid}]: capability length {len(cap)} != n_types {n_types}")
        elif sum(cap) <= 0:
            errors.append(f"robot[{rid}]: capability vector must be nonzero")
        q = int(r.get("capacity", 1))
        if q < 1:
            errors.append(f"robot[{rid}]: capacity must be >= 1")
        robots.append(
            RobotSpec(
                id=int(rid),
                start=start,
                capability=[float(x) for x in cap],
                capacity=q,
                klass=r.get("class", "ground"),
            )
        )

    tasks = []
    seen_tids = set()
    for i, t in enumerate(raw.get("tasks", [])):
        tid = t.get("id", i)
        if tid in seen_tids:
            errors.append(f"task[{i}]: duplicate task id {tid}")
        seen_tids.add(tid)
        pickup = _point(t.get("pickup"), errors, f"task[{tid}].pickup")
        if width > 0 and not in_bounds(pickup):
            errors.append(f"task[{tid}]: pickup {pickup} out of bounds")
        d = t.get("delivery")
        if isinstance(d, str):
            if d not in delivery_points:
                errors.append(f"task[{tid}]: unknown delivery label {d!r}")
                delivery = (0.0, 0.0)
            else:
                delivery = delivery_points[d]
        else:
            delivery = _point(d, errors, f"task[{tid}].delivery")
            if width > 0 and not in_bounds(delivery):
                errors.append(f"task[{tid}]: delivery {delivery} out of bounds")
        typ = int(t.get("type", 0))
        if not 0 <= typ < n_types:
            errors.append(f"task[{tid}]: type {typ} outside 0..{n_types - 1}")
        prio = float(t.get("priority", 1.0))
        if prio <= 0:
            errors.append(f"task[{tid}]: priority must be positive")
        tasks.append(TaskSpec(id=int(tid), pickup=pickup, delivery=delivery, type=typ, priority=prio))

    s = raw.get("sampling", {}) or {}
    try:
        sampling = HaltonConfig(
            bases=tuple(s.get("bases", (2, 3))),
            n_candidates=int(s.get("n_candidates", 2000)),
            delta_min=float(s.get("delta_min", 0.3)),
            delta_opt=float(s.get("delta_opt", 0.4)),
            sigma=float(s.get("sigma", 0.5)),
            beta=float(s.get("beta", 0.2)),
            seed=int(s.get("seed", 0)),
        )
    except ValueError as e:
        errors.append(f"sampling: {e}")
        sampling = HaltonConfig()

    allocator = raw.get("allocator", "oath")
    if allocator not in ("oath", "cbba", "kan", "kam"):
        errors.append(f"allocator: unknown kind {allocator!r}")

    instructions = []
    for i, ins in enumerate(raw.get("instructions", [])):
        obj = Instruction(
            intent=ins.get("intent", ""),
            payload=ins.get("payload", {}),
            issue_step=int(ins.get("step", 0)),
        )
        errs = validate_instruction(obj)
        errors.extend(f"instruction[{i}]: {e}" for e in errs)
        instructions.append(obj)

    if errors:
        raise ScenarioError(errors)

    return Scenario(
        width=width,
        height=height,
        obstacles=obstacles,
        delivery_points=delivery_points,
        robots=robots,
        tasks=tasks,
        sampling=sampling,
        allocator=allocator,
        seed=int(raw.get("seed", 0)),
        steps_cap=int(raw.get("steps_cap", 5000)),
        sensing_radius=float(raw.get("sensing_radius", 1.5)),
        theta=float(raw.get("theta", 0.1)),
        n_types=n_types,
        instructions=instructions,
    )


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ScenarioError(["file does not contain a mapping"])
    return parse_scenario(raw)
