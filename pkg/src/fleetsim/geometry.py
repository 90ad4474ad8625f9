"""Workspace geometry: bounded world, polygonal obstacles, clearance queries.

The workspace is the ground truth the rest of the system reasons about.
Obstacles are simple polygons tagged as walls, gates, or bushes; some are
known from the start and the rest stay hidden until a robot senses them or
an operator announces them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from shapely.geometry import LineString, Point, Polygon


class OutOfBoundsError(ValueError):
    """Raised when a query point falls outside the workspace rectangle."""


@dataclass
class Obstacle:
    id: str
    polygon: list[tuple[float, float]]
    kind: str = "wall"  # wall | gate | bush
    known_at_start: bool = True

    def __post_init__(self) -> None:
        if len(self.polygon) < 3:
            raise ValueError(f"obstacle {self.id!r}: polygon needs >=3 vertices")
        self._shape = Polygon(self.polygon)
        if not self._shape.is_valid:
            raise ValueError(f"obstacle {self.id!r}: polygon is not simple")

    @property
    def shape(self) -> Polygon:
        return self._shape


@dataclass
class Workspace:
    """Rectangular world [0,width] x [0,height] with polygonal obstacles.

    Immutable after construction except for the monotonically growing
    `discovered` set (ids of unknown obstacles that have been sensed or
    announced). Mutations happen only between simulation steps.
    """

    width: float
    height: float
    known_obstacles: list[Obstacle] = field(default_factory=list)
    unknown_obstacles: list[Obstacle] = field(default_factory=list)
    discovered: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("workspace dimensions must be positive")
        for ob in self.known_obstacles + self.unknown_obstacles:
            minx, miny, maxx, maxy = ob.shape.bounds
            if minx < 0 or miny < 0 or maxx > self.width or maxy > self.height:
                raise ValueError(f"obstacle {ob.id!r} extends outside bounds")

    def in_bounds(self, p: tuple[float, float]) -> bool:
        return 0 <= p[0] <= self.width and 0 <= p[1] <= self.height

    def visible_obstacles(self, visible_only: bool = True) -> list[Obstacle]:
        """Obstacles the planner may use: known plus discovered unknowns.

        With visible_only=False, returns ground truth (everything).
        """
        if not visible_only:
            return self.known_obstacles + self.unknown_obstacles
        out = list(self.known_obstacles)
        out.extend(ob for ob in self.unknown_obstacles if ob.id in self.discovered)
        return out

    def discover(self, obstacle_id: str) -> Obstacle | None:
        for ob in self.unknown_obstacles:
            if ob.id == obstacle_id:
                self.discovered.add(obstacle_id)
                return ob
        return None

    def add_known_obstacle(self, ob: Obstacle) -> None:
        self.known_obstacles.append(ob)

    def boundary_distance(self, p: tuple[float, float]) -> float:
        return min(p[0], self.width - p[0], p[1], self.height - p[1])


def clearance(p: tuple[float, float], w: Workspace, visible_only: bool = True) -> float:
    """Distance from p to the nearest considered obstacle boundary.

    The world boundary rectangle counts as an obstacle, so clearance in an
    empty workspace is the distance to the nearest wall of the bounds.
    Returns 0 for points inside (or on) an obstacle.
    """
    if not w.in_bounds(p):
        raise OutOfBoundsError(f"point {p} outside {w.width}x{w.height} workspace")
    pt = Point(p)
    best = w.boundary_distance(p)
    for ob in w.visible_obstacles(visible_only):
        if ob.shape.covers(pt):
            return 0.0
        best = min(best, ob.shape.exterior.distance(pt))
    return best


def segment_blocked(
    a: tuple[float, float],
    b: tuple[float, float],
    w: Workspace,
    visible_only: bool = True,
) -> bool:
    """True iff segment ab touches the interior or boundary of any obstacle."""
    seg = LineString([a, b]) if a != b else Point(a)
    for ob in w.visible_obstacles(visible_only):
        if seg.intersects(ob.shape):
            return True
    return False


def point_in_obstacle(p: tuple[float, float], w: Workspace, visible_only: bool = True) -> bool:
    pt = Point(p)
    return any(ob.shape.covers(pt) for ob in w.visible_obstacles(visible_only))


def dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])
