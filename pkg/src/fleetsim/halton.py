"""Adaptive low-discrepancy sampling of the workspace.

Candidate points come from a Halton sequence (radical inverses in pairwise
coprime bases) scaled to the workspace. Each candidate is kept with a
probability that depends on its clearance to the nearest obstacle: zero
below a minimum safe distance, peaked at an optimal standoff distance, and
floored at a baseline rate in wide-open space. The result is a point cloud
that is dense near clutter and sparse in the open.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Workspace, clearance


class SamplingError(RuntimeError):
    """Raised when a sampling configuration yields no accepted points."""


@dataclass
class HaltonConfig:
    bases: tuple[int, ...] = (2, 3)
    n_candidates: int = 2000
    delta_min: float = 0.3
    delta_opt: float = 0.4
    sigma: float = 0.5
    beta: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if any(b < 2 for b in self.bases):
            raise ValueError("bases must be >= 2")
        for i, b1 in enumerate(self.bases):
            for b2 in self.bases[i + 1 :]:
                if math.gcd(b1, b2) != 1:
                    raise ValueError("bases must be pairwise coprime")
        if not 0 <= self.beta <= 1:
            raise ValueError("beta must be in [0,1]")
        if not 0 <= self.delta_min <= self.delta_opt:
            raise ValueError("need 0 <= delta_min <= delta_opt")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass
class SamplePoint:
    index: int
    position: tuple[float, float]
    clearance: float
    accepted: bool


def radical_inverse(i: int, b: int) -> float:
    """Reverse the base-b digits of i across the radix point."""
    f = 1.0
    r = 0.0
    while i > 0:
        f /= b
        r += f * (i % b)
        i //= b
    return r


def acceptance_probability(delta: float, cfg: HaltonConfig) -> float:
    if delta < cfg.delta_min:
        return 0.0
    z = (delta - cfg.delta_opt) / cfg.sigma
    return cfg.beta + (1.0 - cfg.beta) * math.exp(-0.5 * z * z)


def sample_map(w: Workspace, cfg: HaltonConfig) -> list[SamplePoint]:
    """Generate the adaptive map: all candidates with their accept decision.

    Deterministic for a fixed config. Candidate i=0 is skipped (its radical
    inverse is the origin corner). Clearance is measured against known
    obstacles only; unknown obstacles enter later via discovery updates.
    """
    rng = np.random.default_rng(cfg.seed)
    us = rng.random(cfg.n_candidates)
    points: list[SamplePoint] = []
    for i in range(1, cfg.n_candidates + 1):
        x = radical_inverse(i, cfg.bases[0]) * w.width
        y = radical_inverse(i, cfg.bases[1]) * w.height
        delta = clearance((x, y), w, visible_only=True)
        accepted = bool(us[i - 1] < acceptance_probability(delta, cfg))
        points.append(SamplePoint(index=i, position=(x, y), clearance=delta, accepted=accepted))
    if not any(p.accepted for p in points):
        raise SamplingError("no candidate points accepted; check sampling config vs workspace")
    return points


def accepted_points(points: list[SamplePoint]) -> list[SamplePoint]:
    return [p for p in points if p.accepted]


def export_csv(points: list[SamplePoint], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("i,x,y,delta,accepted\n")
        for p in points:
            fh.write(f"{p.index},{p.position[0]:.9g},{p.position[1]:.9g},{p.clearance:.9g},{int(p.accepted)}\n")
