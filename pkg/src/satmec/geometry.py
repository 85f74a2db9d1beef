"""Flat-earth geometry: propagation delay, satellite tracks, visibility and UAV placement.

Satellites follow either a fixed geostationary point or a straight ground track
that repeats every pass period. There is no orbital mechanics here; the
abstraction only has to reproduce limited coverage time with closed-form
oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .model import Node, Position

SPEED_OF_LIGHT = 299_792_458.0  # m/s
UAV_SEED = 20240601


class OrbitKind(str, Enum):
    GEO = "geo"
    LEO_TRACK = "leo-track"


@dataclass(frozen=True)
class OrbitDescriptor:
    """Satellite motion descriptor.

    For GEO, ``origin`` is the sub-satellite ground point. For a LEO track the
    sub-satellite point starts at ``origin`` and moves along ``direction`` at
    ``ground_speed``, jumping back to ``origin`` every ``pass_period`` seconds.
    """

    kind: OrbitKind
    altitude: float
    coverage_radius: float
    origin: tuple[float, float] = (0.0, 0.0)
    direction: tuple[float, float] = (1.0, 0.0)
    ground_speed: float = 0.0
    pass_period: float = 0.0

    def __post_init__(self) -> None:
        if not self.altitude > 0:
            raise ValueError("orbit altitude must be positive")
        if not self.coverage_radius > 0:
            raise ValueError("coverage radius must be positive")
        if self.kind == OrbitKind.LEO_TRACK:
            if not self.pass_period > 0:
                raise ValueError("LEO track needs a positive pass period")
            if not self.ground_speed > 0:
                raise ValueError("LEO track needs a positive ground speed")
            norm = math.hypot(*self.direction)
            if norm == 0:
                raise ValueError("track direction must be nonzero")
            object.__setattr__(
                self, "direction", (self.direction[0] / norm, self.direction[1] / norm)
            )
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))

    @property
    def track_length(self) -> float:
        return self.ground_speed * self.pass_period


@dataclass(frozen=True)
class VisibilityWindow:
    start: float
    end: float

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"empty visibility window [{self.start}, {self.end}]")

    @property
    def length(self) -> float:
        return self.end - self.start


def propagation_delay(a: Position, b: Position) -> float:
    return a.distance_to(b) / SPEED_OF_LIGHT


def satellite_position(orbit: OrbitDescriptor, t: float) -> Position:
    if t < 0:
        raise ValueError("time must be nonnegative")
    ox, oy = orbit.origin
    if orbit.kind == OrbitKind.GEO:
        return Position(ox, oy, orbit.altitude)
    s = orbit.ground_speed * math.fmod(t, orbit.pass_period)
    dx, dy = orbit.direction
    return Position(ox + dx * s, oy + dy * s, orbit.altitude)


def node_position(node: Node, t: float = 0.0) -> Position:
    """Position of any node at time ``t``; satellites with an orbit move."""
    if node.orbit is not None:
        return satellite_position(node.orbit, t)
    if node.position is None:
        raise ValueError(f"node {node.id} has no position")
    return node.position


def merge_windows(windows: Sequence[VisibilityWindow]) -> list[VisibilityWindow]:
    """Sort and merge overlapping or touching windows."""
    merged: list[list[float]] = []
    for w in sorted(windows, key=lambda w: (w.start, w.end)):
        if merged and w.start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], w.end)
        else:
            merged.append([w.start, w.end])
    return [VisibilityWindow(a, b) for a, b in merged]


def visibility_windows(
    orbit: OrbitDescriptor,
    ground: Position,
    horizon: float | tuple[float, float],
) -> list[VisibilityWindow]:
    """Maximal intervals during which ``ground`` lies inside the footprint.

    Args:
        horizon: ``T`` for ``[0, T]`` or an explicit ``(start, end)`` pair.
    """
    t0, t1 = (0.0, float(horizon)) if np.isscalar(horizon) else map(float, horizon)
    if not t1 > t0:
        raise ValueError("horizon must have positive length")
    if t0 < 0:
        raise ValueError("horizon must start at t >= 0")
    r = orbit.coverage_radius
    gx, gy = ground.x - orbit.origin[0], ground.y - orbit.origin[1]

    if orbit.kind == OrbitKind.GEO:
        if math.hypot(gx, gy) <= r:
            return [VisibilityWindow(t0, t1)]
        return []

    dx, dy = orbit.direction
    along = gx * dx + gy * dy
    across = abs(-gx * dy + gy * dx)
    if across >= r:
        return []
    half = math.sqrt(r * r - across * across)
    # track coordinates [along - half, along + half] intersected with [0, L)
    lo = max(along - half, 0.0)
    hi = min(along + half, orbit.track_length)
    if not hi > lo:
        return []
    v, period = orbit.ground_speed, orbit.pass_period
    windows = []
    first = math.floor(t0 / period)
    last = math.floor(t1 / period)
    for n in range(first, last + 1):
        a = max(n * period + lo / v, t0)
        b = min(n * period + hi / v, t1)
        if b > a:
            windows.append(VisibilityWindow(a, b))
    return merge_windows(windows)


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def lloyd(
    points: np.ndarray, centers: np.ndarray, max_iter: int = 100
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd iterations from the given initial centers.

    Returns:
        ``(centers, labels, history)`` where ``history`` holds the
        within-cluster sum of squared distances after every assignment step.
        Empty clusters keep their previous center.
    """
    centers = np.array(centers, dtype=float)
    history: list[float] = []
    labels = np.zeros(len(points), dtype=int)
    for _ in range(max_iter):
        d = _sq_dists(points, centers)
        # argmin picks the lowest index on ties
        labels = d.argmin(axis=1)
        history.append(float(d[np.arange(len(points)), labels].sum()))
        new = centers.copy()
        for j in range(len(centers)):
            members = points[labels == j]
            if len(members):
                new[j] = members.mean(axis=0)
        if np.array_equal(new, centers):
            break
        centers = new
    d = _sq_dists(points, centers)
    labels = d.argmin(axis=1)
    final = float(d[np.arange(len(points)), labels].sum())
    if final < history[-1]:
        history.append(final)
    return centers, labels, history


def _kmeanspp_seed(points: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    idx = [int(rng.integers(len(points)))]
    for _ in range(1, n):
        d = _sq_dists(points, points[idx]).min(axis=1)
        total = d.sum()
        if total == 0:
            idx.append(idx[-1])
            continue
        idx.append(int(rng.choice(len(points), p=d / total)))
    return points[idx].copy()


def place_uavs(
    mtd_positions: Sequence[Position],
    n: int,
    altitude: float,
    seed: int = UAV_SEED,
    restarts: int = 8,
) -> list[Position]:
    """Cluster MTD ground positions into ``n`` hovering UAV positions.

    Lloyd clustering is restarted from ``restarts`` D^2-sampled seedings drawn
    from ``seed``; the lowest-cost result wins (first on ties). With ``n`` at
    least the number of MTDs, each MTD gets a UAV overhead and any extra UAVs
    hover over the global centroid.
    """
    if n < 1:
        raise ValueError("need at least one UAV")
    if not mtd_positions:
        raise ValueError("need at least one MTD")
    pts = np.array([[p.x, p.y] for p in mtd_positions], dtype=float)
    if n >= len(pts):
        centroid = pts.mean(axis=0)
        out = [Position(float(x), float(y), altitude) for x, y in pts]
        out += [Position(float(centroid[0]), float(centroid[1]), altitude)] * (n - len(pts))
        return out
    rng = np.random.default_rng(seed)
    best: Optional[tuple[float, np.ndarray]] = None
    for _ in range(restarts):
        centers, _, history = lloyd(pts, _kmeanspp_seed(pts, n, rng))
        if best is None or history[-1] < best[0]:
            best = (history[-1], centers)
    assert best is not None
    return [Position(float(x), float(y), altitude) for x, y in best[1]]


def nearest_association(
    mtds: Sequence[Node], uav_positions: Sequence[Position], t: float = 0.0
) -> dict[str, int]:
    """Map each MTD id to the index of its closest UAV (lowest index on ties)."""
    if not uav_positions:
        raise ValueError("need at least one UAV")
    out = {}
    for m in mtds:
        p = node_position(m, t)
        d = [p.distance_to(u) for u in uav_positions]
        out[m.id] = int(np.argmin(d))
    return out
