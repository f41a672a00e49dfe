"""T-intersection lane geometry.

The junction centre is the origin. The left leg runs along -x, the right
leg along +x and the base leg along -y. With right-hand traffic and a lane
offset ``h = lane_width / 2``:

* eastbound traffic (from L, or towards R) uses ``y = -h``
* westbound traffic (from R, or towards L) uses ``y = +h``
* northbound traffic (from B) uses ``x = +h``; southbound (towards B) ``x = -h``

Turning paths are polylines with a single corner where the inbound and
outbound lane lines meet, so the four lane crossings inside the junction
box are the conflict points::

    c3 (-h, +h)   c2 (+h, +h)
    c4 (-h, -h)   c1 (+h, -h)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from ..hyperspace import ConflictInteraction, Hyperspace
from .config import GeometryConfig

Point = tuple[float, float]

CROSSING_TOLERANCE = 0.5  # m
_MIN_CROSSING_ANGLE = math.radians(30.0)
_EPS = 1e-9


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        acc = [0.0]
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            acc.append(acc[-1] + math.hypot(x1 - x0, y1 - y0))
        object.__setattr__(self, "_cum", tuple(acc))

    @property
    def length(self) -> float:
        return self._cum[-1]

    def _segment(self, s: float) -> int:
        cum = self._cum
        for i in range(len(cum) - 2):
            if s < cum[i + 1]:
                return i
        return len(cum) - 2

    def pose(self, s: float) -> tuple[float, float, float]:
        """Position and heading at arc length ``s`` (extrapolated past the ends)."""
        i = self._segment(s)
        (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
        seg = self._cum[i + 1] - self._cum[i]
        t = (s - self._cum[i]) / seg
        return x0 + t * (x1 - x0), y0 + t * (y1 - y0), math.atan2(y1 - y0, x1 - x0)

    def project(self, p: Point) -> float:
        """Arc length of the closest point of the path to ``p``."""
        best, best_s = math.inf, 0.0
        for i, ((x0, y0), (x1, y1)) in enumerate(zip(self.points, self.points[1:])):
            dx, dy = x1 - x0, y1 - y0
            seg2 = dx * dx + dy * dy
            t = min(1.0, max(0.0, ((p[0] - x0) * dx + (p[1] - y0) * dy) / seg2))
            d = math.hypot(x0 + t * dx - p[0], y0 + t * dy - p[1])
            if d < best - _EPS:
                best, best_s = d, self._cum[i] + t * math.sqrt(seg2)
        return best_s

    def heading_before(self, s: float) -> float:
        """Heading of travel when arriving at arc length ``s``."""
        return self.pose(max(0.0, s - 1e-6))[2]


@dataclass(frozen=True)
class IntersectionGeometry:
    lane_width: float
    leg_length: float
    conflict_points: dict[str, Point]
    paths: dict[tuple[str, str], Path]
    legs: dict[str, tuple[Point, Point]]

    def path(self, start: str, goal: str) -> Path:
        return self.paths[(start, goal)]


def _seg_intersections(a0: Point, a1: Point, b0: Point, b1: Point) -> list[float]:
    """Parameters ``t`` along segment a where it meets segment b."""
    rx, ry = a1[0] - a0[0], a1[1] - a0[1]
    sx, sy = b1[0] - b0[0], b1[1] - b0[1]
    qpx, qpy = b0[0] - a0[0], b0[1] - a0[1]
    denom = rx * sy - ry * sx
    if abs(denom) < _EPS:
        if abs(qpx * ry - qpy * rx) > _EPS:
            return []
        rr = rx * rx + ry * ry
        t0 = (qpx * rx + qpy * ry) / rr
        t1 = t0 + (sx * rx + sy * ry) / rr
        lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
        return [lo] if lo <= hi + _EPS else []
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    if -_EPS <= t <= 1 + _EPS and -_EPS <= u <= 1 + _EPS:
        return [min(1.0, max(0.0, t))]
    return []


def first_crossing(av: Path, ov: Path) -> Point | None:
    """First point along the AV path that also lies on the OV path."""
    for a0, a1 in zip(av.points, av.points[1:]):
        ts = [t for b0, b1 in zip(ov.points, ov.points[1:])
              for t in _seg_intersections(a0, a1, b0, b1)]
        if ts:
            t = min(ts)
            return a0[0] + t * (a1[0] - a0[0]), a0[1] + t * (a1[1] - a0[1])
    return None


def crossing_angle(av: Path, ov: Path, p: Point) -> float:
    """Angle between the two arrival headings at ``p``, in [0, pi]."""
    ha = av.heading_before(av.project(p))
    hb = ov.heading_before(ov.project(p))
    d = abs((ha - hb + math.pi) % (2 * math.pi) - math.pi)
    return d


def check_interaction(geom: IntersectionGeometry, ci: ConflictInteraction) -> Point:
    """Verify an interaction against the geometry and return its crossing point."""
    av = geom.path(ci.av_start, ci.av_goal)
    ov = geom.path(ci.ov_start, ci.ov_goal)
    p = first_crossing(av, ov)
    if p is None:
        raise GeometryError(f"{ci}: paths never meet")
    cx, cy = geom.conflict_points[ci.conflict_point]
    miss = math.hypot(p[0] - cx, p[1] - cy)
    if miss > CROSSING_TOLERANCE:
        nearest = min(geom.conflict_points,
                      key=lambda k: math.dist(geom.conflict_points[k], p))
        raise GeometryError(
            f"{ci}: paths first meet {miss:.2f} m from {ci.conflict_point} (nearest {nearest})")
    if crossing_angle(av, ov, p) < _MIN_CROSSING_ANGLE:
        raise GeometryError(f"{ci}: vehicles approach the conflict point in parallel")
    return p


def build_geometry(params: GeometryConfig = GeometryConfig(),
                   interactions: Iterable[ConflictInteraction] | Hyperspace = ()) -> IntersectionGeometry:
    """Lay out the T-intersection and check every given interaction against it."""
    w, ll = params.lane_width, params.leg_length
    if not w > 0:
        raise GeometryError("lane_width must be positive")
    h = w / 2
    if not ll > 4 * w:
        raise GeometryError("leg_length too short for the junction box")

    inbound = {"L": ((-ll, -h), "y", -h), "R": ((ll, h), "y", h), "B": ((h, -ll), "x", h)}
    outbound = {"L": ((-ll, h), "y", h), "R": ((ll, -h), "y", -h), "B": ((-h, -ll), "x", -h)}
    paths: dict[tuple[str, str], Path] = {}
    for s, (start, s_axis, s_off) in inbound.items():
        for g, (end, g_axis, g_off) in outbound.items():
            if s == g:
                continue
            if s_axis == g_axis:
                pts = (start, end)
            elif s_axis == "y":
                pts = (start, (g_off, s_off), end)
            else:
                pts = (start, (s_off, g_off), end)
            paths[(s, g)] = Path(pts)

    geom = IntersectionGeometry(
        lane_width=w,
        leg_length=ll,
        conflict_points={"c1": (h, -h), "c2": (h, h), "c3": (-h, h), "c4": (-h, -h)},
        paths=paths,
        legs={"L": ((0.0, 0.0), (-ll, 0.0)), "R": ((0.0, 0.0), (ll, 0.0)),
              "B": ((0.0, 0.0), (0.0, -ll))},
    )
    if isinstance(interactions, Hyperspace):
        interactions = [lab.interaction for lab in interactions.labels]
    for ci in interactions:
        check_interaction(geom, ci)
    return geom
