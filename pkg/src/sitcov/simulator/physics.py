"""Vehicle kinematics, braking and footprint overlap."""

from __future__ import annotations

import math
from dataclasses import dataclass

G_ACCEL = 9.81
_TOUCH_EPS = 1e-9


@dataclass
class VehicleState:
    """Kinematic state of one vehicle.

    ``progress`` is the arc length along the vehicle's path; the pose is
    derived from it, except for a swerving OV, which moves freely.
    """

    progress: float
    speed: float
    half_length: float
    half_width: float
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0

    @property
    def position(self) -> tuple[float, float]:
        return self.x, self.y

    @property
    def pose(self) -> tuple[float, float, float]:
        return self.x, self.y, self.heading


def braking_distance(speed: float, friction: float, g_accel: float = G_ACCEL) -> float:
    return speed * speed / (2.0 * friction * g_accel)


def brake_step(speed: float, decel: float, dt: float) -> tuple[float, float]:
    """New speed and distance travelled over one step of constant deceleration."""
    if speed <= 0.0:
        return 0.0, 0.0
    t_stop = speed / decel
    if t_stop <= dt:
        return 0.0, speed * t_stop / 2.0
    new = speed - decel * dt
    return new, (speed + new) / 2.0 * dt


def corners(x: float, y: float, heading: float, half_length: float,
            half_width: float) -> list[tuple[float, float]]:
    c, s = math.cos(heading), math.sin(heading)
    out = []
    for lx, ly in ((half_length, half_width), (-half_length, half_width),
                   (-half_length, -half_width), (half_length, -half_width)):
        out.append((x + lx * c - ly * s, y + lx * s + ly * c))
    return out


def obb_overlap(a: VehicleState, b: VehicleState) -> bool:
    """Separating-axis test on the two rectangular footprints (touching counts)."""
    ca = corners(a.x, a.y, a.heading, a.half_length, a.half_width)
    cb = corners(b.x, b.y, b.heading, b.half_length, b.half_width)
    for h in (a.heading, b.heading):
        for ax, ay in ((math.cos(h), math.sin(h)), (-math.sin(h), math.cos(h))):
            pa = [px * ax + py * ay for px, py in ca]
            pb = [px * ax + py * ay for px, py in cb]
            if min(pa) > max(pb) + _TOUCH_EPS or min(pb) > max(pa) + _TOUCH_EPS:
                return False
    return True


def contact_distance(half_length: float, half_width: float) -> float:
    """Largest centre distance at which two equal footprints can still touch."""
    return 2.0 * math.hypot(half_length, half_width)


def collision_check(a: VehicleState, b: VehicleState) -> bool:
    reach = math.hypot(a.half_length, a.half_width) + math.hypot(b.half_length, b.half_width)
    if math.hypot(a.x - b.x, a.y - b.y) > reach + _TOUCH_EPS:
        return False
    return obb_overlap(a, b)
