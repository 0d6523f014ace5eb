"""Small planar geometry helpers shared across modules."""

from __future__ import annotations

import math


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


def rot(theta: float, x: float, y: float) -> tuple[float, float]:
    """Rotate (x, y) by theta about the origin."""
    c = math.cos(theta)
    s = math.sin(theta)
    return (c * x - s * y, s * x + c * y)


def point_segment_distance(px: float, py: float, ax: float, ay: float,
                           bx: float, by: float) -> tuple[float, float, float]:
    """Distance from point P to segment AB.

    Returns (distance, qx, qy) where Q is the closest point on the segment.
    """
    abx = bx - ax
    aby = by - ay
    denom = abx * abx + aby * aby
    if denom == 0.0:
        qx, qy = ax, ay
    else:
        t = ((px - ax) * abx + (py - ay) * aby) / denom
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        qx = ax + t * abx
        qy = ay + t * aby
    return (math.hypot(px - qx, py - qy), qx, qy)


def point_in_polygon(px: float, py: float, poly: tuple[tuple[float, float], ...]) -> bool:
    """Even-odd rule point-in-polygon test (boundary not guaranteed either way)."""
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xcross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xcross:
                inside = not inside
    return inside
