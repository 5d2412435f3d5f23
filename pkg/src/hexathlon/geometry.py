"""Scalar 2D geometry kernels: vectors, headings, distances, and time-of-impact solvers.

Everything in this module works on plain floats so the physics step can run
allocation-free. Conventions used across the engine:

- Headings are radians measured clockwise from the +y axis ("compass bearing"),
  normalized to (-pi, pi]. The forward unit vector of heading ``h`` is
  ``(sin h, cos h)``; positive steer turns the body to its right.
- Arcs are counter-clockwise spans from ``start_angle`` to ``end_angle``
  (angles from +x, as usual for atan2); a span of 2*pi is a full circle.
- Time-of-impact solvers return the earliest ``t >= 0`` within ``horizon`` at
  which the disc surface first touches the geometry, ``None`` if there is no
  contact in the window. A disc already in contact yields ``t = 0.0``; the
  ``approaching_only`` flag suppresses that case for resting/separating
  contacts so the stepping loop does not re-resolve settled touches.
"""
from __future__ import annotations

import math
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


class Vec2(NamedTuple):
    """Immutable 2D vector. Components must be finite wherever stored long-term."""

    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def is_finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


def checked_vec2(x: float, y: float) -> Vec2:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite vector components ({x!r}, {y!r})")
    return Vec2(x, y)


def normalize_heading(h: float) -> float:
    """Wrap a heading into (-pi, pi]."""
    h = math.remainder(h, TWO_PI)
    if h <= -math.pi:
        h = math.pi
    return h


def heading_forward(h: float) -> tuple[float, float]:
    """Forward unit vector for a clockwise-from-+y heading."""
    return math.sin(h), math.cos(h)


# ---------------------------------------------------------------------------
# Point / segment / arc distance helpers
# ---------------------------------------------------------------------------

def segment_closest_point(
    px: float, py: float, ax: float, ay: float, ux: float, uy: float, length: float
) -> tuple[float, float]:
    """Closest point on segment (a, a + length*u) to p; u must be unit."""
    t = (px - ax) * ux + (py - ay) * uy
    if t < 0.0:
        t = 0.0
    elif t > length:
        t = length
    return ax + t * ux, ay + t * uy


def dist_point_segment(
    px: float, py: float, ax: float, ay: float, ux: float, uy: float, length: float
) -> float:
    cx, cy = segment_closest_point(px, py, ax, ay, ux, uy, length)
    return math.hypot(px - cx, py - cy)


def dir_in_arc_span(
    dx: float,
    dy: float,
    e0x: float,
    e0y: float,
    e1x: float,
    e1y: float,
    span: float,
) -> bool:
    """Whether direction (dx, dy) from an arc's center lies within its CCW span.

    Uses cross products against the precomputed endpoint direction vectors so
    the hot path never calls atan2. ``span`` is the CCW extent in (0, 2*pi].
    """
    if span >= TWO_PI:
        return True
    c0 = e0x * dy - e0y * dx   # >= 0: d is CCW of e0
    c1 = dx * e1y - dy * e1x   # >= 0: e1 is CCW of d
    if span <= math.pi:
        return c0 >= 0.0 and c1 >= 0.0
    # complement arc is < pi; inside unless strictly inside the complement
    return not (c0 < 0.0 and c1 < 0.0)


def dist_point_arc(
    px: float,
    py: float,
    cx: float,
    cy: float,
    radius: float,
    e0x: float,
    e0y: float,
    e1x: float,
    e1y: float,
    span: float,
) -> float:
    """Distance from a point to an arc (the curved band only, plus endpoints)."""
    dx = px - cx
    dy = py - cy
    d = math.hypot(dx, dy)
    if d > 0.0 and dir_in_arc_span(dx, dy, e0x, e0y, e1x, e1y, span):
        return abs(d - radius)
    # nearest endpoint
    p0x, p0y = cx + radius * e0x, cy + radius * e0y
    p1x, p1y = cx + radius * e1x, cy + radius * e1y
    d0 = math.hypot(px - p0x, py - p0y)
    d1 = math.hypot(px - p1x, py - p1y)
    return d0 if d0 < d1 else d1


# ---------------------------------------------------------------------------
# Time-of-impact solvers
# ---------------------------------------------------------------------------

def toi_disc_point(
    px: float,
    py: float,
    vx: float,
    vy: float,
    radius: float,
    qx: float,
    qy: float,
    horizon: float,
    approaching_only: bool = False,
) -> float | None:
    """Earliest t with |p + t*v - q| = radius."""
    dx = px - qx
    dy = py - qy
    c = dx * dx + dy * dy - radius * radius
    b = dx * vx + dy * vy  # half of the quadratic's b
    if c <= 0.0:
        if approaching_only and b >= 0.0:
            return None
        return 0.0
    a = vx * vx + vy * vy
    if a == 0.0 or b >= 0.0:
        return None  # at rest or moving away
    disc = b * b - a * c
    if disc < 0.0:
        return None
    t = (-b - math.sqrt(disc)) / a
    if t < 0.0:
        t = 0.0
    return t if t <= horizon else None


def toi_disc_disc_kernel(
    px: float, py: float, vx: float, vy: float,
    qx: float, qy: float, wx: float, wy: float,
    contact_dist: float,
    horizon: float,
    approaching_only: bool = False,
) -> float | None:
    """Earliest t with |(p - q) + t*(v - w)| = contact_dist."""
    return toi_disc_point(
        px - qx, py - qy, vx - wx, vy - wy, contact_dist, 0.0, 0.0,
        horizon, approaching_only,
    )


def toi_disc_segment_kernel(
    px: float, py: float, vx: float, vy: float, radius: float,
    ax: float, ay: float, bx: float, by: float,
    ux: float, uy: float, length: float,
    horizon: float,
    approaching_only: bool = False,
) -> float | None:
    """Earliest contact between a moving disc and a fixed segment.

    Tests the interior face (plane contact whose foot lies on the segment) and
    both endpoints, returning the minimum.
    """
    best: float | None = None

    # interior face: signed distance to the line along normal n = (-uy, ux)
    nx, ny = -uy, ux
    rx = px - ax
    ry = py - ay
    s = rx * nx + ry * ny
    vn = vx * nx + vy * ny
    proj0 = rx * ux + ry * uy
    if abs(s) <= radius and 0.0 <= proj0 <= length:
        if not approaching_only or s * vn < 0.0:
            return 0.0
    elif abs(s) > radius and s * vn < 0.0:
        t = (abs(s) - radius) / abs(vn)
        if t <= horizon:
            proj = proj0 + t * (vx * ux + vy * uy)
            if 0.0 <= proj <= length:
                best = t

    for ex, ey in ((ax, ay), (bx, by)):
        t = toi_disc_point(px, py, vx, vy, radius, ex, ey, horizon, approaching_only)
        if t is not None and (best is None or t < best):
            best = t
    return best


def toi_disc_arc_kernel(
    px: float, py: float, vx: float, vy: float, radius: float,
    cx: float, cy: float, arc_radius: float,
    e0x: float, e0y: float, e1x: float, e1y: float, span: float,
    horizon: float,
    approaching_only: bool = False,
) -> float | None:
    """Earliest contact between a moving disc and a fixed arc band.

    Contact happens on the outer circle (distance R + r from the center), on
    the inner circle (R - r, only when R > r), or at an arc endpoint.
    """
    best: float | None = None
    dx = px - cx
    dy = py - cy
    d2 = dx * dx + dy * dy
    a = vx * vx + vy * vy
    b = dx * vx + dy * vy

    d = math.sqrt(d2)
    in_span_now = d > 0.0 and dir_in_arc_span(dx, dy, e0x, e0y, e1x, e1y, span)
    if in_span_now and abs(d - arc_radius) <= radius:
        # touching the band already; approaching if radial distance shrinking
        radial_rate = (b / d) if d > 0.0 else 0.0
        if d >= arc_radius:
            appr = radial_rate < 0.0
        else:
            appr = radial_rate > 0.0
        if not approaching_only or appr:
            return 0.0

    def circle_hits(rc: float, outward: bool) -> None:
        # First touch of the band happens when the center crosses the outer
        # circle moving inward (outward=False) or the inner circle moving
        # outward (outward=True); the opposite crossings are exits.
        nonlocal best
        if rc <= 0.0 or a == 0.0:
            return
        c = d2 - rc * rc
        disc = b * b - a * c
        if disc < 0.0:
            return
        sq = math.sqrt(disc)
        for t in ((-b - sq) / a, (-b + sq) / a):
            if 0.0 <= t <= horizon and (best is None or t < best):
                rate = b + a * t  # sign of d|p(t)-c|^2/dt
                if (rate > 0.0) != outward:
                    continue
                hx = px + t * vx - cx
                hy = py + t * vy - cy
                if dir_in_arc_span(hx, hy, e0x, e0y, e1x, e1y, span):
                    best = t

    circle_hits(arc_radius + radius, outward=False)
    if arc_radius > radius:
        circle_hits(arc_radius - radius, outward=True)

    if span < TWO_PI:
        for ex, ey in ((cx + arc_radius * e0x, cy + arc_radius * e0y),
                       (cx + arc_radius * e1x, cy + arc_radius * e1y)):
            t = toi_disc_point(px, py, vx, vy, radius, ex, ey, horizon, approaching_only)
            if t is not None and (best is None or t < best):
                best = t
    return best


# ---------------------------------------------------------------------------
# Swept-point crossing tests (sensors)
# ---------------------------------------------------------------------------

def swept_point_segment_crossing(
    px: float, py: float, dx: float, dy: float,
    ax: float, ay: float, bx: float, by: float,
) -> float | None:
    """Fraction u in [0, 1] where the path p -> p + d first crosses segment a-b."""
    sx = bx - ax
    sy = by - ay
    denom = dx * sy - dy * sx
    if denom == 0.0:
        return None  # parallel or degenerate; grazing along the line is ignored
    qx = ax - px
    qy = ay - py
    u = (qx * sy - qy * sx) / denom
    if not (0.0 <= u <= 1.0):
        return None
    w = (qx * dy - qy * dx) / denom
    if not (0.0 <= w <= 1.0):
        return None
    return u


def swept_point_circle_crossing(
    px: float, py: float, dx: float, dy: float,
    cx: float, cy: float, radius: float,
    e0x: float = 1.0, e0y: float = 0.0,
    e1x: float = 1.0, e1y: float = 0.0,
    span: float = TWO_PI,
) -> float | None:
    """Fraction u in [0, 1] where the path p -> p + d first meets a circle/arc."""
    rx = px - cx
    ry = py - cy
    a = dx * dx + dy * dy
    if a == 0.0:
        return None
    b = rx * dx + ry * dy
    c = rx * rx + ry * ry - radius * radius
    disc = b * b - a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    for u in ((-b - sq) / a, (-b + sq) / a):
        if 0.0 <= u <= 1.0:
            hx = rx + u * dx
            hy = ry + u * dy
            if dir_in_arc_span(hx, hy, e0x, e0y, e1x, e1y, span):
                return u
    return None
