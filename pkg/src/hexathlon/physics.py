"""Rigid-disc dynamics: control, energy, continuous collision detection, impulses.

The world holds mutable disc bodies and immutable static shapes. One control
step applies damped semi-implicit velocity updates and then advances positions
piecewise, interrupted at the earliest time of impact, so thin walls cannot be
tunnelled through. All arithmetic is scalar float64; identical inputs produce
bit-identical worlds within a build.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import geometry as geo
from .geometry import TWO_PI, Vec2

# body kinds
AGENT = "agent"
BALL = "ball"
PUCK = "puck"
ROCK = "rock"
BILLIARD = "billiard"
BODY_KINDS = frozenset((AGENT, BALL, PUCK, ROCK, BILLIARD))

# shape materials
ELASTIC = "elastic"
STICKY = "sticky"
SENSOR = "sensor"
MATERIALS = frozenset((ELASTIC, STICKY, SENSOR))

# impact-event kinds
DISC_DISC = "disc-disc"
DISC_STATIC = "disc-static"
SENSOR_CROSSING = "sensor-crossing"

_TOI_TIE = 1e-12


class MalformedActionError(ValueError):
    """Raised for actions with non-finite components; callers substitute zeros."""


class ContractViolationError(RuntimeError):
    """An operation was invoked outside its stated preconditions."""


@dataclass(frozen=True)
class Action:
    force: float
    steer: float

    def require_finite(self) -> "Action":
        if not geo.is_finite(self.force, self.steer):
            raise MalformedActionError(
                f"action components must be finite, got force={self.force!r} steer={self.steer!r}"
            )
        return self


ZERO_ACTION = Action(0.0, 0.0)


@dataclass(frozen=True)
class PhysicsParams:
    """Engine constants. Defaults match the shipped scenario maps."""

    tau: float = 0.1                 # seconds per control step
    gamma_agent: float = 0.98        # per-step velocity retention
    gamma_ball: float = 0.99
    gamma_ice: float = 0.96
    mu_sticky: float = 0.1           # post-impact speed multiplier on sticky walls
    f_min: float = -100.0
    f_max: float = 100.0
    steer_max: float = math.pi / 6.0  # radians of heading change per step
    c_energy: float = 0.1            # energy cost per unit force per second
    e_max: float = 1000.0
    max_impacts_per_step: int = 8

    def __post_init__(self) -> None:
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        for g in (self.gamma_agent, self.gamma_ball, self.gamma_ice):
            if not (0.0 < g <= 1.0):
                raise ValueError("gamma factors must lie in (0, 1]")
        if not (0.0 <= self.mu_sticky < 1.0):
            raise ValueError("mu_sticky must lie in [0, 1)")
        if not (self.f_min < 0.0 < self.f_max):
            raise ValueError("force bounds must straddle zero")
        if self.steer_max <= 0.0:
            raise ValueError("steer_max must be positive")


DEFAULT_PARAMS = PhysicsParams()


class DiscBody:
    """A moving disc: agent, ball, puck, curling rock, or billiard ball."""

    __slots__ = (
        "id", "kind", "x", "y", "vx", "vy", "heading", "radius", "mass",
        "energy", "controllable", "owner_side", "color_code", "alive",
    )

    def __init__(
        self,
        id: int,
        kind: str,
        x: float,
        y: float,
        vx: float = 0.0,
        vy: float = 0.0,
        heading: float = 0.0,
        radius: float = 15.0,
        mass: float = 1.0,
        energy: float = 0.0,
        controllable: bool = False,
        owner_side: str | None = None,
        color_code: int = 8,
    ) -> None:
        if kind not in BODY_KINDS:
            raise ValueError(f"unknown body kind {kind!r}")
        if radius <= 0.0 or mass <= 0.0:
            raise ValueError("radius and mass must be positive")
        if not geo.is_finite(x, y, vx, vy, heading):
            raise ValueError("body state must be finite")
        self.id = id
        self.kind = kind
        self.x = x
        self.y = y
        self.vx = vx
        self.vy = vy
        self.heading = geo.normalize_heading(heading)
        self.radius = radius
        self.mass = mass
        self.energy = energy
        self.controllable = controllable
        self.owner_side = owner_side
        self.color_code = color_code
        self.alive = True

    @property
    def position(self) -> Vec2:
        return Vec2(self.x, self.y)

    @property
    def velocity(self) -> Vec2:
        return Vec2(self.vx, self.vy)

    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    def copy(self) -> "DiscBody":
        b = DiscBody.__new__(DiscBody)
        for name in DiscBody.__slots__:
            setattr(b, name, getattr(self, name))
        return b

    def state_tuple(self) -> tuple:
        return (self.id, self.kind, self.x, self.y, self.vx, self.vy,
                self.heading, self.energy, self.controllable, self.alive)

    def __repr__(self) -> str:
        return (f"DiscBody(id={self.id}, kind={self.kind}, pos=({self.x:.3f},{self.y:.3f}), "
                f"v=({self.vx:.3f},{self.vy:.3f}))")


class StaticShape:
    """Fixed map geometry: a segment or an arc with a material and flags.

    Arc spans are counter-clockwise from start_angle to end_angle; a full
    circle is encoded as span 2*pi. Sensor shapes never alter velocities; the
    collides flags of a sensor say which body classes trigger crossing events.
    """

    __slots__ = (
        "kind", "ax", "ay", "bx", "by", "ux", "uy", "length",
        "cx", "cy", "radius", "start_angle", "end_angle", "span",
        "e0x", "e0y", "e1x", "e1y",
        "material", "collides_agents", "collides_objects", "color_code", "tag",
        "xmin", "xmax", "ymin", "ymax",
    )

    def __init__(self, *, material: str, collides_agents: bool, collides_objects: bool,
                 color_code: int, tag: str | None) -> None:
        if material not in MATERIALS:
            raise ValueError(f"unknown material {material!r}")
        if material == SENSOR and not (collides_agents or collides_objects):
            raise ValueError("sensor shape must sense agents, objects, or both")
        self.material = material
        self.collides_agents = collides_agents
        self.collides_objects = collides_objects
        self.color_code = color_code
        self.tag = tag

    @staticmethod
    def segment(a: Vec2, b: Vec2, *, material: str, collides_agents: bool = True,
                collides_objects: bool = True, color_code: int | None = None,
                tag: str | None = None) -> "StaticShape":
        if a == b:
            raise ValueError("segment endpoints must be distinct")
        s = StaticShape(material=material, collides_agents=collides_agents,
                        collides_objects=collides_objects,
                        color_code=_default_color(material) if color_code is None else color_code,
                        tag=tag)
        s.kind = "segment"
        s.ax, s.ay = float(a[0]), float(a[1])
        s.bx, s.by = float(b[0]), float(b[1])
        dx = s.bx - s.ax
        dy = s.by - s.ay
        s.length = math.hypot(dx, dy)
        s.ux = dx / s.length
        s.uy = dy / s.length
        s.xmin, s.xmax = min(s.ax, s.bx), max(s.ax, s.bx)
        s.ymin, s.ymax = min(s.ay, s.by), max(s.ay, s.by)
        return s

    @staticmethod
    def arc(center: Vec2, radius: float, start_angle: float, end_angle: float, *,
            material: str, collides_agents: bool = True, collides_objects: bool = True,
            color_code: int | None = None, tag: str | None = None) -> "StaticShape":
        if radius <= 0.0:
            raise ValueError("arc radius must be positive")
        span = (end_angle - start_angle) % TWO_PI
        if span == 0.0:
            span = TWO_PI  # full circle
        s = StaticShape(material=material, collides_agents=collides_agents,
                        collides_objects=collides_objects,
                        color_code=_default_color(material) if color_code is None else color_code,
                        tag=tag)
        s.kind = "arc"
        s.cx, s.cy = float(center[0]), float(center[1])
        s.radius = float(radius)
        s.start_angle = float(start_angle)
        s.end_angle = float(end_angle)
        s.span = span
        s.e0x, s.e0y = math.cos(start_angle), math.sin(start_angle)
        s.e1x, s.e1y = math.cos(end_angle), math.sin(end_angle)
        s.xmin, s.xmax = s.cx - radius, s.cx + radius
        s.ymin, s.ymax = s.cy - radius, s.cy + radius
        return s

    def is_full_circle(self) -> bool:
        return self.kind == "arc" and self.span >= TWO_PI

    def applies_to(self, body: DiscBody) -> bool:
        return self.collides_agents if body.kind == AGENT else self.collides_objects

    def distance_to_point(self, px: float, py: float) -> float:
        if self.kind == "segment":
            return geo.dist_point_segment(px, py, self.ax, self.ay, self.ux, self.uy, self.length)
        return geo.dist_point_arc(px, py, self.cx, self.cy, self.radius,
                                  self.e0x, self.e0y, self.e1x, self.e1y, self.span)


def _default_color(material: str) -> int:
    from .colors import COLOR_STICKY, COLOR_ELASTIC, COLOR_SENSOR
    return {STICKY: COLOR_STICKY, ELASTIC: COLOR_ELASTIC, SENSOR: COLOR_SENSOR}[material]


@dataclass(frozen=True)
class ImpactEvent:
    """One collision or sensor crossing inside a step, time in [0, tau]."""

    time: float
    kind: str                  # disc-disc | disc-static | sensor-crossing
    body_id: int
    other_id: int              # second body id, or shape index
    point: Vec2
    tag: str | None = None     # sensor tag for crossings

    def as_record(self) -> list:
        return [self.kind, self.time, self.body_id, self.other_id,
                self.point.x, self.point.y, self.tag]


class World:
    """Bodies plus static shapes; body order is stable and drives tie-breaking."""

    def __init__(self, bounds: tuple[float, float], shapes: list[StaticShape],
                 bodies: list[DiscBody] | None = None,
                 origin: tuple[float, float] = (0.0, 0.0)) -> None:
        self.width = float(bounds[0])
        self.height = float(bounds[1])
        self.origin = (float(origin[0]), float(origin[1]))
        self.shapes = shapes
        self.bodies: list[DiscBody] = list(bodies) if bodies else []

    def bounds_rect(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin
        return x0, y0, x0 + self.width, y0 + self.height

    def add_body(self, body: DiscBody) -> DiscBody:
        if any(b.id == body.id for b in self.bodies):
            raise ValueError(f"duplicate body id {body.id}")
        self.bodies.append(body)
        return body

    def body(self, body_id: int) -> DiscBody:
        for b in self.bodies:
            if b.id == body_id:
                return b
        raise KeyError(f"no body with id {body_id}")

    def live_bodies(self) -> list[DiscBody]:
        return [b for b in self.bodies if b.alive]

    def copy(self) -> "World":
        w = World((self.width, self.height), self.shapes, origin=self.origin)
        w.bodies = [b.copy() for b in self.bodies]
        return w

    def state_tuples(self) -> list[tuple]:
        return [b.state_tuple() for b in self.bodies]


def body_gamma(body: DiscBody, params: PhysicsParams) -> float:
    if body.kind == AGENT:
        return params.gamma_agent
    if body.kind == ROCK:
        return params.gamma_agent if body.controllable else params.gamma_ice
    if body.kind == BILLIARD:
        return params.gamma_ice
    return params.gamma_ball  # ball, puck


# ---------------------------------------------------------------------------
# Control
# ---------------------------------------------------------------------------

def apply_control(body: DiscBody, action: Action,
                  params: PhysicsParams) -> tuple[DiscBody, Vec2]:
    """Steer and accelerate a controlled body, paying the energy cost.

    Returns the updated body and the acceleration to feed into step_world.
    With zero energy on entry the body is fatigued: inputs are ignored and the
    body keeps drifting under damping alone.
    """
    action.require_finite()
    out = body.copy()
    if body.energy <= 0.0:
        out.energy = 0.0
        return out, Vec2(0.0, 0.0)
    force = min(max(action.force, params.f_min), params.f_max)
    steer = min(max(action.steer, -params.steer_max), params.steer_max)
    out.heading = geo.normalize_heading(body.heading + steer)
    fx, fy = geo.heading_forward(out.heading)
    scale = force / body.mass
    out.energy = max(0.0, body.energy - params.c_energy * abs(force) * params.tau)
    return out, Vec2(scale * fx, scale * fy)


# ---------------------------------------------------------------------------
# Public time-of-impact operations (unguarded: overlap reports t = 0)
# ---------------------------------------------------------------------------

def toi_disc_segment(position: Vec2, velocity: Vec2, radius: float,
                     segment: StaticShape, horizon: float = math.inf) -> float | None:
    if segment.kind != "segment":
        raise ContractViolationError("toi_disc_segment requires a segment shape")
    if not geo.is_finite(velocity.x, velocity.y):
        raise ValueError("velocity must be finite")
    return geo.toi_disc_segment_kernel(
        position.x, position.y, velocity.x, velocity.y, radius,
        segment.ax, segment.ay, segment.bx, segment.by,
        segment.ux, segment.uy, segment.length, horizon)


def toi_disc_arc(position: Vec2, velocity: Vec2, radius: float,
                 arc: StaticShape, horizon: float = math.inf) -> float | None:
    if arc.kind != "arc":
        raise ContractViolationError("toi_disc_arc requires an arc shape")
    return geo.toi_disc_arc_kernel(
        position.x, position.y, velocity.x, velocity.y, radius,
        arc.cx, arc.cy, arc.radius, arc.e0x, arc.e0y, arc.e1x, arc.e1y, arc.span,
        horizon)


def toi_disc_disc(body_a: DiscBody, body_b: DiscBody,
                  horizon: float = math.inf) -> float | None:
    if not geo.is_finite(body_a.vx, body_a.vy, body_b.vx, body_b.vy):
        raise ValueError("velocities must be finite")
    return geo.toi_disc_disc_kernel(
        body_a.x, body_a.y, body_a.vx, body_a.vy,
        body_b.x, body_b.y, body_b.vx, body_b.vy,
        body_a.radius + body_b.radius, horizon)


# ---------------------------------------------------------------------------
# Impulse resolution
# ---------------------------------------------------------------------------

def resolve_disc_disc(body_a: DiscBody, body_b: DiscBody) -> tuple[Vec2, Vec2]:
    """Perfectly elastic normal impulse between two touching discs.

    Momentum is conserved exactly; a separating contact is returned unchanged.
    """
    nx = body_b.x - body_a.x
    ny = body_b.y - body_a.y
    dist = math.hypot(nx, ny)
    if dist == 0.0:
        return body_a.velocity, body_b.velocity  # coincident centers: undefined normal
    nx /= dist
    ny /= dist
    rel = (body_a.vx - body_b.vx) * nx + (body_a.vy - body_b.vy) * ny
    if rel <= 0.0:
        return body_a.velocity, body_b.velocity  # separating or sliding
    inv_sum = 1.0 / body_a.mass + 1.0 / body_b.mass
    j = 2.0 * rel / inv_sum  # restitution 1
    ja = j / body_a.mass
    jb = j / body_b.mass
    return (Vec2(body_a.vx - ja * nx, body_a.vy - ja * ny),
            Vec2(body_b.vx + jb * nx, body_b.vy + jb * ny))


def _reflect(vx: float, vy: float, nx: float, ny: float,
             scale: float) -> tuple[float, float]:
    vn = vx * nx + vy * ny
    rx = vx - 2.0 * vn * nx
    ry = vy - 2.0 * vn * ny
    return rx * scale, ry * scale


def contact_normal(body: DiscBody, shape: StaticShape) -> tuple[float, float]:
    """Unit normal at the current contact, pointing from the shape toward the body."""
    if shape.kind == "segment":
        cx, cy = geo.segment_closest_point(
            body.x, body.y, shape.ax, shape.ay, shape.ux, shape.uy, shape.length)
    else:
        dx = body.x - shape.cx
        dy = body.y - shape.cy
        d = math.hypot(dx, dy)
        if d > 0.0 and geo.dir_in_arc_span(dx, dy, shape.e0x, shape.e0y,
                                           shape.e1x, shape.e1y, shape.span):
            cx = shape.cx + shape.radius * (dx / d)
            cy = shape.cy + shape.radius * (dy / d)
        else:
            p0x, p0y = shape.cx + shape.radius * shape.e0x, shape.cy + shape.radius * shape.e0y
            p1x, p1y = shape.cx + shape.radius * shape.e1x, shape.cy + shape.radius * shape.e1y
            if math.hypot(body.x - p0x, body.y - p0y) <= math.hypot(body.x - p1x, body.y - p1y):
                cx, cy = p0x, p0y
            else:
                cx, cy = p1x, p1y
    nx = body.x - cx
    ny = body.y - cy
    d = math.hypot(nx, ny)
    if d == 0.0:
        return 0.0, 1.0  # degenerate: center exactly on the geometry
    return nx / d, ny / d


def resolve_disc_static(body: DiscBody, shape: StaticShape,
                        params: PhysicsParams) -> Vec2:
    """Mirror the velocity about the contact normal; sticky walls damp speed."""
    if shape.material == SENSOR:
        raise ContractViolationError("sensor shapes never resolve impulses")
    nx, ny = contact_normal(body, shape)
    if body.vx * nx + body.vy * ny >= 0.0:
        return body.velocity  # separating
    scale = params.mu_sticky if shape.material == STICKY else 1.0
    rx, ry = _reflect(body.vx, body.vy, nx, ny, scale)
    return Vec2(rx, ry)


# ---------------------------------------------------------------------------
# World stepping
# ---------------------------------------------------------------------------

def _guarded_toi_static(b: DiscBody, s: StaticShape, horizon: float) -> float | None:
    if s.kind == "segment":
        return geo.toi_disc_segment_kernel(
            b.x, b.y, b.vx, b.vy, b.radius,
            s.ax, s.ay, s.bx, s.by, s.ux, s.uy, s.length,
            horizon, approaching_only=True)
    return geo.toi_disc_arc_kernel(
        b.x, b.y, b.vx, b.vy, b.radius,
        s.cx, s.cy, s.radius, s.e0x, s.e0y, s.e1x, s.e1y, s.span,
        horizon, approaching_only=True)


def _broad_reject(b: DiscBody, s: StaticShape, reach: float) -> bool:
    return (b.x + reach < s.xmin or b.x - reach > s.xmax or
            b.y + reach < s.ymin or b.y - reach > s.ymax)


def _earliest_impact(world: World, horizon: float, params: PhysicsParams):
    """Scan all candidate pairs; returns (toi, body, other_body|None, shape_index|None).

    Ties within 1e-12 s are broken by ascending (body id, shape/body id).
    """
    candidates: list[tuple[float, int, int, int]] = []  # (toi, body_id, kindflag, other)
    bodies = world.bodies
    n = len(bodies)
    for i in range(n):
        b = bodies[i]
        if not b.alive:
            continue
        moving = b.vx != 0.0 or b.vy != 0.0
        if moving:
            reach = b.radius + (abs(b.vx) + abs(b.vy)) * horizon
            for j, s in enumerate(world.shapes):
                if s.material == SENSOR or not s.applies_to(b):
                    continue
                if _broad_reject(b, s, reach):
                    continue
                t = _guarded_toi_static(b, s, horizon)
                if t is not None:
                    candidates.append((t, b.id, 0, j))
        for k in range(i + 1, n):
            c = bodies[k]
            if not c.alive:
                continue
            if not moving and c.vx == 0.0 and c.vy == 0.0:
                continue
            t = geo.toi_disc_disc_kernel(
                b.x, b.y, b.vx, b.vy, c.x, c.y, c.vx, c.vy,
                b.radius + c.radius, horizon, approaching_only=True)
            if t is not None:
                lo, hi = (b.id, c.id) if b.id < c.id else (c.id, b.id)
                candidates.append((t, lo, 1, hi))
    if not candidates:
        return None
    tmin = min(c[0] for c in candidates)
    group = [c for c in candidates if c[0] <= tmin + _TOI_TIE]
    group.sort(key=lambda c: (c[1], c[2], c[3]))
    return group[0]


def _sensor_sweep(world: World, dt: float, t_base: float, tau: float,
                  events: list[ImpactEvent]) -> None:
    """Collect sensor crossings of body centers over the next dt of motion."""
    for b in world.bodies:
        if not b.alive or (b.vx == 0.0 and b.vy == 0.0):
            continue
        dx = b.vx * dt
        dy = b.vy * dt
        for j, s in enumerate(world.shapes):
            if s.material != SENSOR or not s.applies_to(b):
                continue
            if s.kind == "segment":
                u = geo.swept_point_segment_crossing(
                    b.x, b.y, dx, dy, s.ax, s.ay, s.bx, s.by)
            else:
                u = geo.swept_point_circle_crossing(
                    b.x, b.y, dx, dy, s.cx, s.cy, s.radius,
                    s.e0x, s.e0y, s.e1x, s.e1y, s.span)
            if u is not None:
                events.append(ImpactEvent(
                    time=min(t_base + u * dt, tau),
                    kind=SENSOR_CROSSING,
                    body_id=b.id,
                    other_id=j,
                    point=Vec2(b.x + u * dx, b.y + u * dy),
                    tag=s.tag))


def step_world(world: World, accelerations: dict[int, Vec2],
               params: PhysicsParams) -> tuple[World, list[ImpactEvent]]:
    """Advance the world by one control step of tau seconds.

    Velocities first get the damped semi-implicit update
    ``v <- gamma * (v + a * tau)``; positions then advance along straight
    segments interrupted at each earliest time of impact. A body exceeding
    ``max_impacts_per_step`` is frozen for the remainder of the step.
    """
    w = world.copy()
    return w, step_world_inplace(w, accelerations, params)


def step_world_inplace(w: World, accelerations: dict[int, Vec2],
                       params: PhysicsParams) -> list[ImpactEvent]:
    tau = params.tau
    for b in w.bodies:
        acc = accelerations.get(b.id)
        g = body_gamma(b, params)
        if acc is not None:
            b.vx = g * (b.vx + acc.x * tau)
            b.vy = g * (b.vy + acc.y * tau)
        else:
            b.vx = g * b.vx
            b.vy = g * b.vy

    events: list[ImpactEvent] = []
    impact_counts: dict[int, int] = {}
    frozen: set[int] = set()
    elapsed = 0.0
    max_iter = (params.max_impacts_per_step + 1) * max(1, len(w.bodies)) * 2
    for _ in range(max_iter):
        remaining = tau - elapsed
        if remaining <= 0.0:
            break
        hit = _earliest_impact(w, remaining, params)
        dt = hit[0] if hit is not None else remaining
        if dt > 0.0:
            _sensor_sweep(w, dt, elapsed, tau, events)
            for b in w.bodies:
                if b.alive:
                    b.x += b.vx * dt
                    b.y += b.vy * dt
            elapsed += dt
        if hit is None:
            break
        _, bid, kindflag, other = hit
        if kindflag == 0:
            b = w.body(bid)
            s = w.shapes[other]
            v = resolve_disc_static(b, s, params)
            b.vx, b.vy = v.x, v.y
            nx, ny = contact_normal(b, s)
            events.append(ImpactEvent(
                time=elapsed, kind=DISC_STATIC, body_id=bid, other_id=other,
                point=Vec2(b.x - nx * b.radius, b.y - ny * b.radius)))
            _bump_impacts(b, impact_counts, frozen, params)
        else:
            b = w.body(bid)
            c = w.body(other)
            va, vb = resolve_disc_disc(b, c)
            b.vx, b.vy = va.x, va.y
            c.vx, c.vy = vb.x, vb.y
            gap = math.hypot(c.x - b.x, c.y - b.y)
            frac = b.radius / gap if gap > 0.0 else 0.5
            events.append(ImpactEvent(
                time=elapsed, kind=DISC_DISC, body_id=bid, other_id=other,
                point=Vec2(b.x + (c.x - b.x) * frac, b.y + (c.y - b.y) * frac)))
            _bump_impacts(b, impact_counts, frozen, params)
            _bump_impacts(c, impact_counts, frozen, params)
        for fid in frozen:
            fb = w.body(fid)
            fb.vx = 0.0
            fb.vy = 0.0
    events.sort(key=lambda e: (e.time, e.body_id, e.other_id))
    return events


def _bump_impacts(body: DiscBody, counts: dict[int, int], frozen: set[int],
                  params: PhysicsParams) -> None:
    counts[body.id] = counts.get(body.id, 0) + 1
    if counts[body.id] >= params.max_impacts_per_step:
        frozen.add(body.id)


def max_penetration(world: World) -> float:
    """Deepest overlap of any live body into colliding geometry or another body."""
    worst = 0.0
    bodies = world.live_bodies()
    for i, b in enumerate(bodies):
        for s in world.shapes:
            if s.material == SENSOR or not s.applies_to(b):
                continue
            if _broad_reject(b, s, b.radius):
                continue
            pen = b.radius - s.distance_to_point(b.x, b.y)
            if pen > worst:
                worst = pen
        for c in bodies[i + 1:]:
            pen = (b.radius + c.radius) - math.hypot(c.x - b.x, c.y - b.y)
            if pen > worst:
                worst = pen
    return worst
