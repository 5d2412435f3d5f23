"""Egocentric grid observations: each agent sees a small window ahead of it.

The square vision window sits ``forward_offset`` ahead of the viewer along its
heading and is split into ``grid_size`` x ``grid_size`` cells. Each cell takes
the color of the highest-priority object covering its center point
(self > opponent > dynamic objects > sensors > sticky > elastic > background).
Nothing outside the window is visible, and no absolute pose is exposed:
observations are the grid plus an energy fraction and a controllable flag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import colors as col
from .geometry import Vec2
from .physics import AGENT, SENSOR, STICKY, ELASTIC, DiscBody, StaticShape, World


@dataclass(frozen=True)
class VisionParams:
    window_side: float = 200.0
    forward_offset: float = 80.0
    grid_size: int = 40
    line_half_width: float = 3.0   # render half-thickness of walls and sensor lines

    def __post_init__(self) -> None:
        if self.window_side <= 0.0:
            raise ValueError("window_side must be positive")
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")


DEFAULT_VISION = VisionParams()


@dataclass
class AgentObservation:
    """What one side perceives for one step."""

    grid: np.ndarray            # (G, G) int16, row 0 farthest ahead, col 0 leftmost
    energy_fraction: float
    controllable: bool

    def flat_grid(self) -> list[int]:
        return [int(v) for v in self.grid.reshape(-1)]


def world_to_agent_frame(point: Vec2, agent_pose: tuple[Vec2, float]) -> Vec2:
    """Translate then rotate so the agent sits at the origin facing +y."""
    (px, py), heading = agent_pose
    c = math.cos(heading)
    s = math.sin(heading)
    dx = point[0] - px
    dy = point[1] - py
    return Vec2(c * dx - s * dy, s * dx + c * dy)


_CENTER_CACHE: dict[tuple[float, float, int], tuple[np.ndarray, np.ndarray]] = {}


def _cell_centers(vision: VisionParams) -> tuple[np.ndarray, np.ndarray]:
    key = (vision.window_side, vision.forward_offset, vision.grid_size)
    cached = _CENTER_CACHE.get(key)
    if cached is not None:
        return cached
    g = vision.grid_size
    cell = vision.window_side / g
    half = vision.window_side / 2.0
    top = vision.forward_offset + half
    xs = (np.arange(g, dtype=np.float64) + 0.5) * cell - half
    ys = top - (np.arange(g, dtype=np.float64) + 0.5) * cell
    x_grid = np.broadcast_to(xs[np.newaxis, :], (g, g)).copy()
    y_grid = np.broadcast_to(ys[:, np.newaxis], (g, g)).copy()
    _CENTER_CACHE[key] = (x_grid, y_grid)
    return x_grid, y_grid


def _window_box(vision: VisionParams) -> tuple[float, float, float, float]:
    half = vision.window_side / 2.0
    return (-half, half, vision.forward_offset - half, vision.forward_offset + half)


def _paint_disc(grid, xg, yg, cx, cy, radius, code, box) -> None:
    if (cx + radius < box[0] or cx - radius > box[1] or
            cy + radius < box[2] or cy - radius > box[3]):
        return
    d2 = (xg - cx) ** 2 + (yg - cy) ** 2
    grid[d2 <= radius * radius] = code


def _paint_capsule(grid, xg, yg, ax, ay, bx, by, hw, code, box) -> None:
    if (max(ax, bx) + hw < box[0] or min(ax, bx) - hw > box[1] or
            max(ay, by) + hw < box[2] or min(ay, by) - hw > box[3]):
        return
    ux = bx - ax
    uy = by - ay
    length = math.hypot(ux, uy)
    ux /= length
    uy /= length
    dx = xg - ax
    dy = yg - ay
    t = np.clip(dx * ux + dy * uy, 0.0, length)
    ex = dx - t * ux
    ey = dy - t * uy
    grid[ex * ex + ey * ey <= hw * hw] = code


def _paint_arc_band(grid, xg, yg, cx, cy, radius, e0x, e0y, e1x, e1y, span,
                    hw, code, box) -> None:
    reach = radius + hw
    if (cx + reach < box[0] or cx - reach > box[1] or
            cy + reach < box[2] or cy - reach > box[3]):
        return
    dx = xg - cx
    dy = yg - cy
    d2 = dx * dx + dy * dy
    rin = radius - hw
    mask = (d2 <= (radius + hw) * (radius + hw))
    if rin > 0.0:
        mask &= (d2 >= rin * rin)
    if span < 2.0 * math.pi:
        c0 = e0x * dy - e0y * dx
        c1 = dx * e1y - dy * e1x
        if span <= math.pi:
            mask &= (c0 >= 0.0) & (c1 >= 0.0)
        else:
            mask &= ~((c0 < 0.0) & (c1 < 0.0))
    grid[mask] = code


def _shape_priority(shape: StaticShape) -> int:
    return {ELASTIC: 0, STICKY: 1, SENSOR: 2}[shape.material]


def render_view(world: World, pose: tuple[Vec2, float], observer_side: str | None,
                viewer_id: int | None, vision: VisionParams = DEFAULT_VISION,
                energy_fraction: float = 0.0,
                controllable: bool = False) -> AgentObservation:
    """Render the grid seen from an arbitrary pose (used for virtual anchors too)."""
    (px, py), heading = pose
    c = math.cos(heading)
    s = math.sin(heading)

    def to_af(wx: float, wy: float) -> tuple[float, float]:
        dx = wx - px
        dy = wy - py
        return c * dx - s * dy, s * dx + c * dy

    xg, yg = _cell_centers(vision)
    box = _window_box(vision)
    grid = np.zeros((vision.grid_size, vision.grid_size), dtype=np.int16)
    hw = vision.line_half_width

    for priority in (0, 1, 2):  # elastic, sticky, sensor
        for shape in world.shapes:
            if _shape_priority(shape) != priority:
                continue
            if shape.kind == "segment":
                ax, ay = to_af(shape.ax, shape.ay)
                bx, by = to_af(shape.bx, shape.by)
                _paint_capsule(grid, xg, yg, ax, ay, bx, by, hw, shape.color_code, box)
            else:
                acx, acy = to_af(shape.cx, shape.cy)
                # rotate the span endpoint directions into the agent frame
                e0x = c * shape.e0x - s * shape.e0y
                e0y = s * shape.e0x + c * shape.e0y
                e1x = c * shape.e1x - s * shape.e1y
                e1y = s * shape.e1x + c * shape.e1y
                _paint_arc_band(grid, xg, yg, acx, acy, shape.radius,
                                e0x, e0y, e1x, e1y, shape.span,
                                hw, shape.color_code, box)

    others = [b for b in world.bodies if b.alive and b.kind != AGENT and b.id != viewer_id]
    agents = [b for b in world.bodies if b.alive and b.kind == AGENT and b.id != viewer_id]
    viewer = [b for b in world.bodies if b.alive and b.id == viewer_id]
    for b in others + agents + viewer:
        code = col.body_color_code(b.kind, b.id, b.owner_side, viewer_id, observer_side)
        bx, by = to_af(b.x, b.y)
        _paint_disc(grid, xg, yg, bx, by, b.radius, code, box)

    return AgentObservation(grid=grid, energy_fraction=energy_fraction,
                            controllable=controllable)


def render_observation(world: World, agent_id: int,
                       vision: VisionParams = DEFAULT_VISION,
                       e_max: float = 1000.0) -> AgentObservation:
    """Render what the given agent body sees right now."""
    body = world.body(agent_id)  # raises KeyError for unknown ids
    frac = body.energy / e_max if e_max > 0.0 else 0.0
    frac = min(max(frac, 0.0), 1.0)
    return render_view(world, (Vec2(body.x, body.y), body.heading),
                       body.owner_side, agent_id, vision,
                       energy_fraction=frac, controllable=body.controllable)
