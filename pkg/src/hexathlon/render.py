"""Offline frame export: replay records to binary PPM images, one unit per pixel.

Frames are drawn straight from the replay record and the map file; nothing is
re-simulated. Identical inputs produce identical bytes.
"""
from __future__ import annotations

import numpy as np

from . import colors as col
from .maps import MapSpec
from .observation import _paint_arc_band, _paint_capsule, _paint_disc
from .physics import AGENT, ELASTIC, SENSOR, STICKY
from .runner import EpisodeRecord

WALL_HALF_WIDTH = 2.0


class FrameImage:
    """An RGB raster with deterministic PPM serialization."""

    def __init__(self, pixels: np.ndarray):
        self.pixels = pixels  # (H, W, 3) uint8

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def ppm_bytes(self) -> bytes:
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + self.pixels.tobytes()

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.ppm_bytes())


def _pixel_grids(spec: MapSpec) -> tuple[np.ndarray, np.ndarray, int, int]:
    width = int(round(spec.width))
    height = int(round(spec.height))
    x0, y0 = spec.origin
    xs = x0 + np.arange(width, dtype=np.float64) + 0.5
    ys = y0 + spec.height - (np.arange(height, dtype=np.float64) + 0.5)
    xg = np.broadcast_to(xs[np.newaxis, :], (height, width)).copy()
    yg = np.broadcast_to(ys[:, np.newaxis], (height, width)).copy()
    return xg, yg, width, height


def _shape_tier(material: str) -> int:
    return {ELASTIC: 0, STICKY: 1, SENSOR: 2}[material]


def render_frame(spec: MapSpec, bodies: list[dict]) -> FrameImage:
    """Draw one frame. ``bodies`` entries carry id/kind/owner/radius/x/y/alive."""
    xg, yg, width, height = _pixel_grids(spec)
    codes = np.zeros((height, width), dtype=np.int16)
    box = (float(xg[0, 0] - 1.0), float(xg[0, -1] + 1.0),
           float(yg[-1, 0] - 1.0), float(yg[0, 0] + 1.0))
    for tier in (0, 1, 2):
        for shape in spec.shapes:
            if _shape_tier(shape.material) != tier:
                continue
            if shape.kind == "segment":
                _paint_capsule(codes, xg, yg, shape.ax, shape.ay, shape.bx, shape.by,
                               WALL_HALF_WIDTH, shape.color_code, box)
            else:
                _paint_arc_band(codes, xg, yg, shape.cx, shape.cy, shape.radius,
                                shape.e0x, shape.e0y, shape.e1x, shape.e1y,
                                shape.span, WALL_HALF_WIDTH, shape.color_code, box)
    ordered = sorted(bodies, key=lambda b: (b["kind"] == AGENT, b["id"]))
    for b in ordered:
        if not b.get("alive", True):
            continue
        if b["kind"] == AGENT:
            code = col.COLOR_SELF if b["owner"] == "A" else col.COLOR_OPPONENT
        elif b["owner"] is None:
            code = col.COLOR_NEUTRAL_OBJECT
        else:
            code = col.COLOR_OWN_OBJECT if b["owner"] == "A" else col.COLOR_OPP_OBJECT
        _paint_disc(codes, xg, yg, b["x"], b["y"], b["radius"], code, box)

    pixels = np.empty((height, width, 3), dtype=np.uint8)
    lut = np.zeros((9, 3), dtype=np.uint8)
    for code, rgb in col.RGB_TABLE.items():
        lut[code] = rgb
    pixels[:] = lut[codes]
    return FrameImage(pixels)


def frames_from_record(record: EpisodeRecord, spec: MapSpec,
                       every_k: int) -> list[tuple[int, FrameImage]]:
    """Frames at steps 0, k, 2k, ...; count = floor(steps / k) + 1."""
    if every_k < 1:
        raise ValueError("every_k must be >= 1")
    roster: dict[int, dict] = {}
    for entry in record.header["roster"]:
        roster[entry["id"]] = dict(entry, alive=True)
    frames = [(0, render_frame(spec, list(roster.values())))]
    for entry in record.steps:
        for spawned in entry.get("new_bodies", []):
            roster[spawned["id"]] = dict(spawned, alive=True)
        for bid, x, y, vx, vy, heading, energy, alive in entry["bodies"]:
            info = roster[bid]
            info["x"] = x
            info["y"] = y
            info["heading"] = heading
            info["alive"] = bool(alive)
        if entry["t"] % every_k == 0:
            frames.append((entry["t"], render_frame(spec, list(roster.values()))))
    return frames
