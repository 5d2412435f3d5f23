"""Map files: a versioned JSON schema, aggregated validation, and fixtures.

A map document looks like::

    {
      "version": 1,
      "name": "running_corridor",
      "kind": "running",
      "bounds": {"w": 700, "h": 700},
      "origin": [0, 0],
      "shapes": [
        {"type": "segment", "a": [250, 10], "b": [250, 620], "material": "elastic"},
        {"type": "circle", "center": [350, 350], "radius": 250,
         "material": "sensor", "tag": "border", "senses": "agents"},
        {"type": "arc", "center": [0, 0], "radius": 40,
         "start_angle": 0.0, "end_angle": 1.57, "material": "sticky"}
      ],
      "spawns": [{"side": "A", "pos": [320, 60], "heading": 0.0},
                 {"side": "B", "pos": [380, 60], "heading": 0.0}],
      "objects": [{"type": "puck", "pos": [350, 350]}],
      "limits": {"max_steps": 500}
    }

Validation never fails fast: every problem is reported with a path to the
offending field. The checksum is the SHA-256 of the canonical (sorted-key,
minimal-whitespace) serialization of the document and ties replays to the
exact map they were produced on.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from . import physics
from .geometry import TWO_PI, Vec2
from .physics import ELASTIC, SENSOR, STICKY, StaticShape

SCHEMA_VERSION = 1

AGENT_RADIUS = 15.0
AGENT_MASS = 1.0

OBJECT_DEFAULTS = {
    "puck": {"radius": 8.0, "mass": 0.3, "kind": physics.PUCK},
    "ball": {"radius": 10.0, "mass": 0.5, "kind": physics.BALL},
    "billiard": {"radius": 10.0, "mass": 0.5, "kind": physics.BILLIARD},
}


class GameKind(str, Enum):
    RUNNING = "running"
    WRESTLING = "wrestling"
    CURLING = "curling"
    TABLE_HOCKEY = "table_hockey"
    FOOTBALL = "football"
    BILLIARD = "billiard"


class MapValidationError(ValueError):
    """Carries every validation problem found in a map document."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid map: " + "; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class EpisodeLimits:
    max_steps: int


@dataclass(frozen=True)
class SpawnPose:
    side: str
    pos: Vec2
    heading: float


@dataclass(frozen=True)
class ObjectSpec:
    type: str                    # puck | ball | billiard | center_point
    pos: Vec2
    radius: float = 0.0
    mass: float = 0.0
    owner: str | None = None


@dataclass(frozen=True)
class MapSpec:
    name: str
    kind: GameKind
    width: float
    height: float
    origin: tuple[float, float]
    shapes: list[StaticShape]
    spawns: dict[str, SpawnPose]
    objects: list[ObjectSpec]
    limits: EpisodeLimits
    checksum: str
    document: dict = field(repr=False)

    def bounds_rect(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin
        return x0, y0, x0 + self.width, y0 + self.height


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def map_checksum(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _num(doc, path, errors, minimum=None, maximum=None) -> float | None:
    if not isinstance(doc, (int, float)) or isinstance(doc, bool) or not math.isfinite(doc):
        errors.append(f"{path}: expected a finite number")
        return None
    v = float(doc)
    if minimum is not None and v < minimum:
        errors.append(f"{path}: must be >= {minimum}")
        return None
    if maximum is not None and v > maximum:
        errors.append(f"{path}: must be <= {maximum}")
        return None
    return v


def _point(doc, path, errors) -> Vec2 | None:
    if not isinstance(doc, list) or len(doc) != 2:
        errors.append(f"{path}: expected [x, y]")
        return None
    x = _num(doc[0], f"{path}[0]", errors)
    y = _num(doc[1], f"{path}[1]", errors)
    if x is None or y is None:
        return None
    return Vec2(x, y)


_SENSES = {"agents": (True, False), "objects": (False, True), "both": (True, True)}


def _parse_shape(doc, path, errors) -> StaticShape | None:
    if not isinstance(doc, dict):
        errors.append(f"{path}: expected an object")
        return None
    known = {"type", "a", "b", "center", "radius", "start_angle", "end_angle",
             "material", "color", "tag", "collides_agents", "collides_objects", "senses"}
    for key in doc:
        if key not in known:
            errors.append(f"{path}.{key}: unknown field")
    stype = doc.get("type")
    material = doc.get("material")
    if material not in physics.MATERIALS:
        errors.append(f"{path}.material: expected one of {sorted(physics.MATERIALS)}")
        return None
    tag = doc.get("tag")
    if tag is not None and not isinstance(tag, str):
        errors.append(f"{path}.tag: expected a string")
        return None
    color = doc.get("color")
    if color is not None and (not isinstance(color, int) or color not in range(9)):
        errors.append(f"{path}.color: expected a registered color code 0..8")
        return None

    if material == SENSOR:
        senses = doc.get("senses", "both")
        if senses not in _SENSES:
            errors.append(f"{path}.senses: expected agents|objects|both")
            return None
        ca, co = _SENSES[senses]
        if "collides_agents" in doc or "collides_objects" in doc:
            errors.append(f"{path}: sensors use 'senses', not collides flags")
            return None
    else:
        if "senses" in doc:
            errors.append(f"{path}.senses: only sensor shapes take 'senses'")
            return None
        ca = doc.get("collides_agents", True)
        co = doc.get("collides_objects", True)
        if not isinstance(ca, bool) or not isinstance(co, bool):
            errors.append(f"{path}: collides flags must be booleans")
            return None

    try:
        if stype == "segment":
            a = _point(doc.get("a"), f"{path}.a", errors)
            b = _point(doc.get("b"), f"{path}.b", errors)
            if a is None or b is None:
                return None
            if a == b:
                errors.append(f"{path}: segment endpoints must be distinct")
                return None
            return StaticShape.segment(a, b, material=material, collides_agents=ca,
                                       collides_objects=co, color_code=color, tag=tag)
        if stype in ("arc", "circle"):
            center = _point(doc.get("center"), f"{path}.center", errors)
            radius = _num(doc.get("radius"), f"{path}.radius", errors)
            if center is None or radius is None:
                return None
            if radius <= 0.0:
                errors.append(f"{path}.radius: must be positive")
                return None
            if stype == "circle":
                a0, a1 = 0.0, 0.0
            else:
                a0 = _num(doc.get("start_angle"), f"{path}.start_angle", errors)
                a1 = _num(doc.get("end_angle"), f"{path}.end_angle", errors)
                if a0 is None or a1 is None:
                    return None
            return StaticShape.arc(center, radius, a0, a1, material=material,
                                   collides_agents=ca, collides_objects=co,
                                   color_code=color, tag=tag)
    except ValueError as exc:
        errors.append(f"{path}: {exc}")
        return None
    errors.append(f"{path}.type: expected segment|arc|circle")
    return None


def _parse_spawn(doc, path, errors) -> SpawnPose | None:
    if not isinstance(doc, dict):
        errors.append(f"{path}: expected an object")
        return None
    side = doc.get("side")
    if side not in ("A", "B"):
        errors.append(f"{path}.side: expected 'A' or 'B'")
        return None
    pos = _point(doc.get("pos"), f"{path}.pos", errors)
    heading = _num(doc.get("heading", 0.0), f"{path}.heading", errors)
    for key in doc:
        if key not in {"side", "pos", "heading"}:
            errors.append(f"{path}.{key}: unknown field")
    if pos is None or heading is None:
        return None
    return SpawnPose(side, pos, heading)


def _parse_object(doc, path, errors) -> ObjectSpec | None:
    if not isinstance(doc, dict):
        errors.append(f"{path}: expected an object")
        return None
    otype = doc.get("type")
    if otype not in ("puck", "ball", "billiard", "center_point"):
        errors.append(f"{path}.type: expected puck|ball|billiard|center_point")
        return None
    pos = _point(doc.get("pos"), f"{path}.pos", errors)
    if pos is None:
        return None
    for key in doc:
        if key not in {"type", "pos", "radius", "mass", "owner"}:
            errors.append(f"{path}.{key}: unknown field")
    if otype == "center_point":
        return ObjectSpec("center_point", pos)
    defaults = OBJECT_DEFAULTS[otype]
    radius = _num(doc.get("radius", defaults["radius"]), f"{path}.radius", errors, minimum=1e-9)
    mass = _num(doc.get("mass", defaults["mass"]), f"{path}.mass", errors, minimum=1e-9)
    owner = doc.get("owner")
    if otype == "billiard":
        if owner not in ("A", "B"):
            errors.append(f"{path}.owner: billiard balls need an owner side 'A' or 'B'")
            return None
    elif owner is not None:
        errors.append(f"{path}.owner: only billiard balls carry an owner")
        return None
    if radius is None or mass is None:
        return None
    return ObjectSpec(otype, pos, radius, mass, owner)


_REQUIRED_TOP = {"version", "name", "kind", "bounds", "shapes", "spawns", "limits"}
_OPTIONAL_TOP = {"origin", "objects"}


def parse_map(text: str) -> MapSpec:
    """Parse and validate a map document; raises MapValidationError with all problems."""
    errors: list[str] = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapValidationError([f"$: not valid JSON ({exc.msg} at line {exc.lineno})"])
    if not isinstance(doc, dict):
        raise MapValidationError(["$: top level must be an object"])

    for key in _REQUIRED_TOP:
        if key not in doc:
            errors.append(f"$.{key}: missing required field")
    for key in doc:
        if key not in _REQUIRED_TOP | _OPTIONAL_TOP:
            errors.append(f"$.{key}: unknown field")
    if doc.get("version") != SCHEMA_VERSION:
        errors.append(f"$.version: expected {SCHEMA_VERSION}")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        errors.append("$.name: expected a non-empty string")
        name = "?"
    kind = None
    try:
        kind = GameKind(doc.get("kind"))
    except ValueError:
        errors.append(f"$.kind: expected one of {[k.value for k in GameKind]}")

    width = height = None
    bounds = doc.get("bounds")
    if isinstance(bounds, dict):
        width = _num(bounds.get("w"), "$.bounds.w", errors, minimum=1.0)
        height = _num(bounds.get("h"), "$.bounds.h", errors, minimum=1.0)
    elif bounds is not None:
        errors.append("$.bounds: expected {w, h}")
    origin = (0.0, 0.0)
    if "origin" in doc:
        pt = _point(doc["origin"], "$.origin", errors)
        if pt is not None:
            origin = (pt.x, pt.y)

    shapes: list[StaticShape] = []
    raw_shapes = doc.get("shapes")
    if isinstance(raw_shapes, list):
        for i, sdoc in enumerate(raw_shapes):
            shape = _parse_shape(sdoc, f"$.shapes[{i}]", errors)
            if shape is not None:
                shapes.append(shape)
    elif raw_shapes is not None:
        errors.append("$.shapes: expected a list")

    spawns: dict[str, SpawnPose] = {}
    raw_spawns = doc.get("spawns")
    if isinstance(raw_spawns, list):
        for i, sdoc in enumerate(raw_spawns):
            spawn = _parse_spawn(sdoc, f"$.spawns[{i}]", errors)
            if spawn is not None:
                if spawn.side in spawns:
                    errors.append(f"$.spawns[{i}]: duplicate side {spawn.side}")
                else:
                    spawns[spawn.side] = spawn
        for side in ("A", "B"):
            if side not in spawns:
                errors.append(f"$.spawns: missing spawn for side {side}")
    elif raw_spawns is not None:
        errors.append("$.spawns: expected a list")

    objects: list[ObjectSpec] = []
    raw_objects = doc.get("objects", [])
    if isinstance(raw_objects, list):
        for i, odoc in enumerate(raw_objects):
            obj = _parse_object(odoc, f"$.objects[{i}]", errors)
            if obj is not None:
                objects.append(obj)
    else:
        errors.append("$.objects: expected a list")

    max_steps = None
    limits = doc.get("limits")
    if isinstance(limits, dict):
        raw = limits.get("max_steps")
        if not isinstance(raw, int) or isinstance(raw, bool) or raw < 1:
            errors.append("$.limits.max_steps: expected a positive integer")
        else:
            max_steps = raw
        for key in limits:
            if key != "max_steps":
                errors.append(f"$.limits.{key}: unknown field")
    elif limits is not None:
        errors.append("$.limits: expected {max_steps}")

    if kind is not None and width is not None and height is not None:
        _validate_semantics(kind, width, height, origin, shapes, spawns, objects, errors)

    if errors:
        raise MapValidationError(errors)
    return MapSpec(
        name=name, kind=kind, width=width, height=height, origin=origin,
        shapes=shapes, spawns=spawns, objects=objects,
        limits=EpisodeLimits(max_steps=max_steps),
        checksum=map_checksum(doc), document=doc)


def _sensor_tags(shapes: list[StaticShape]) -> dict[str, list[StaticShape]]:
    tags: dict[str, list[StaticShape]] = {}
    for s in shapes:
        if s.material == SENSOR and s.tag:
            tags.setdefault(s.tag, []).append(s)
    return tags


def _inside(rect, pos: Vec2, radius: float) -> bool:
    x0, y0, x1, y1 = rect
    return (x0 + radius <= pos.x <= x1 - radius and
            y0 + radius <= pos.y <= y1 - radius)


def _validate_semantics(kind, width, height, origin, shapes, spawns, objects, errors):
    rect = (origin[0], origin[1], origin[0] + width, origin[1] + height)

    discs: list[tuple[str, Vec2, float, bool]] = []  # (path, pos, radius, is_agent)
    for side, spawn in sorted(spawns.items()):
        discs.append((f"$.spawns[{side}]", spawn.pos, AGENT_RADIUS, True))
    for i, obj in enumerate(objects):
        if obj.type != "center_point":
            discs.append((f"$.objects[{i}]", obj.pos, obj.radius, False))

    for path, pos, radius, is_agent in discs:
        if not _inside(rect, pos, radius):
            errors.append(f"{path}: spawn disc leaves the map bounds")
        for s in shapes:
            if s.material == SENSOR:
                continue
            if not (s.collides_agents if is_agent else s.collides_objects):
                continue
            if s.distance_to_point(pos.x, pos.y) < radius:
                errors.append(f"{path}: spawn disc overlaps a colliding shape")
                break
    for i in range(len(discs)):
        for j in range(i + 1, len(discs)):
            pi, pj = discs[i], discs[j]
            if (pi[1] - pj[1]).norm() < pi[2] + pj[2]:
                errors.append(f"{pi[0]} and {pj[0]}: spawn discs overlap")

    tags = _sensor_tags(shapes)
    counts = {t: len(v) for t, v in tags.items()}

    def need_tag(tag: str, senses_agents: bool, label: str) -> None:
        found = tags.get(tag, [])
        if not found:
            errors.append(f"$.shapes: missing {label} (sensor tagged '{tag}')")
            return
        for s in found:
            ok = s.collides_agents if senses_agents else s.collides_objects
            if not ok:
                errors.append(f"$.shapes: sensor '{tag}' must sense "
                              f"{'agents' if senses_agents else 'objects'}")

    obj_types = [o.type for o in objects]
    if kind == GameKind.RUNNING:
        need_tag("finish", True, "goal line")
    elif kind == GameKind.WRESTLING:
        need_tag("border", True, "border line")
    elif kind in (GameKind.TABLE_HOCKEY, GameKind.FOOTBALL):
        need_tag("goal_a", False, "side A goal line")
        need_tag("goal_b", False, "side B goal line")
        expected = "puck" if kind == GameKind.TABLE_HOCKEY else "ball"
        if obj_types.count(expected) != 1:
            errors.append(f"$.objects: {kind.value} needs exactly one {expected}")
        if kind == GameKind.TABLE_HOCKEY:
            mids = [s for s in shapes if s.tag == "midline" and s.material != SENSOR]
            if not mids:
                errors.append("$.shapes: table_hockey needs a shape tagged 'midline'")
            for s in mids:
                if not s.collides_agents or s.collides_objects:
                    errors.append("$.shapes: the midline must block agents only")
    elif kind == GameKind.CURLING:
        need_tag("release", False, "release line")
        if obj_types.count("center_point") != 1:
            errors.append("$.objects: curling needs exactly one center_point")
    elif kind == GameKind.BILLIARD:
        if counts.get("pocket", 0) < 2:
            errors.append("$.shapes: billiard needs at least two pockets")
        for side in ("A", "B"):
            n = sum(1 for o in objects if o.type == "billiard" and o.owner == side)
            if n != 3:
                errors.append(f"$.objects: billiard needs exactly 3 balls owned by {side}")
    allowed = {
        GameKind.TABLE_HOCKEY: {"puck"},
        GameKind.FOOTBALL: {"ball"},
        GameKind.BILLIARD: {"billiard"},
        GameKind.CURLING: {"center_point"},
        GameKind.RUNNING: set(),
        GameKind.WRESTLING: set(),
    }[kind]
    for i, obj in enumerate(objects):
        if obj.type not in allowed:
            errors.append(f"$.objects[{i}]: {obj.type} does not belong in a {kind.value} map")


def load_map(path: str | Path) -> MapSpec:
    return parse_map(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Builtin fixture maps (one per kind), shipped as package data
# ---------------------------------------------------------------------------

BUILTIN_NAMES = {
    GameKind.RUNNING: "running_corridor",
    GameKind.WRESTLING: "wrestling_ring",
    GameKind.CURLING: "curling_sheet",
    GameKind.TABLE_HOCKEY: "table_hockey_rink",
    GameKind.FOOTBALL: "football_pitch",
    GameKind.BILLIARD: "billiard_table",
}


def builtin_map_text(name: str) -> str:
    ref = resources.files("hexathlon").joinpath(f"maps/{name}.json")
    return ref.read_text(encoding="utf-8")


def builtin_map(kind: GameKind) -> MapSpec:
    return parse_map(builtin_map_text(BUILTIN_NAMES[kind]))


def all_builtin_maps() -> dict[GameKind, MapSpec]:
    return {kind: builtin_map(kind) for kind in GameKind}


def mirror_map(spec: MapSpec) -> MapSpec:
    """Reflect a map across the y-axis (x -> -x), keeping sides intact.

    Coordinate negation is exact in floating point, so a mirrored episode with
    sign-flipped steers reproduces the original trajectory mirrored.
    """
    doc = json.loads(json.dumps(spec.document))

    def flip_pt(p):
        return [-p[0], p[1]]

    x0, _ = spec.origin
    doc["origin"] = [-(x0 + spec.width), spec.origin[1]]
    for s in doc.get("shapes", []):
        if s["type"] == "segment":
            s["a"] = flip_pt(s["a"])
            s["b"] = flip_pt(s["b"])
        else:
            s["center"] = flip_pt(s["center"])
            if s["type"] == "arc":
                a0, a1 = s["start_angle"], s["end_angle"]
                # mirror of a CCW span [a0, a1] is the CCW span [pi-a1, pi-a0]
                s["start_angle"] = math.pi - a1
                s["end_angle"] = math.pi - a0
    for sp in doc.get("spawns", []):
        sp["pos"] = flip_pt(sp["pos"])
        sp["heading"] = -sp["heading"]
    for ob in doc.get("objects", []):
        ob["pos"] = flip_pt(ob["pos"])
    return parse_map(json.dumps(doc))
