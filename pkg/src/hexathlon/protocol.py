"""Newline-delimited wire protocol between the engine and external agents.

One JSON object per line, UTF-8. Engine to agent: ``hello``, ``reset``,
``observe``, ``result``. Agent to engine: ``ready``, ``act``. Decoding ignores
unknown fields for forward compatibility and rejects non-finite numbers;
every ``observe`` must be answered by exactly one ``act`` before the step
deadline.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import PROTOCOL_VERSION

# error codes
E_SYNTAX = "syntax"
E_UNKNOWN_TYPE = "unknown-type"
E_NON_FINITE = "non-finite"
E_BAD_FIELD = "bad-field"


class ProtocolError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class Hello:
    protocol_version: int = PROTOCOL_VERSION
    grid_size: int = 40
    limits: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Ready:
    name: str = "agent"


@dataclass(frozen=True)
class Reset:
    episode_index: int
    side: str


@dataclass(frozen=True)
class Observe:
    step: int
    grid: tuple[int, ...]
    energy_fraction: float
    controllable: bool


@dataclass(frozen=True)
class ActMsg:
    force: float
    steer: float


@dataclass(frozen=True)
class Result:
    outcome: str
    reason: str


ProtocolMessage = Hello | Ready | Reset | Observe | ActMsg | Result

_TYPE_NAMES = {
    Hello: "hello", Ready: "ready", Reset: "reset",
    Observe: "observe", ActMsg: "act", Result: "result",
}


def encode_message(msg: ProtocolMessage) -> str:
    """One canonical line (no newline) for any protocol message."""
    if isinstance(msg, Hello):
        body = {"protocol_version": msg.protocol_version,
                "grid_size": msg.grid_size, "limits": msg.limits}
    elif isinstance(msg, Ready):
        body = {"name": msg.name}
    elif isinstance(msg, Reset):
        body = {"episode_index": msg.episode_index, "side": msg.side}
    elif isinstance(msg, Observe):
        body = {"step": msg.step, "grid": list(msg.grid),
                "energy_fraction": msg.energy_fraction,
                "controllable": msg.controllable}
    elif isinstance(msg, ActMsg):
        body = {"force": msg.force, "steer": msg.steer}
    elif isinstance(msg, Result):
        body = {"outcome": msg.outcome, "reason": msg.reason}
    else:
        raise TypeError(f"not a protocol message: {msg!r}")
    body["type"] = _TYPE_NAMES[type(msg)]
    return json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _finite_number(doc: dict, key: str) -> float:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ProtocolError(E_BAD_FIELD, f"{key!r} must be a number")
    if not math.isfinite(v):
        raise ProtocolError(E_NON_FINITE, f"{key!r} must be finite")
    return float(v)


def _int_field(doc: dict, key: str, minimum: int = 0) -> int:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ProtocolError(E_BAD_FIELD, f"{key!r} must be an integer >= {minimum}")
    return v


def decode_message(line: str) -> ProtocolMessage:
    """Parse one line; unknown fields are ignored, malformed input raises."""
    def reject_nonfinite(token: str):
        raise ProtocolError(E_NON_FINITE, f"non-finite literal {token}")

    try:
        doc = json.loads(line, parse_constant=reject_nonfinite)
    except json.JSONDecodeError as exc:
        raise ProtocolError(E_SYNTAX, f"not valid JSON: {exc.msg}")
    if not isinstance(doc, dict):
        raise ProtocolError(E_SYNTAX, "message must be a JSON object")
    mtype = doc.get("type")
    if mtype == "hello":
        limits = doc.get("limits", {})
        if not isinstance(limits, dict):
            raise ProtocolError(E_BAD_FIELD, "'limits' must be an object")
        return Hello(protocol_version=_int_field(doc, "protocol_version", 1),
                     grid_size=_int_field(doc, "grid_size", 2),
                     limits=limits)
    if mtype == "ready":
        name = doc.get("name", "agent")
        if not isinstance(name, str):
            raise ProtocolError(E_BAD_FIELD, "'name' must be a string")
        return Ready(name=name)
    if mtype == "reset":
        side = doc.get("side")
        if side not in ("A", "B"):
            raise ProtocolError(E_BAD_FIELD, "'side' must be 'A' or 'B'")
        return Reset(episode_index=_int_field(doc, "episode_index"), side=side)
    if mtype == "observe":
        grid = doc.get("grid")
        if not isinstance(grid, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in grid):
            raise ProtocolError(E_BAD_FIELD, "'grid' must be a list of integers")
        controllable = doc.get("controllable")
        if not isinstance(controllable, bool):
            raise ProtocolError(E_BAD_FIELD, "'controllable' must be a boolean")
        return Observe(step=_int_field(doc, "step"),
                       grid=tuple(grid),
                       energy_fraction=_finite_number(doc, "energy_fraction"),
                       controllable=controllable)
    if mtype == "act":
        return ActMsg(force=_finite_number(doc, "force"),
                      steer=_finite_number(doc, "steer"))
    if mtype == "result":
        outcome = doc.get("outcome")
        reason = doc.get("reason")
        if outcome not in ("A_wins", "B_wins", "draw"):
            raise ProtocolError(E_BAD_FIELD, "'outcome' must be A_wins|B_wins|draw")
        if not isinstance(reason, str):
            raise ProtocolError(E_BAD_FIELD, "'reason' must be a string")
        return Result(outcome=outcome, reason=reason)
    raise ProtocolError(E_UNKNOWN_TYPE, f"unknown message type {mtype!r}")
