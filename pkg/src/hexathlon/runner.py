"""Episode runner: binds two policies to a game and seals a replayable record.

Each step the runner offers both sides an observation, collects one action
apiece (substituting zeros and counting a violation when an agent is late,
malformed, or absent), then advances the game. Three consecutive violations
forfeit the episode. The record captures everything needed to reproduce the
episode bit-for-bit and is sealed with a SHA-256 hash.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import __version__, protocol
from .agents import AgentFailure, AgentViolation, Policy, derive_seed
from .maps import GameKind, MapSpec
from .observation import render_observation
from .physics import Action, ZERO_ACTION
from .scenarios import (GameState, IntegratedConfig, Outcome, check_outcome,
                        init_game, majority_outcome, observation_for,
                        shuffle_schedule, step_game)

MAX_CONSECUTIVE_VIOLATIONS = 3


class ObservationView:
    """Lazy per-step observation handed to policies; the grid renders on use."""

    __slots__ = ("_state", "_side", "_cached", "step")

    def __init__(self, state: GameState, side: str):
        self._state = state
        self._side = side
        self._cached = None
        self.step = state.step

    def _materialize(self):
        if self._cached is None:
            self._cached = observation_for(self._state, self._side)
        return self._cached

    @property
    def grid(self):
        return self._materialize().grid

    @property
    def energy_fraction(self) -> float:
        return self._materialize().energy_fraction

    @property
    def controllable(self) -> bool:
        return self._materialize().controllable

    def flat_grid(self) -> list[int]:
        return self._materialize().flat_grid()


def _canon(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass
class EpisodeRecord:
    header: dict
    steps: list[dict] = field(default_factory=list)
    outcome: dict | None = None
    replay_hash: str = ""

    def seal(self) -> "EpisodeRecord":
        digest = hashlib.sha256()
        for line in self._content_lines():
            digest.update(line.encode("utf-8"))
            digest.update(b"\n")
        self.replay_hash = digest.hexdigest()
        return self

    def _content_lines(self) -> list[str]:
        lines = [_canon(self.header)]
        lines.extend(_canon(s) for s in self.steps)
        lines.append(_canon(self.outcome))
        return lines

    def lines(self) -> list[str]:
        return self._content_lines() + [_canon({"type": "hash", "sha256": self.replay_hash})]

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.lines():
                fh.write(line + "\n")

    @staticmethod
    def read(path) -> "EpisodeRecord":
        with open(path, "r", encoding="utf-8") as fh:
            lines = [line.rstrip("\n") for line in fh if line.strip()]
        if len(lines) < 3:
            raise ValueError("replay file too short")
        header = json.loads(lines[0])
        tail = json.loads(lines[-1])
        if tail.get("type") != "hash":
            raise ValueError("replay file missing the hash trailer")
        outcome = json.loads(lines[-2])
        steps = [json.loads(line) for line in lines[1:-2]]
        rec = EpisodeRecord(header=header, steps=steps, outcome=outcome).seal()
        if rec.replay_hash != tail.get("sha256"):
            raise ValueError("replay hash mismatch: record was modified")
        return rec

    def final_outcome(self) -> Outcome:
        return Outcome(self.outcome["result"], tuple(self.outcome["score"]),
                       self.outcome["reason"])


def _body_entry(b) -> list:
    return [b.id, b.x, b.y, b.vx, b.vy, b.heading, b.energy, 1 if b.alive else 0]


def _roster_entry(b) -> dict:
    return {"id": b.id, "kind": b.kind, "radius": b.radius,
            "owner": b.owner_side, "color": b.color_code,
            "x": b.x, "y": b.y, "heading": b.heading}


class _SideRunner:
    """Violation accounting for one side of one episode."""

    def __init__(self, side: str, policy: Policy):
        self.side = side
        self.policy = policy
        self.violations = 0
        self.consecutive = 0
        self.failed = False
        self._view: ObservationView | None = None
        self._pending: Exception | None = None

    def begin(self, view: ObservationView) -> None:
        """Offer the observation; external agents get their Observe line now."""
        self._view = view
        self._pending = None
        if self.failed or not self.policy.is_external:
            return
        try:
            self.policy.observe(protocol.Observe(
                step=view.step, grid=tuple(view.flat_grid()),
                energy_fraction=view.energy_fraction,
                controllable=view.controllable))
        except Exception as exc:
            self._pending = exc

    def finish(self) -> Action:
        """Collect this side's action, substituting zeros on any violation."""
        if self.failed:
            return ZERO_ACTION
        try:
            if self._pending is not None:
                raise self._pending
            if self.policy.is_external:
                action = self.policy.await_act()
            else:
                action = self.policy.act(self._view)
            Action(action.force, action.steer).require_finite()
        except Exception as exc:
            if isinstance(exc, AgentFailure):
                self.failed = True
            self.violations += 1
            self.consecutive += 1
            return ZERO_ACTION
        self.consecutive = 0
        return action

    def forfeited(self) -> bool:
        return self.failed or self.consecutive >= MAX_CONSECUTIVE_VIOLATIONS


def run_episode(kind: GameKind, spec: MapSpec, policy_a: Policy, policy_b: Policy,
                seed: int, episode_index: int = 0) -> EpisodeRecord:
    """Play one episode to termination and return the sealed record."""
    state = init_game(kind, spec, seed)
    header = {
        "type": "header",
        "engine": __version__,
        "kind": kind.value,
        "map_name": spec.name,
        "map_checksum": spec.checksum,
        "seed": seed,
        "episode_index": episode_index,
        "agents": {"A": policy_a.name, "B": policy_b.name},
        "bounds": {"w": spec.width, "h": spec.height,
                   "origin": list(spec.origin)},
        "roster": [_roster_entry(b) for b in state.world.bodies],
    }
    record = EpisodeRecord(header=header)
    sides = {"A": _SideRunner("A", policy_a), "B": _SideRunner("B", policy_b)}
    for side, runner in sides.items():
        try:
            runner.policy.reset(side, episode_index)
        except AgentFailure:
            runner.failed = True

    outcome = check_outcome(state)
    while outcome is None:
        known = {b.id for b in state.world.bodies}
        sides["A"].begin(ObservationView(state, "A"))
        sides["B"].begin(ObservationView(state, "B"))
        act_a = sides["A"].finish()
        act_b = sides["B"].finish()
        if sides["A"].forfeited() or sides["B"].forfeited():
            outcome = _forfeit_outcome(sides)
            break
        state, events = step_game(state, act_a, act_b)
        entry = {
            "t": state.step,
            "bodies": [_body_entry(b) for b in state.world.bodies],
            "actions": {"A": [act_a.force, act_a.steer],
                        "B": [act_b.force, act_b.steer]},
            "events": [e.as_record() for e in events],
        }
        new_bodies = [b for b in state.world.bodies if b.id not in known]
        if new_bodies:
            entry["new_bodies"] = [_roster_entry(b) for b in new_bodies]
        record.steps.append(entry)
        outcome = check_outcome(state)

    record.outcome = {
        "type": "outcome",
        "result": outcome.result,
        "score": list(outcome.score),
        "reason": outcome.reason,
        "steps": state.step,
        "violations": {s: r.violations for s, r in sides.items()},
    }
    for runner in sides.values():
        try:
            runner.policy.result(outcome)
        except Exception:
            pass
    return record.seal()


def _forfeit_outcome(sides: dict[str, "_SideRunner"]) -> Outcome:
    a_bad = sides["A"].forfeited()
    b_bad = sides["B"].forfeited()
    if a_bad and b_bad:
        return Outcome.draw("forfeit")
    return Outcome.win("B" if a_bad else "A", "forfeit")


def replay_states(record: EpisodeRecord, spec: MapSpec):
    """Re-drive the engine with the recorded actions, yielding each new state.

    Replaying a record through the same build reproduces every stored state
    exactly; the caller can compare against record.steps.
    """
    if spec.checksum != record.header["map_checksum"]:
        raise ValueError("map checksum does not match the record header")
    state = init_game(GameKind(record.header["kind"]), spec, record.header["seed"])
    for entry in record.steps:
        a = Action(*entry["actions"]["A"])
        b = Action(*entry["actions"]["B"])
        state, _ = step_game(state, a, b)
        yield state


def verify_replay(record: EpisodeRecord, spec: MapSpec) -> bool:
    """True when the recorded trajectory is bit-identical to a fresh re-run."""
    for state, entry in zip(replay_states(record, spec), record.steps):
        got = [_body_entry(b) for b in state.world.bodies]
        if got != entry["bodies"]:
            return False
    return True


# ---------------------------------------------------------------------------
# Integrated series
# ---------------------------------------------------------------------------

@dataclass
class SeriesResult:
    outcome: Outcome
    games: list[Outcome]
    records: list[EpisodeRecord]
    schedule: list[GameKind]


def run_integrated(config: IntegratedConfig, maps_by_kind: dict[GameKind, MapSpec],
                   policy_a: Policy, policy_b: Policy, seed: int) -> SeriesResult:
    """Play the shuffled series; the majority of game wins takes it."""
    schedule = shuffle_schedule(config)
    for kind in schedule:
        if kind not in maps_by_kind:
            raise ValueError(f"no map supplied for {kind.value}")
    games: list[Outcome] = []
    records: list[EpisodeRecord] = []
    for index, kind in enumerate(schedule):
        game_seed = derive_seed(seed, "integrated", index, kind.value)
        try:
            record = run_episode(kind, maps_by_kind[kind], policy_a, policy_b,
                                 game_seed, episode_index=index)
            games.append(record.final_outcome())
            records.append(record)
        except AgentFailure:
            games.append(Outcome.draw("forfeit"))
    return SeriesResult(outcome=majority_outcome(games), games=games,
                        records=records, schedule=schedule)


def hello_for(spec: MapSpec | None, deadline_ms: float,
              grid_size: int = 40) -> protocol.Hello:
    from .physics import DEFAULT_PARAMS as p
    limits = {
        "f_min": p.f_min, "f_max": p.f_max, "steer_max": p.steer_max,
        "tau": p.tau, "deadline_ms": deadline_ms,
    }
    if spec is not None:
        limits["max_steps"] = spec.limits.max_steps
    return protocol.Hello(grid_size=grid_size, limits=limits)
