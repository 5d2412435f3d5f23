"""Per-scenario rules: initialization, turn phases, win conditions, shuffling.

All six games run on the same engine; the differences live in which bodies a
side controls, which sensor tags matter, and how an episode is decided:

- running: first agent whose center crosses a ``finish`` sensor wins.
- wrestling: first agent whose center touches the ``border`` sensor loses.
- table_hockey / football: the puck/ball crossing ``goal_a`` awards B the win
  and vice versa; the hockey midline is an agents-only wall straight from the
  map file.
- curling: strictly alternating throws; the thrower steers the rock itself
  until it crosses the ``release`` line, after which it glides on ice drag.
  When all throws are spent (or the step limit is hit) the side owning the
  rock nearest the center point wins. Rocks never released by the end of
  their throw are removed from play.
- billiard: strictly alternating strokes in which the active agent may move;
  balls that cross a ``pocket`` sensor are potted for their owner's count.
  More own-color balls potted wins once the stroke budget is spent.

The simultaneous kinds resolve ``max_steps`` with a timeout draw; the
turn-based kinds evaluate their counting rule at the limit instead.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import physics
from .geometry import Vec2
from .maps import AGENT_MASS, AGENT_RADIUS, GameKind, MapSpec, OBJECT_DEFAULTS
from .observation import (AgentObservation, DEFAULT_VISION, VisionParams,
                          render_observation, render_view)
from .physics import (AGENT, Action, DiscBody, ImpactEvent, PhysicsParams,
                      ROCK, SENSOR_CROSSING, World, apply_control)

SIDES = ("A", "B")

ROCK_RADIUS = 12.0
ROCK_MASS = 2.0
ROCKS_PER_SIDE = 3
STROKES_PER_SIDE = 6
REST_SPEED = 1e-3          # a body below this speed counts as resting
TURN_REST_SPEED = 0.5      # threshold for ending a throw/stroke early
CURLING_TURN_CAP = 150     # steps before a throw is cut off
BILLIARD_TURN_CAP = 80     # steps before a stroke is cut off


class GameOverError(RuntimeError):
    """step_game was called on a decided episode."""


@dataclass(frozen=True)
class Outcome:
    """Zero-sum result of one episode (or an integrated series)."""

    result: str                 # A_wins | B_wins | draw
    score: tuple[int, int]
    reason: str                 # goal-crossed | border-touched | nearest-rock |
                                # most-potted | timeout | forfeit | majority

    def __post_init__(self) -> None:
        if self.result not in ("A_wins", "B_wins", "draw"):
            raise ValueError(f"bad result {self.result!r}")
        if sum(self.score) != 0 or self.score not in ((1, -1), (-1, 1), (0, 0)):
            raise ValueError(f"outcome score must be zero-sum, got {self.score}")

    @staticmethod
    def win(side: str, reason: str) -> "Outcome":
        if side == "A":
            return Outcome("A_wins", (1, -1), reason)
        return Outcome("B_wins", (-1, 1), reason)

    @staticmethod
    def draw(reason: str) -> "Outcome":
        return Outcome("draw", (0, 0), reason)

    def winner(self) -> str | None:
        return {"A_wins": "A", "B_wins": "B", "draw": None}[self.result]


@dataclass
class TurnPhase:
    """Shared turn bookkeeping for curling and billiard."""

    turn_side: str = "A"
    throws_remaining: dict[str, int] = field(default_factory=dict)
    release_done: bool = False
    active_body: int | None = None
    phase_steps: int = 0
    balls_disturbed: bool = False
    potted: dict[str, int] = field(default_factory=lambda: {"A": 0, "B": 0})
    last_rock: dict[str, int | None] = field(default_factory=lambda: {"A": None, "B": None})
    next_body_id: int = 10
    finished: bool = False

    def copy(self) -> "TurnPhase":
        return TurnPhase(
            turn_side=self.turn_side,
            throws_remaining=dict(self.throws_remaining),
            release_done=self.release_done,
            active_body=self.active_body,
            phase_steps=self.phase_steps,
            balls_disturbed=self.balls_disturbed,
            potted=dict(self.potted),
            last_rock=dict(self.last_rock),
            next_body_id=self.next_body_id,
            finished=self.finished,
        )


@dataclass
class GameState:
    kind: GameKind
    map: MapSpec
    world: World
    params: PhysicsParams
    vision: VisionParams
    step: int
    seed: int
    phase: TurnPhase | None
    decision: Outcome | None = None

    @property
    def max_steps(self) -> int:
        return self.map.limits.max_steps

    def copy(self) -> "GameState":
        return GameState(
            kind=self.kind, map=self.map, world=self.world.copy(),
            params=self.params, vision=self.vision, step=self.step,
            seed=self.seed, phase=self.phase.copy() if self.phase else None,
            decision=self.decision)


TURN_BASED = (GameKind.CURLING, GameKind.BILLIARD)


def _agent_id(side: str) -> int:
    return 0 if side == "A" else 1


def world_from_map(spec: MapSpec) -> World:
    x0, y0 = spec.origin
    return World((spec.width, spec.height), spec.shapes, origin=(x0, y0))


def init_game(kind: GameKind, spec: MapSpec, seed: int,
              params: PhysicsParams | None = None,
              vision: VisionParams | None = None) -> GameState:
    """Place bodies at their spawns with full energy and set up phase data."""
    if spec.kind != kind:
        raise ValueError(f"map {spec.name!r} is a {spec.kind.value} map, not {kind.value}")
    params = params or physics.DEFAULT_PARAMS
    vision = vision or DEFAULT_VISION
    world = world_from_map(spec)

    if kind != GameKind.CURLING:
        for side in SIDES:
            spawn = spec.spawns[side]
            controllable = True
            if kind == GameKind.BILLIARD:
                controllable = side == "A"
            world.add_body(DiscBody(
                id=_agent_id(side), kind=AGENT, x=spawn.pos.x, y=spawn.pos.y,
                heading=spawn.heading, radius=AGENT_RADIUS, mass=AGENT_MASS,
                energy=params.e_max, controllable=controllable, owner_side=side))

    next_id = 2
    for obj in spec.objects:
        if obj.type == "center_point":
            continue
        world.add_body(DiscBody(
            id=next_id, kind=OBJECT_DEFAULTS[obj.type]["kind"],
            x=obj.pos.x, y=obj.pos.y, radius=obj.radius, mass=obj.mass,
            owner_side=obj.owner))
        next_id += 1

    phase = None
    if kind == GameKind.CURLING:
        phase = TurnPhase(turn_side="A",
                          throws_remaining={"A": ROCKS_PER_SIDE, "B": ROCKS_PER_SIDE},
                          next_body_id=10)
        state = GameState(kind, spec, world, params, vision, 0, seed, phase)
        _spawn_rock(state)
        return state
    if kind == GameKind.BILLIARD:
        phase = TurnPhase(turn_side="A",
                          throws_remaining={"A": STROKES_PER_SIDE, "B": STROKES_PER_SIDE})
    return GameState(kind, spec, world, params, vision, 0, seed, phase)


def _spawn_rock(state: GameState) -> None:
    """Put a fresh controllable rock at the thrower's spawn, nudging it clear."""
    phase = state.phase
    spawn = state.map.spawns[phase.turn_side]
    fx, fy = math.sin(spawn.heading), math.cos(spawn.heading)
    x, y = spawn.pos.x, spawn.pos.y
    for k in range(80):
        # back the spawn point away from the house until the slot is free
        cx = x - fx * (5.0 * k)
        cy = y - fy * (5.0 * k)
        if all((not b.alive) or math.hypot(b.x - cx, b.y - cy) >= b.radius + ROCK_RADIUS + 1.0
               for b in state.world.bodies):
            break
    rock = DiscBody(
        id=phase.next_body_id, kind=ROCK, x=cx, y=cy, heading=spawn.heading,
        radius=ROCK_RADIUS, mass=ROCK_MASS, energy=state.params.e_max,
        controllable=True, owner_side=phase.turn_side)
    phase.next_body_id += 1
    phase.active_body = rock.id
    phase.last_rock[phase.turn_side] = rock.id
    phase.release_done = False
    phase.phase_steps = 0
    state.world.add_body(rock)


def controlled_body_id(state: GameState, side: str) -> int | None:
    """Which body the given side steers this step, if any."""
    if state.kind == GameKind.CURLING:
        phase = state.phase
        if phase.turn_side != side or phase.active_body is None or phase.release_done:
            return None
        return phase.active_body
    if state.kind == GameKind.BILLIARD:
        return _agent_id(side) if state.phase.turn_side == side else None
    return _agent_id(side)


def step_game(state: GameState, action_a: Action,
              action_b: Action) -> tuple[GameState, list[ImpactEvent]]:
    """Advance one control step: route actions, run physics, apply the rules."""
    if check_outcome(state) is not None:
        raise GameOverError("episode already decided")
    st = state.copy()
    accels: dict[int, Vec2] = {}
    for side, action in (("A", action_a), ("B", action_b)):
        body_id = controlled_body_id(st, side)
        if body_id is None:
            continue  # inactive side's action is discarded
        body = st.world.body(body_id)
        updated, accel = apply_control(body, action, st.params)
        body.heading = updated.heading
        body.energy = updated.energy
        accels[body_id] = accel

    events = physics.step_world_inplace(st.world, accels, st.params)
    st.step += 1
    _apply_rules(st, events)
    return st, events


def _apply_rules(st: GameState, events: list[ImpactEvent]) -> None:
    crossings = [e for e in events if e.kind == SENSOR_CROSSING and e.tag]

    if st.kind == GameKind.RUNNING:
        finishers = [e for e in crossings if e.tag == "finish"]
        if finishers:
            st.decision = _first_or_draw(finishers, "goal-crossed", win_for_toucher=True)
        return
    if st.kind == GameKind.WRESTLING:
        touches = [e for e in crossings if e.tag == "border"]
        if touches:
            st.decision = _first_or_draw(touches, "border-touched", win_for_toucher=False)
        return
    if st.kind in (GameKind.TABLE_HOCKEY, GameKind.FOOTBALL):
        goals = [e for e in crossings if e.tag in ("goal_a", "goal_b")]
        if goals:
            first = min(goals, key=lambda e: e.time)
            scored_on = "A" if first.tag == "goal_a" else "B"
            st.decision = Outcome.win("B" if scored_on == "A" else "A", "goal-crossed")
        return
    if st.kind == GameKind.CURLING:
        _curling_rules(st, crossings)
    elif st.kind == GameKind.BILLIARD:
        _billiard_rules(st, crossings)


def _first_or_draw(events: list[ImpactEvent], reason: str,
                   win_for_toucher: bool) -> Outcome:
    times: dict[str, float] = {}
    for e in events:
        side = "A" if e.body_id == 0 else "B"
        if side not in times or e.time < times[side]:
            times[side] = e.time
    if len(times) == 2 and times["A"] == times["B"]:
        return Outcome.draw(reason)
    side = min(times, key=lambda s: (times[s], s))
    if not win_for_toucher:
        side = "B" if side == "A" else "A"
    return Outcome.win(side, reason)


def _curling_rules(st: GameState, crossings: list[ImpactEvent]) -> None:
    phase = st.phase
    phase.phase_steps += 1
    if phase.active_body is not None and not phase.release_done:
        if any(e.tag == "release" and e.body_id == phase.active_body for e in crossings):
            phase.release_done = True
            st.world.body(phase.active_body).controllable = False

    turn_over = False
    if phase.release_done:
        turn_over = _all_resting(st) or phase.phase_steps >= CURLING_TURN_CAP
    elif phase.phase_steps >= CURLING_TURN_CAP:
        turn_over = True
    if not turn_over or phase.finished:
        return

    if not phase.release_done and phase.active_body is not None:
        # hogged rock: never released within its throw, out of play
        st.world.body(phase.active_body).alive = False
    for b in st.world.bodies:
        b.vx = 0.0
        b.vy = 0.0
        if b.kind == ROCK:
            b.controllable = False
    phase.throws_remaining[phase.turn_side] -= 1
    phase.active_body = None
    other = "B" if phase.turn_side == "A" else "A"
    if phase.throws_remaining[other] > 0:
        phase.turn_side = other
        _spawn_rock(st)
    elif phase.throws_remaining[phase.turn_side] > 0:
        _spawn_rock(st)
    else:
        phase.finished = True


def _billiard_rules(st: GameState, crossings: list[ImpactEvent]) -> None:
    phase = st.phase
    phase.phase_steps += 1
    potted_now: set[int] = set()
    for e in crossings:
        if e.tag == "pocket" and e.body_id not in potted_now:
            body = st.world.body(e.body_id)
            if body.alive and body.kind == physics.BILLIARD:
                body.alive = False
                potted_now.add(e.body_id)
                phase.potted[body.owner_side] += 1

    balls = [b for b in st.world.bodies if b.kind == physics.BILLIARD and b.alive]
    if any(b.speed() >= TURN_REST_SPEED for b in balls):
        phase.balls_disturbed = True
    all_potted = not balls
    balls_rest = all(b.speed() < TURN_REST_SPEED for b in balls)
    turn_over = (phase.phase_steps >= BILLIARD_TURN_CAP or
                 (phase.balls_disturbed and balls_rest) or all_potted)
    if not turn_over or phase.finished:
        return

    for b in balls:
        b.vx = 0.0
        b.vy = 0.0
    phase.throws_remaining[phase.turn_side] -= 1
    phase.phase_steps = 0
    phase.balls_disturbed = False
    other = "B" if phase.turn_side == "A" else "A"
    if all_potted or (phase.throws_remaining["A"] == 0 and phase.throws_remaining["B"] == 0):
        phase.finished = True
        for side in SIDES:
            st.world.body(_agent_id(side)).controllable = False
        return
    if phase.throws_remaining[other] > 0:
        phase.turn_side = other
    for side in SIDES:
        st.world.body(_agent_id(side)).controllable = side == phase.turn_side


def _all_resting(st: GameState) -> bool:
    return all(b.speed() < TURN_REST_SPEED for b in st.world.bodies if b.alive)


def check_outcome(state: GameState) -> Outcome | None:
    """The episode's result, if decided; at most one outcome per episode."""
    if state.decision is not None:
        return state.decision
    if state.kind == GameKind.CURLING:
        if state.phase.finished and _final_rest(state):
            return _score_curling(state)
        if state.step >= state.max_steps:
            return _score_curling(state)
        return None
    if state.kind == GameKind.BILLIARD:
        if state.phase.finished and _final_rest(state):
            return _score_billiard(state)
        if state.step >= state.max_steps:
            return _score_billiard(state)
        return None
    if state.step >= state.max_steps:
        return Outcome.draw("timeout")
    return None


def _final_rest(state: GameState) -> bool:
    return all(b.speed() < REST_SPEED for b in state.world.bodies
               if b.alive and b.kind != AGENT)


def _score_curling(state: GameState) -> Outcome:
    center = next(o.pos for o in state.map.objects if o.type == "center_point")
    best: dict[str, float] = {}
    for b in state.world.bodies:
        if b.kind != ROCK or not b.alive:
            continue
        if b.controllable:
            continue  # still being thrown: not yet in play
        d = math.hypot(b.x - center.x, b.y - center.y)
        side = b.owner_side
        if side not in best or d < best[side]:
            best[side] = d
    if not best:
        return Outcome.draw("nearest-rock")
    if len(best) == 1:
        return Outcome.win(next(iter(best)), "nearest-rock")
    if best["A"] == best["B"]:
        return Outcome.draw("nearest-rock")
    return Outcome.win("A" if best["A"] < best["B"] else "B", "nearest-rock")


def _score_billiard(state: GameState) -> Outcome:
    potted = state.phase.potted
    if potted["A"] == potted["B"]:
        return Outcome.draw("most-potted")
    return Outcome.win("A" if potted["A"] > potted["B"] else "B", "most-potted")


# ---------------------------------------------------------------------------
# Observations per side (anchoring rules for the turn-based kinds)
# ---------------------------------------------------------------------------

def observation_for(state: GameState, side: str) -> AgentObservation:
    if state.kind != GameKind.CURLING:
        obs = render_observation(state.world, _agent_id(side), state.vision,
                                 e_max=state.params.e_max)
        if state.kind == GameKind.BILLIARD:
            obs.controllable = state.phase.turn_side == side and not state.phase.finished
        return obs
    phase = state.phase
    anchor_id = phase.last_rock[side]
    body = None
    if anchor_id is not None:
        body = state.world.body(anchor_id)
        if not body.alive:
            body = None
    controls = controlled_body_id(state, side) is not None
    if body is None:
        spawn = state.map.spawns[side]
        return render_view(state.world, (spawn.pos, spawn.heading), side, None,
                           state.vision, energy_fraction=0.0, controllable=controls)
    frac = min(max(body.energy / state.params.e_max, 0.0), 1.0)
    return render_view(state.world, (Vec2(body.x, body.y), body.heading), side,
                       body.id, state.vision, energy_fraction=frac,
                       controllable=controls)


# ---------------------------------------------------------------------------
# Integrated meta-game
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegratedConfig:
    kinds: tuple[GameKind, ...]
    shuffle_seed: int

    def __post_init__(self) -> None:
        if not (4 <= len(self.kinds) <= 6):
            raise ValueError("integrated games combine 4 to 6 scenarios")
        if len(set(self.kinds)) != len(self.kinds):
            raise ValueError("integrated scenario kinds must be distinct")


def shuffle_schedule(config: IntegratedConfig) -> list[GameKind]:
    """Seeded permutation of the configured kinds; same seed, same order."""
    order = list(config.kinds)
    random.Random(config.shuffle_seed).shuffle(order)
    return order


def majority_outcome(games: list[Outcome]) -> Outcome:
    """Series outcome: strictly more game wins takes it, equal wins is a draw."""
    wins_a = sum(1 for g in games if g.result == "A_wins")
    wins_b = sum(1 for g in games if g.result == "B_wins")
    if wins_a > wins_b:
        return Outcome.win("A", "majority")
    if wins_b > wins_a:
        return Outcome.win("B", "majority")
    return Outcome.draw("majority")
