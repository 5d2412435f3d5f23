"""Agent policies: in-process baselines and the external stdio agent wrapper.

Policies mirror the wire protocol one-to-one (reset/act/result), so a scripted
baseline and an external process are interchangeable inside the episode
runner. External agents run as subprocesses speaking newline-delimited
messages on stdin/stdout with a wall-clock deadline per step; in-process
baselines are exempt from deadlines so runs stay deterministic.
"""
from __future__ import annotations

import hashlib
import math
import queue
import random
import shlex
import subprocess
import threading
import time

from . import PROTOCOL_VERSION, protocol
from .observation import DEFAULT_VISION, VisionParams
from .physics import Action, ZERO_ACTION, PhysicsParams
from .colors import COLOR_SENSOR


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary labels; independent of hash randomization."""
    text = "|".join(repr(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


class AgentViolation(Exception):
    """A late, malformed, or non-finite response; the runner substitutes zeros."""


class AgentFailure(Exception):
    """The agent is gone for good (process died or never started)."""


class Policy:
    """Base in-process agent."""

    name = "policy"
    is_external = False

    def reset(self, side: str, episode_index: int) -> None:
        pass

    def act(self, obs) -> Action:
        raise NotImplementedError

    def result(self, outcome) -> None:
        pass

    def close(self) -> None:
        pass


class NoopPolicy(Policy):
    name = "noop"

    def act(self, obs) -> Action:
        return ZERO_ACTION


class RandomPolicy(Policy):
    """Uniform actions inside the engine bounds, reseeded per episode."""

    name = "random"

    def __init__(self, seed: int, params: PhysicsParams | None = None):
        from . import physics
        self.seed = seed
        self.params = params or physics.DEFAULT_PARAMS
        self._rng = random.Random(seed)

    def reset(self, side: str, episode_index: int) -> None:
        self._rng = random.Random(derive_seed(self.seed, side, episode_index))

    def act(self, obs) -> Action:
        p = self.params
        return Action(self._rng.uniform(p.f_min, p.f_max),
                      self._rng.uniform(-p.steer_max, p.steer_max))


class ScriptedForwardPolicy(Policy):
    """Full throttle toward visible goal-line cells, straight ahead otherwise."""

    name = "scripted_forward"

    def __init__(self, vision: VisionParams | None = None):
        self.vision = vision or DEFAULT_VISION

    def act(self, obs) -> Action:
        grid = obs.grid
        g = self.vision.grid_size
        cell = self.vision.window_side / g
        # the viewer sits at column (g-1)/2; its row follows from the window offset
        row_self = (self.vision.forward_offset + self.vision.window_side / 2.0) / cell - 0.5
        col_self = (g - 1) / 2.0
        total = 0
        row_sum = 0.0
        col_sum = 0.0
        for r in range(g):
            row = grid[r]
            for c in range(g):
                if row[c] == COLOR_SENSOR:
                    total += 1
                    row_sum += r
                    col_sum += c
        if total == 0:
            return Action(1e9, 0.0)  # engine clamps to f_max
        dx = col_sum / total - col_self
        dy = row_self - row_sum / total
        return Action(1e9, math.atan2(dx, dy))


class ExternalAgentPolicy(Policy):
    """A subprocess speaking the wire protocol over its standard streams."""

    is_external = True

    def __init__(self, command: str, deadline_ms: float = 100.0,
                 handshake_ms: float = 5000.0):
        self.command = command
        self.name = command
        self.deadline = deadline_ms / 1000.0
        self.handshake = handshake_ms / 1000.0
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._owed = 0  # timed-out acts that may still drift in late

    def start(self, hello: protocol.Hello) -> None:
        try:
            self._proc = subprocess.Popen(
                shlex.split(self.command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True)
        except OSError as exc:
            raise AgentFailure(f"could not start {self.command!r}: {exc}")
        thread = threading.Thread(target=self._pump, daemon=True)
        thread.start()
        self._send(protocol.encode_message(hello))
        msg = self._read(self.handshake)
        if not isinstance(msg, protocol.Ready):
            raise AgentFailure(f"agent did not complete the handshake: {msg!r}")
        self.name = msg.name or self.command

    def _pump(self) -> None:
        proc = self._proc
        try:
            for line in proc.stdout:
                self._lines.put(line)
        finally:
            self._lines.put(None)

    def _send(self, line: str) -> None:
        proc = self._proc
        if proc is None or proc.poll() is not None:
            raise AgentFailure("agent process is not running")
        try:
            proc.stdin.write(line + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise AgentFailure("agent closed its input")

    def _read(self, timeout: float):
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0.0:
                self._owed += 1
                raise AgentViolation("deadline expired")
            try:
                line = self._lines.get(timeout=remaining)
            except queue.Empty:
                self._owed += 1
                raise AgentViolation("deadline expired")
            if line is None:
                raise AgentFailure("agent stream closed")
            if self._owed:
                self._owed -= 1  # discard one late straggler
                continue
            try:
                return protocol.decode_message(line.strip())
            except protocol.ProtocolError as exc:
                raise AgentViolation(str(exc))

    def reset(self, side: str, episode_index: int) -> None:
        self._send(protocol.encode_message(
            protocol.Reset(episode_index=episode_index, side=side)))

    def observe(self, observe_msg: protocol.Observe) -> None:
        self._send(protocol.encode_message(observe_msg))

    def await_act(self) -> Action:
        msg = self._read(self.deadline)
        if not isinstance(msg, protocol.ActMsg):
            raise AgentViolation(f"expected an act message, got {msg!r}")
        return Action(msg.force, msg.steer)

    def act(self, obs) -> Action:
        self.observe(protocol.Observe(
            step=obs.step, grid=tuple(obs.flat_grid()),
            energy_fraction=obs.energy_fraction, controllable=obs.controllable))
        return self.await_act()

    def result(self, outcome) -> None:
        try:
            self._send(protocol.encode_message(
                protocol.Result(outcome=outcome.result, reason=outcome.reason)))
        except AgentFailure:
            pass  # agent already gone; the outcome stands

    def close(self) -> None:
        proc = self._proc
        if proc is None:
            return
        try:
            proc.stdin.close()
        except OSError:
            pass
        try:
            proc.wait(timeout=2.0)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()


BASELINES = ("noop", "random", "scripted_forward")


def make_policy(descriptor: str, seed: int = 0,
                deadline_ms: float = 100.0) -> Policy:
    """Build a policy from a textual descriptor.

    ``noop``, ``random``, ``random:<seed>``, ``scripted_forward``, or
    ``cmd:<command line>`` for an external agent process.
    """
    if descriptor == "noop":
        return NoopPolicy()
    if descriptor == "random":
        return RandomPolicy(seed)
    if descriptor.startswith("random:"):
        return RandomPolicy(int(descriptor.split(":", 1)[1]))
    if descriptor == "scripted_forward":
        return ScriptedForwardPolicy()
    if descriptor.startswith("cmd:"):
        return ExternalAgentPolicy(descriptor[4:], deadline_ms=deadline_ms)
    raise ValueError(f"unknown agent descriptor {descriptor!r}; "
                     f"expected one of {BASELINES} or cmd:<command>")
