"""Swiss-system tournament: pairing, match aggregation, standings, execution.

Players with similar scores meet each round while rematches are avoided
outright whenever a rematch-free perfect matching exists (exhaustive search up
to a small field, greedy with backtracking above). Matches swap sides every
episode to cancel spawn asymmetry. Standard Swiss conventions apply: win 1,
draw 0.5, Buchholz tie-break, bye worth a full point to the lowest-ranked
player who has not had one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .agents import Policy, derive_seed, make_policy
from .maps import GameKind, MapSpec
from .runner import run_episode, run_integrated
from .scenarios import IntegratedConfig, Outcome

EXHAUSTIVE_LIMIT = 10


@dataclass(frozen=True)
class PlayerEntry:
    player_id: str
    name: str
    agent: str          # descriptor understood by agents.make_policy
    seed_rank: int


@dataclass
class StandingsRow:
    player_id: str
    points: float = 0.0
    buchholz: float = 0.0
    opponents: list[str] = field(default_factory=list)
    had_bye: bool = False

    def as_dict(self) -> dict:
        return {"player_id": self.player_id, "points": self.points,
                "buchholz": self.buchholz, "opponents": list(self.opponents),
                "had_bye": self.had_bye}


@dataclass
class MatchResult:
    pair: tuple[str, str]
    episode_outcomes: list[Outcome]
    points: tuple[float, float]

    def winner(self) -> str | None:
        if self.points[0] > self.points[1]:
            return self.pair[0]
        if self.points[1] > self.points[0]:
            return self.pair[1]
        return None


# ---------------------------------------------------------------------------
# Pairing
# ---------------------------------------------------------------------------

def ranking_order(standings: dict[str, StandingsRow],
                  players: dict[str, PlayerEntry]) -> list[str]:
    return sorted(standings,
                  key=lambda pid: (-standings[pid].points,
                                   -standings[pid].buchholz,
                                   players[pid].seed_rank))


def swiss_pair(standings: dict[str, StandingsRow], players: dict[str, PlayerEntry],
               history: set[frozenset[str]],
               round_index: int) -> tuple[list[tuple[str, str]], str | None]:
    """Pair a round. Returns (pairs, bye_player)."""
    if not standings:
        raise ValueError("cannot pair an empty field")
    order = ranking_order(standings, players)
    bye: str | None = None
    if len(order) % 2 == 1:
        fresh = [pid for pid in reversed(order) if not standings[pid].had_bye]
        bye = fresh[0] if fresh else order[-1]
        order = [pid for pid in order if pid != bye]
    if not order:
        return [], bye
    pairs = _pair_minimizing_rematches(order, history)
    return pairs, bye


def _pair_minimizing_rematches(order: list[str],
                               history: set[frozenset[str]]) -> list[tuple[str, str]]:
    """Depth-first matching over the ranked list, minimizing rematch count.

    Ties in rematch count resolve to the first matching in ranked DFS order,
    i.e. greedy adjacent pairing with backtracking. Exhaustive below
    EXHAUSTIVE_LIMIT players; above it, the search stops at the first
    rematch-free matching (still optimal when one exists).
    """
    n = len(order)
    best: tuple[int, list[tuple[str, str]]] | None = None
    stop_early = n > EXHAUSTIVE_LIMIT

    def search(remaining: tuple[str, ...], rematches: int,
               acc: list[tuple[str, str]]) -> None:
        nonlocal best
        if best is not None and rematches > best[0]:
            return
        if best is not None and stop_early and best[0] == 0:
            return
        if not remaining:
            if best is None or rematches < best[0]:
                best = (rematches, list(acc))
            return
        first = remaining[0]
        rest = remaining[1:]
        for i, partner in enumerate(rest):
            cost = 1 if frozenset((first, partner)) in history else 0
            acc.append((first, partner))
            search(rest[:i] + rest[i + 1:], rematches + cost, acc)
            acc.pop()

    search(tuple(order), 0, [])
    assert best is not None
    return best[1]


# ---------------------------------------------------------------------------
# Matches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GameConfig:
    """What one match plays: one fixed kind, or an integrated series."""

    kind: GameKind | None = None
    map: MapSpec | None = None
    integrated: IntegratedConfig | None = None
    maps_by_kind: dict[GameKind, MapSpec] | None = None

    def __post_init__(self) -> None:
        single = self.kind is not None and self.map is not None
        series = self.integrated is not None and self.maps_by_kind is not None
        if single == series:
            raise ValueError("configure exactly one of single kind or integrated")


def play_unit(game: GameConfig, policy_a: Policy, policy_b: Policy,
              seed: int) -> Outcome:
    """One scoring unit: a single episode, or one full integrated series."""
    if game.integrated is not None:
        return run_integrated(game.integrated, game.maps_by_kind,
                              policy_a, policy_b, seed).outcome
    record = run_episode(game.kind, game.map, policy_a, policy_b, seed)
    return record.final_outcome()


def run_match(pair: tuple[str, str], players: dict[str, PlayerEntry],
              game: GameConfig, episodes_per_match: int, seed: int,
              unit_runner=None, deadline_ms: float = 100.0) -> MatchResult:
    """Play an even number of episodes, swapping sides each episode."""
    if episodes_per_match % 2 != 0:
        raise ValueError("episodes_per_match must be even (sides swap)")
    if unit_runner is None:
        unit_runner = play_unit
    pid_a, pid_b = pair
    policies = {}
    for pid in pair:
        policies[pid] = make_policy(players[pid].agent,
                                    seed=derive_seed(seed, pid),
                                    deadline_ms=deadline_ms)
    _start_external(policies, game, deadline_ms)
    points = {pid_a: 0.0, pid_b: 0.0}
    outcomes: list[Outcome] = []
    try:
        for episode in range(episodes_per_match):
            first, second = (pid_a, pid_b) if episode % 2 == 0 else (pid_b, pid_a)
            outcome = unit_runner(game, policies[first], policies[second],
                                  derive_seed(seed, "episode", episode))
            outcomes.append(outcome)
            winner = outcome.winner()
            if outcome.reason == "forfeit" and winner is None:
                continue  # double forfeit: nobody scores this episode
            if winner is None:
                points[first] += 0.5
                points[second] += 0.5
            else:
                points[first if winner == "A" else second] += 1.0
    finally:
        for policy in policies.values():
            policy.close()
    return MatchResult(pair=pair, episode_outcomes=outcomes,
                       points=(points[pid_a], points[pid_b]))


def _start_external(policies: dict[str, Policy], game: GameConfig,
                    deadline_ms: float) -> None:
    from .runner import hello_for
    for policy in policies.values():
        if policy.is_external:
            spec = game.map
            policy.start(hello_for(spec, deadline_ms))


# ---------------------------------------------------------------------------
# Standings
# ---------------------------------------------------------------------------

def update_standings(standings: dict[str, StandingsRow],
                     results: list[MatchResult],
                     bye: str | None = None) -> None:
    """Apply one round of results in place: points, opponents, Buchholz."""
    for result in results:
        a, b = result.pair
        if a not in standings or b not in standings:
            raise KeyError(f"unknown player in result {result.pair}")
        winner = result.winner()
        if winner is None:
            standings[a].points += 0.5
            standings[b].points += 0.5
        else:
            standings[winner].points += 1.0
        standings[a].opponents.append(b)
        standings[b].opponents.append(a)
    if bye is not None:
        standings[bye].points += 1.0
        standings[bye].had_bye = True
    for row in standings.values():
        row.buchholz = sum(standings[o].points for o in row.opponents)


# ---------------------------------------------------------------------------
# Tournament driver
# ---------------------------------------------------------------------------

@dataclass
class TournamentReport:
    players: list[PlayerEntry]
    rounds: list[dict]
    final_order: list[str]
    standings: dict[str, StandingsRow]

    def audit_lines(self) -> list[str]:
        lines = [json.dumps({"type": "players",
                             "players": [p.player_id for p in self.players]})]
        for rnd in self.rounds:
            lines.append(json.dumps(rnd, sort_keys=True))
        lines.append(json.dumps({"type": "final", "order": self.final_order}))
        return lines


def default_rounds(n_players: int) -> int:
    import math
    return max(1, math.ceil(math.log2(max(2, n_players)))) + 2


def run_tournament(players: list[PlayerEntry], game: GameConfig, *,
                   rounds: int | None = None, episodes_per_match: int = 2,
                   seed: int = 0, unit_runner=None,
                   deadline_ms: float = 100.0,
                   on_round=None) -> TournamentReport:
    """Run the full Swiss event; emits a standings snapshot after each round."""
    if len(players) < 2:
        raise ValueError("a tournament needs at least 2 players")
    ids = [p.player_id for p in players]
    if len(set(ids)) != len(ids):
        raise ValueError("player ids must be unique")
    by_id = {p.player_id: p for p in players}
    standings = {pid: StandingsRow(player_id=pid) for pid in ids}
    history: set[frozenset[str]] = set()
    total_rounds = rounds if rounds is not None else default_rounds(len(players))
    crashed: set[str] = set()
    report = TournamentReport(players=players, rounds=[], final_order=[],
                              standings=standings)

    for round_index in range(total_rounds):
        pairs, bye = swiss_pair(standings, by_id, history, round_index)
        results: list[MatchResult] = []
        for pair in pairs:
            match_seed = derive_seed(seed, "round", round_index, *sorted(pair))
            a_crashed = pair[0] in crashed
            b_crashed = pair[1] in crashed
            if a_crashed or b_crashed:
                results.append(_crash_result(pair, a_crashed, b_crashed,
                                             episodes_per_match))
                continue
            try:
                results.append(run_match(pair, by_id, game, episodes_per_match,
                                         match_seed, unit_runner=unit_runner,
                                         deadline_ms=deadline_ms))
            except Exception:
                # a match that cannot even start counts both sides as crashed
                crashed.update(pair)
                results.append(_crash_result(pair, True, True, episodes_per_match))
        update_standings(standings, results, bye)
        for result in results:
            history.add(frozenset(result.pair))
        snapshot = {
            "type": "round",
            "round": round_index + 1,
            "pairs": [list(p) for p in pairs],
            "bye": bye,
            "results": [{"pair": list(r.pair), "points": list(r.points)}
                        for r in results],
            "standings": [standings[pid].as_dict()
                          for pid in ranking_order(standings, by_id)],
        }
        report.rounds.append(snapshot)
        if on_round is not None:
            on_round(snapshot)

    report.final_order = ranking_order(standings, by_id)
    return report


def _crash_result(pair, a_crashed: bool, b_crashed: bool,
                  episodes: int) -> MatchResult:
    if a_crashed and b_crashed:
        points = (0.0, 0.0)
    elif a_crashed:
        points = (0.0, float(episodes))
    else:
        points = (float(episodes), 0.0)
    outcome = (Outcome.draw("forfeit") if a_crashed and b_crashed else
               Outcome.win("B" if a_crashed else "A", "forfeit"))
    return MatchResult(pair=pair, episode_outcomes=[outcome] * episodes,
                       points=points)
