"""Command-line entry point.

Subcommands::

    hexathlon run        play one episode (or an integrated series)
    hexathlon replay     export frames from a replay file
    hexathlon validate   check a map file
    hexathlon bench      throughput and determinism benchmark
    hexathlon tournament run a Swiss event from a config file

Exit codes: 0 success, 1 validation or integrity failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .agents import derive_seed, make_policy
from .maps import (BUILTIN_NAMES, GameKind, MapSpec, MapValidationError,
                   all_builtin_maps, builtin_map, load_map)
from .runner import EpisodeRecord, hello_for, run_episode, run_integrated
from .scenarios import IntegratedConfig
from .tournament import (GameConfig, PlayerEntry, default_rounds,
                         run_tournament)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_INTEGRATED = ("running", "wrestling", "table_hockey", "football")


def _load_map_arg(value: str | None, kind: GameKind) -> MapSpec:
    if value is None or value == "builtin":
        return builtin_map(kind)
    return load_map(value)


def _policy(descriptor: str, seed: int, deadline_ms: float, spec: MapSpec | None):
    policy = make_policy(descriptor, seed=seed, deadline_ms=deadline_ms)
    if policy.is_external:
        policy.start(hello_for(spec, deadline_ms))
    return policy


def cmd_run(args) -> int:
    deadline = args.deadline_ms
    summary: dict = {"engine": __version__, "seed": args.seed}
    if args.kind == "integrated":
        kinds = tuple(GameKind(k) for k in args.kinds.split(","))
        config = IntegratedConfig(kinds=kinds, shuffle_seed=args.shuffle_seed)
        maps_by_kind = _pool_maps(args.pool, kinds)
        policy_a = _policy(args.agent_a, derive_seed(args.seed, "A"), deadline, None)
        policy_b = _policy(args.agent_b, derive_seed(args.seed, "B"), deadline, None)
        try:
            series = run_integrated(config, maps_by_kind, policy_a, policy_b, args.seed)
        finally:
            policy_a.close()
            policy_b.close()
        summary["outcome"] = series.outcome.result
        summary["reason"] = series.outcome.reason
        summary["schedule"] = [k.value for k in series.schedule]
        summary["games"] = [{"kind": k.value, "result": g.result, "reason": g.reason}
                            for k, g in zip(series.schedule, series.games)]
        summary["violations"] = {
            "A": sum(r.outcome["violations"]["A"] for r in series.records),
            "B": sum(r.outcome["violations"]["B"] for r in series.records),
        }
        summary["replay_hashes"] = [r.replay_hash for r in series.records]
        if args.replay:
            base = Path(args.replay)
            for i, record in enumerate(series.records):
                path = base.with_name(f"{base.stem}-{i}{base.suffix or '.jsonl'}")
                record.write(path)
        print(f"series: {series.outcome.result} ({series.outcome.reason})")
        for kind, game in zip(series.schedule, series.games):
            print(f"  {kind.value}: {game.result} ({game.reason})")
    else:
        try:
            kind = GameKind(args.kind)
        except ValueError:
            print(f"error: unknown kind {args.kind!r}", file=sys.stderr)
            return EXIT_USAGE
        spec = _load_map_arg(args.map, kind)
        policy_a = _policy(args.agent_a, derive_seed(args.seed, "A"), deadline, spec)
        policy_b = _policy(args.agent_b, derive_seed(args.seed, "B"), deadline, spec)
        try:
            record = run_episode(kind, spec, policy_a, policy_b, args.seed)
        finally:
            policy_a.close()
            policy_b.close()
        if args.replay:
            record.write(args.replay)
        summary.update({
            "outcome": record.outcome["result"],
            "reason": record.outcome["reason"],
            "steps": record.outcome["steps"],
            "violations": record.outcome["violations"],
            "replay_hash": record.replay_hash,
        })
        print(f"outcome: {record.outcome['result']} ({record.outcome['reason']}) "
              f"after {record.outcome['steps']} steps")
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def _pool_maps(pool_path: str | None, kinds) -> dict[GameKind, MapSpec]:
    if pool_path is None:
        built = all_builtin_maps()
        return {k: built[k] for k in kinds}
    doc = json.loads(Path(pool_path).read_text(encoding="utf-8"))
    pools = doc.get("pools", {})
    out = {}
    for kind in kinds:
        entries = pools.get(kind.value)
        if not entries:
            out[kind] = builtin_map(kind)
        else:
            out[kind] = load_map(entries[0])  # first map listed per kind
    return out


def cmd_replay(args) -> int:
    from .render import frames_from_record
    try:
        record = EpisodeRecord.read(args.replay)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    kind = GameKind(record.header["kind"])
    spec = _load_map_arg(args.map, kind)
    if spec.checksum != record.header["map_checksum"]:
        print("error: map checksum does not match the replay header", file=sys.stderr)
        return EXIT_FAIL
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frames = frames_from_record(record, spec, args.every)
    for step, frame in frames:
        frame.write(out_dir / f"frame_{step:06d}.ppm")
    print(f"wrote {len(frames)} frames to {out_dir}")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .maps import parse_map
    try:
        text = Path(args.map).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = parse_map(text)
    except MapValidationError as exc:
        for problem in exc.errors:
            print(problem)
        return EXIT_FAIL
    print(f"ok: {spec.name} ({spec.kind.value}), checksum {spec.checksum[:16]}")
    return EXIT_OK


def cmd_bench(args) -> int:
    kind = GameKind(args.kind)
    spec = builtin_map(kind)
    if args.episodes <= 0:
        print("no episodes requested")
        return EXIT_OK

    def run_all() -> tuple[list[str], int]:
        hashes = []
        steps = 0
        for i in range(args.episodes):
            a = make_policy("random", seed=derive_seed(args.seed, i, "A"))
            b = make_policy("random", seed=derive_seed(args.seed, i, "B"))
            record = run_episode(kind, spec, a, b, derive_seed(args.seed, i))
            hashes.append(record.replay_hash)
            steps += record.outcome["steps"]
        return hashes, steps

    t0 = time.perf_counter()
    first, steps = run_all()
    elapsed = time.perf_counter() - t0
    second, _ = run_all()
    stable = first == second
    print(f"{args.episodes} episodes, {steps} steps in {elapsed:.2f}s "
          f"({steps / elapsed:.0f} steps/s)")
    print(f"replay hashes stable across two runs: {stable}")
    return EXIT_OK if stable else EXIT_FAIL


def cmd_tournament(args) -> int:
    try:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    players = [PlayerEntry(player_id=p["id"], name=p.get("name", p["id"]),
                           agent=p["agent"], seed_rank=i)
               for i, p in enumerate(doc.get("players", []))]
    if len(players) < 2:
        print("error: config needs at least 2 players", file=sys.stderr)
        return EXIT_USAGE
    game_doc = doc.get("game", {})
    if "integrated" in game_doc:
        integ = game_doc["integrated"]
        kinds = tuple(GameKind(k) for k in integ["kinds"])
        config = IntegratedConfig(kinds=kinds,
                                  shuffle_seed=integ.get("shuffle_seed", 0))
        maps_by_kind = {}
        declared = game_doc.get("maps", {})
        for kind in kinds:
            value = declared.get(kind.value, "builtin")
            maps_by_kind[kind] = _load_map_arg(value, kind)
        game = GameConfig(integrated=config, maps_by_kind=maps_by_kind)
    else:
        kind = GameKind(game_doc.get("kind", "running"))
        game = GameConfig(kind=kind, map=_load_map_arg(game_doc.get("map"), kind))
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    def on_round(snapshot) -> None:
        print(f"--- round {snapshot['round']} ---")
        _print_standings(snapshot["standings"], players)
        if out_dir:
            path = out_dir / f"standings_round_{snapshot['round']:02d}.json"
            path.write_text(json.dumps(snapshot, indent=2) + "\n")

    report = run_tournament(
        players, game,
        rounds=doc.get("rounds"),
        episodes_per_match=doc.get("episodes_per_match", 2),
        seed=doc.get("seed", args.seed),
        deadline_ms=args.deadline_ms,
        on_round=on_round)
    print("=== final ranking ===")
    by_id = {p.player_id: p for p in players}
    for rank, pid in enumerate(report.final_order, 1):
        row = report.standings[pid]
        print(f"{rank:3d}. {by_id[pid].name:<20} points={row.points:<5g} "
              f"buchholz={row.buchholz:g}")
    if out_dir:
        (out_dir / "final_ranking.json").write_text(json.dumps(
            {"order": report.final_order,
             "standings": [report.standings[p].as_dict()
                           for p in report.final_order]}, indent=2) + "\n")
        (out_dir / "audit.jsonl").write_text(
            "\n".join(report.audit_lines()) + "\n")
    return EXIT_OK


def _print_standings(rows: list[dict], players: list[PlayerEntry]) -> None:
    names = {p.player_id: p.name for p in players}
    print(f"{'player':<20} {'points':>7} {'buchholz':>9}")
    for row in rows:
        print(f"{names.get(row['player_id'], row['player_id']):<20} "
              f"{row['points']:>7g} {row['buchholz']:>9g}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hexathlon",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="play one episode or integrated series")
    p_run.add_argument("--kind", required=True,
                       help="game kind, or 'integrated'")
    p_run.add_argument("--map", help="map file (default: builtin fixture)")
    p_run.add_argument("--agent-a", default="noop")
    p_run.add_argument("--agent-b", default="noop")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--replay", help="write the episode record here")
    p_run.add_argument("--summary", help="write a JSON summary here")
    p_run.add_argument("--deadline-ms", type=float, default=100.0)
    p_run.add_argument("--kinds", default=",".join(DEFAULT_INTEGRATED),
                       help="integrated: comma-separated kinds")
    p_run.add_argument("--shuffle-seed", type=int, default=0)
    p_run.add_argument("--pool", help="integrated: map pool file")
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("replay", help="export frames from a replay")
    p_rep.add_argument("--replay", required=True)
    p_rep.add_argument("--map", help="map file (default: builtin fixture)")
    p_rep.add_argument("--out-dir", required=True)
    p_rep.add_argument("--every", type=int, default=10,
                       help="export a frame every K steps")
    p_rep.set_defaults(func=cmd_replay)

    p_val = sub.add_parser("validate", help="validate a map file")
    p_val.add_argument("--map", required=True)
    p_val.set_defaults(func=cmd_validate)

    p_bench = sub.add_parser("bench", help="throughput / determinism benchmark")
    p_bench.add_argument("--episodes", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--kind", default="running")
    p_bench.set_defaults(func=cmd_bench)

    p_tour = sub.add_parser("tournament", help="run a Swiss tournament")
    p_tour.add_argument("--config", required=True)
    p_tour.add_argument("--out-dir")
    p_tour.add_argument("--seed", type=int, default=0)
    p_tour.add_argument("--deadline-ms", type=float, default=100.0)
    p_tour.set_defaults(func=cmd_tournament)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MapValidationError as exc:
        for problem in exc.errors:
            print(problem, file=sys.stderr)
        return EXIT_FAIL
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
