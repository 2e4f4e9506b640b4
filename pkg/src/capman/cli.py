"""Command-line entry points: bench, sweep, compare, play, serve.

Exit codes: 0 success, 2 configuration error, 3 controller fault.
"""

from __future__ import annotations

import argparse
import sys

from . import bundled_maze_path
from .baselines import random_ghost_team, starter_pacman
from .bench import (ExperimentSpec, MazeLoadError, compare_report,
                    load_human_results, read_csv, run_experiment,
                    sweep_updates, write_csv)
from .ca import CAParams, CAPacmanController, render_decay, render_values
from .engine import (ControllerFault, EventKind, GameConfig, derive_seed,
                     new_game, step)
from .maze import MazeError, load_maze


def _parse_range(text: str) -> list[int]:
    """lo:hi:step or lo:hi (step 1) or a single integer."""
    parts = [int(x) for x in text.split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) == 2:
        lo, hi = parts
        return list(range(lo, hi + 1))
    lo, hi, stp = parts
    return list(range(lo, hi + 1, stp))


def _game_config(args) -> GameConfig:
    if getattr(args, "config", None):
        return GameConfig.from_file(args.config)
    return GameConfig()


def _spec(args, updates_n: int | None = None) -> ExperimentSpec:
    pacman = args.pacman
    ca_params = None
    if pacman == "ca":
        ca_params = CAParams(updates_n=updates_n if updates_n is not None
                             else args.updates)
    return ExperimentSpec(pacman=pacman, maze=args.maze, games=args.games,
                          base_seed=args.seed, ca_params=ca_params,
                          config=_game_config(args))


def cmd_bench(args) -> int:
    if args.pacman.startswith("human-replay:"):
        stats = load_human_results(args.pacman.split(":", 1)[1])
        if len(stats) > 1:
            print(compare_report(stats), end="")
        else:
            for st in stats:
                print(f"{st.spec.name}: avg={st.avg:.2f} stddev={st.stddev:.2f} "
                      f"min={st.min} max={st.max} over {st.spec.games} games")
        if args.out:
            write_csv(stats, args.out)
        return 0
    stats = run_experiment(_spec(args), workers=args.workers)
    print(f"{stats.spec.name}: avg={stats.avg:.2f} stddev={stats.stddev:.2f} "
          f"min={stats.min} max={stats.max} over {stats.spec.games} games")
    if args.out:
        write_csv([stats], args.out)
    return 0


def cmd_sweep(args) -> int:
    stage1 = _parse_range(args.stage1)
    window = None
    if args.stage2:
        lo, hi = (int(x) for x in args.stage2.split(":"))
        window = (lo, hi)
    template = ExperimentSpec(pacman="ca", maze=args.maze, games=args.games,
                              base_seed=args.seed,
                              ca_params=CAParams(updates_n=stage1[0]),
                              config=_game_config(args))
    s1, s2 = sweep_updates(stage1, window, template, workers=args.workers)
    for label, stats in (("stage 1", s1), ("stage 2", s2)):
        print(f"# {label}")
        for st in stats:
            print(f"  N={st.spec.ca_params.updates_n:<3d} avg={st.avg:9.2f} "
                  f"stddev={st.stddev:8.2f} min={st.min} max={st.max}")
    write_csv(s1 + s2, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_compare(args) -> int:
    stats = []
    for path in args.csv:
        try:
            stats.extend(read_csv(path))
        except (KeyError, ValueError):
            stats.extend(load_human_results(path))
    print(compare_report(stats), end="")
    return 0


def cmd_play(args) -> int:
    maze = load_maze(args.maze)
    config = _game_config(args)
    state = new_game(maze, config, args.seed)
    params = CAParams(updates_n=args.updates)
    if args.pacman == "ca":
        pacman = CAPacmanController(params, seed=derive_seed(args.seed, "pacman"))
    else:
        pacman = starter_pacman()
    ghosts = random_ghost_team(derive_seed(args.seed, "ghosts"))
    observer = (CAPacmanController(params, seed=derive_seed(args.seed, "observer"))
                if args.dump_ca and args.pacman != "ca" else None)
    levels = 0
    while not state.over:
        move = pacman(state)
        if args.dump_ca:
            if observer is not None:
                observer(state)
                grid = observer.last_grid
            else:
                grid = pacman.last_grid
            print(f"-- tick {state.tick + 1}")
            print(render_values(grid), end="")
            print(render_decay(grid), end="")
        result = step(state, move, ghosts(state))
        levels += sum(e.kind == EventKind.LEVEL_CLEARED for e in result.events)
    print(f"score={state.score} levels_cleared={levels} ticks={state.tick} "
          f"seed={args.seed}")
    return 0


def cmd_serve(args) -> int:
    from .server import SessionConfig, serve
    cfg = SessionConfig(port=args.port, tick_ms=args.tick_ms, mode=args.mode,
                        maze_path=args.maze, seed=args.seed,
                        overlay=args.overlay, results_path=args.results,
                        updates_n=args.updates, game_config=_game_config(args),
                        static_dir=args.static)
    serve(cfg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capman")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pacman_choices=True):
        if pacman_choices:
            p.add_argument("--pacman", default="ca",
                           help="ca | starter | human-replay:<results.csv>")
        p.add_argument("--updates", type=int, default=17,
                       help="CA update passes per tick")
        p.add_argument("--maze", default=bundled_maze_path("classic"))
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--config", help="key=value game config file")

    p = sub.add_parser("bench", help="run one seeded experiment")
    common(p)
    p.add_argument("--ghosts", default="random", choices=["random"])
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("sweep", help="two-stage update-count sweep")
    common(p, pacman_choices=False)
    p.add_argument("--stage1", default="1:91:10", help="lo:hi:step grid")
    p.add_argument("--stage2", help="lo:hi window (default: around stage-1 best)")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("compare", help="rank experiment CSVs into one table")
    p.add_argument("csv", nargs="+")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("play", help="headless single game")
    common(p)
    p.add_argument("--dump-ca", action="store_true",
                   help="print the CA value and decay matrices every tick")
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("serve", help="session server for the browser UI")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--maze", default=bundled_maze_path("classic"))
    p.add_argument("--mode", default="human", choices=["human", "watch-ai"])
    p.add_argument("--tick-ms", type=int, default=150)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--updates", type=int, default=17)
    p.add_argument("--results", help="append finished games to this CSV")
    p.add_argument("--overlay", action="store_true",
                   help="stream the CA decay field with each state frame")
    p.add_argument("--static", help="directory with the built web UI")
    p.add_argument("--config", help="key=value game config file")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ControllerFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (MazeError, MazeLoadError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
