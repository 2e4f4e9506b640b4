"""Seeded experiment batches, the two-stage update-count sweep, CSV output
and controller comparison reports.

Game i of an experiment always runs with seed base_seed + i, so any single
game can be replayed in isolation. Parallel execution fans games out to a
process pool and gathers by index; results are identical to a sequential
run. Reported standard deviation is the population one.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .baselines import StarterConfig, random_ghost_team, starter_pacman
from .ca import CAParams, ca_pacman
from .engine import GameConfig, GameResult, run_game
from .maze import Maze, MazeError, load_maze

log = logging.getLogger(__name__)

# Soft real-time budget per controller call; overruns are logged, not enforced.
TICK_BUDGET_MS = 40.0


class MazeLoadError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark configuration: a Pac-Man controller vs random ghosts."""

    pacman: str                      # "ca" | "starter"
    maze: str                        # maze file path
    games: int = 100
    base_seed: int = 0
    ca_params: CAParams | None = None
    starter: StarterConfig = field(default_factory=StarterConfig)
    config: GameConfig = field(default_factory=GameConfig)
    ghosts: str = "random"
    label: str | None = None

    def __post_init__(self):
        if self.games < 1:
            raise ValueError("games must be >= 1")
        if self.pacman == "ca" and self.ca_params is None:
            raise ValueError("ca controller needs ca_params")
        if self.pacman not in ("ca", "starter"):
            raise ValueError(f"unknown pacman controller {self.pacman!r}")
        if self.ghosts != "random":
            raise ValueError(f"unknown ghost controller {self.ghosts!r}")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.pacman == "ca":
            return f"ca[{self.ca_params.updates_n}]"
        return self.pacman


@dataclass(frozen=True)
class ExperimentStats:
    spec: ExperimentSpec
    avg: float
    stddev: float
    min: int
    max: int
    per_game: tuple[GameResult, ...] | None


@lru_cache(maxsize=16)
def _maze_cache(path: str) -> Maze:
    maze = load_maze(path)
    maze.distance_matrix()  # warm per-process caches once, not per game
    return maze


def _timed(controller, counter: list):
    def wrapped(state):
        t0 = time.perf_counter()
        move = controller(state)
        if (time.perf_counter() - t0) * 1000.0 > TICK_BUDGET_MS:
            counter[0] += 1
        return move
    return wrapped


def _play_one(spec: ExperimentSpec, seed: int) -> tuple[GameResult, int]:
    maze = _maze_cache(spec.maze)
    if spec.pacman == "ca":
        pc = ca_pacman(spec.ca_params)
    else:
        cfg = spec.starter
        pc = lambda s: starter_pacman(cfg)  # noqa: E731 - deterministic, seed unused
    slow = [0]
    budgeted = lambda s: _timed(pc(s), slow)  # noqa: E731
    result = run_game(budgeted, random_ghost_team, maze, spec.config, seed)
    return result, slow[0]


def resolve_workers(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("CAPMAN_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> ExperimentStats:
    """Play spec.games seeded games and aggregate the final scores."""
    try:
        _maze_cache(spec.maze)
    except (OSError, MazeError) as exc:
        raise MazeLoadError(f"cannot load maze {spec.maze!r}: {exc}") from exc

    seeds = [spec.base_seed + i for i in range(spec.games)]
    workers = min(resolve_workers(workers), spec.games)
    if workers <= 1:
        outcomes = [_play_one(spec, s) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_play_one, [spec] * len(seeds), seeds,
                                     chunksize=max(1, len(seeds) // (workers * 4))))

    per_game = tuple(r for r, _ in outcomes)
    slow_ticks = sum(s for _, s in outcomes)
    if slow_ticks:
        log.warning("%s: %d controller calls over the %.0f ms budget",
                    spec.name, slow_ticks, TICK_BUDGET_MS)

    scores = np.array([r.final_score for r in per_game], dtype=np.float64)
    avg = float(scores.mean())
    stddev = float(scores.std())
    # Two-pass reference guards the aggregation against numerical drift.
    two_pass = math.sqrt(sum((s - avg) ** 2 for s in scores.tolist()) / len(scores))
    if abs(stddev - two_pass) > 1e-6 * max(1.0, two_pass):
        raise RuntimeError(f"stddev drift: {stddev} vs two-pass {two_pass}")
    return ExperimentStats(spec=spec, avg=avg, stddev=stddev,
                           min=int(scores.min()), max=int(scores.max()),
                           per_game=per_game)


def sweep_updates(stage1: list[int], stage2_window: tuple[int, int] | None,
                  template: ExperimentSpec, workers: int | None = None,
                  ) -> tuple[list[ExperimentStats], list[ExperimentStats]]:
    """Two-stage update-count sweep.

    Stage 1 runs the coarse grid; stage 2 runs every N inside the window,
    which defaults to one stage-1 grid step either side of the stage-1 best.
    """
    if not stage1:
        raise ValueError("stage1 grid is empty")
    if template.ca_params is None:
        template = replace(template, pacman="ca", ca_params=CAParams(updates_n=1))

    def run_n(n: int) -> ExperimentStats:
        spec = replace(template, pacman="ca",
                       ca_params=replace(template.ca_params, updates_n=n))
        return run_experiment(spec, workers=workers)

    stage1_stats = [run_n(n) for n in stage1]
    if stage2_window is None:
        best = max(range(len(stage1)), key=lambda i: stage1_stats[i].avg)
        lo = stage1[max(0, best - 1)]
        hi = stage1[min(len(stage1) - 1, best + 1)]
    else:
        lo, hi = stage2_window
    stage2_stats = [run_n(n) for n in range(lo, hi + 1)]
    return stage1_stats, stage2_stats


def write_csv(stats: list[ExperimentStats], path) -> None:
    """Rows of `updates,games,avg,stddev,min,max,seed`; reals at 2 decimals."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["updates", "games", "avg", "stddev", "min", "max", "seed"])
        for st in stats:
            updates = (st.spec.ca_params.updates_n if st.spec.pacman == "ca"
                       else st.spec.name)
            w.writerow([updates, st.spec.games, f"{st.avg:.2f}", f"{st.stddev:.2f}",
                        st.min, st.max, st.spec.base_seed])


def read_csv(path) -> list[ExperimentStats]:
    """Load experiment rows written by write_csv (per-game detail is gone)."""
    out = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            label = (f"ca[{row['updates']}]" if row["updates"].isdigit()
                     else row["updates"])
            spec = ExperimentSpec(pacman="starter", maze="", games=int(row["games"]),
                                  base_seed=int(row["seed"]), label=label)
            out.append(ExperimentStats(spec=spec, avg=float(row["avg"]),
                                       stddev=float(row["stddev"]),
                                       min=int(row["min"]), max=int(row["max"]),
                                       per_game=None))
    return out


def load_human_results(path) -> list[ExperimentStats]:
    """Aggregate a session-server results file into per-participant stats.

    Expects `participant,game_index,score,levels,ticks,seed` rows.
    """
    games: dict[str, list[GameResult]] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            games.setdefault(row["participant"], []).append(GameResult(
                final_score=int(row["score"]), levels_cleared=int(row["levels"]),
                ticks_survived=int(row["ticks"]), seed=int(row["seed"])))
    out = []
    for participant in sorted(games):
        results = games[participant]
        scores = np.array([r.final_score for r in results], dtype=np.float64)
        spec = ExperimentSpec(pacman="starter", maze="", games=len(results),
                              base_seed=results[0].seed,
                              label=f"human:{participant}")
        out.append(ExperimentStats(spec=spec, avg=float(scores.mean()),
                                   stddev=float(scores.std()),
                                   min=int(scores.min()), max=int(scores.max()),
                                   per_game=tuple(results)))
    return out


def compare_report(stats: list[ExperimentStats]) -> str:
    """Plain-text comparison table, best average first."""
    if len(stats) < 2:
        raise ValueError("need at least two experiments to compare")
    ordered = sorted(stats, key=lambda s: (-s.avg, s.spec.name))
    rows = [("Controller", "Average", "StdDev", "Min", "Max")]
    for st in ordered:
        rows.append((st.spec.name, f"{st.avg:.2f}", f"{st.stddev:.2f}",
                     str(st.min), str(st.max)))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
             for row in rows]
    return "\n".join(lines) + "\n"
