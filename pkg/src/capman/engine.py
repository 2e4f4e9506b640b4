"""Deterministic tick-based game engine.

One tick: sanitize controller moves, move Pac-Man, move ghosts and tick
their timers, resolve collisions (same cell or cell swap), consume the
pill under Pac-Man, then handle level clear / level timeout / game over.
Everything is a pure function of (maze, config, seed, controller seeds).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, fields
from enum import Enum
from typing import Callable

from .maze import DIRECTION_ORDER, Direction, Maze, Position


class SteppedFinishedGame(Exception):
    pass


class ControllerFault(Exception):
    def __init__(self, role: str, tick: int):
        self.role = role
        self.tick = tick
        super().__init__(f"{role} controller failed at tick {tick}")


@dataclass(frozen=True)
class GameConfig:
    """Engine constants. Ghost bonus doubles per ghost in one power-pill
    window, capped at 8x the base (1600 with defaults)."""

    lives0: int = 3
    pill_score: int = 10
    powerpill_score: int = 50
    ghost_score_base: int = 200
    edible_ticks: int = 120
    lair_ticks: int = 40
    max_ticks_per_level: int = 3000
    max_levels: int = 16
    ghost_count: int = 4

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be > 0")

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str) -> "GameConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith(("#", ";")):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"bad config line {lineno}: {line!r}")
            kwargs[key] = int(value.strip())
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "GameConfig":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_text(f.read())


class EventKind(Enum):
    ATE_PILL = "AtePill"
    ATE_POWERPILL = "AtePowerPill"
    ATE_GHOST = "AteGhost"
    LOST_LIFE = "LostLife"
    LEVEL_CLEARED = "LevelCleared"
    LEVEL_TIMEOUT = "LevelTimeout"
    GAME_OVER = "GameOver"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    ghost_id: int | None = None


@dataclass
class GhostState:
    id: int
    pos: Position
    facing: Direction = Direction.NEUTRAL
    edible_remaining: int = 0
    lair_remaining: int = 0


@dataclass
class GameState:
    maze: Maze
    config: GameConfig
    tick: int
    level: int
    pacman: Position
    pacman_facing: Direction
    ghosts: list[GhostState]
    pills: set[Position]
    powerpills: set[Position]
    score: int
    lives: int
    ghosts_eaten_this_window: int
    rng: random.Random
    over: bool
    level_start_tick: int = 0

    def snapshot(self) -> tuple:
        """Hashable view of everything gameplay-relevant; used by tests and
        the replay-equality checks."""
        return (
            self.tick, self.level, self.pacman, self.pacman_facing,
            tuple((g.pos, g.facing, g.edible_remaining, g.lair_remaining)
                  for g in self.ghosts),
            frozenset(self.pills), frozenset(self.powerpills),
            self.score, self.lives, self.ghosts_eaten_this_window, self.over,
        )


@dataclass(frozen=True)
class StepResult:
    events: list[Event]
    state: GameState


@dataclass(frozen=True)
class GameResult:
    final_score: int
    levels_cleared: int
    ticks_survived: int
    seed: int


# A controller maps the observable state to a move; a factory builds one
# from a derived integer seed so whole runs replay exactly.
PacmanController = Callable[[GameState], Direction]
GhostTeamController = Callable[[GameState], "list[Direction]"]
PacmanFactory = Callable[[int], PacmanController]
GhostTeamFactory = Callable[[int], GhostTeamController]


def derive_seed(seed: int, role: str) -> int:
    """Stable per-role child seed (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(f"{seed}:{role}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def new_game(maze: Maze, config: GameConfig, seed: int) -> GameState:
    starts = maze.ghost_starts
    ghosts = [GhostState(id=i, pos=starts[i % len(starts)])
              for i in range(config.ghost_count)]
    return GameState(
        maze=maze,
        config=config,
        tick=0,
        level=1,
        pacman=maze.pacman_start,
        pacman_facing=Direction.NEUTRAL,
        ghosts=ghosts,
        pills=set(maze.pills0),
        powerpills=set(maze.powerpills0),
        score=0,
        lives=config.lives0,
        ghosts_eaten_this_window=0,
        rng=random.Random(seed),
        over=False,
    )


def legal_moves(state: GameState, actor, no_reverse: bool = False) -> list[Direction]:
    """Directions whose target cell is walkable, in U,D,L,R order.

    actor is "pacman" or a ghost id. With no_reverse, a ghost's reversal is
    excluded unless it is the only move.
    """
    if actor == "pacman":
        pos, facing = state.pacman, state.pacman_facing
        no_reverse = False
    else:
        g = state.ghosts[actor]
        pos, facing = g.pos, g.facing
    moves = [d for d in DIRECTION_ORDER if state.maze.shift(pos, d) is not None]
    if no_reverse and facing != Direction.NEUTRAL:
        forward = [d for d in moves if d != facing.opposite]
        if forward:
            return forward
    return moves


def _sanitize(maze: Maze, pos: Position, facing: Direction, desired) -> Direction:
    if isinstance(desired, Direction) and desired != Direction.NEUTRAL:
        if maze.shift(pos, desired) is not None:
            return desired
    if facing != Direction.NEUTRAL and maze.shift(pos, facing) is not None:
        return facing
    for d in DIRECTION_ORDER:
        if maze.shift(pos, d) is not None:
            return d
    raise AssertionError(f"no legal move from {pos}")  # impossible for a valid maze


def _lair_cell(maze: Maze, ghost_id: int) -> Position:
    cells = sorted(maze.lair) if maze.lair else list(maze.ghost_starts)
    return cells[ghost_id % len(cells)]


def _reset_actors(state: GameState) -> None:
    maze = state.maze
    state.pacman = maze.pacman_start
    state.pacman_facing = Direction.NEUTRAL
    for g in state.ghosts:
        g.pos = maze.ghost_starts[g.id % len(maze.ghost_starts)]
        g.facing = Direction.NEUTRAL
        g.edible_remaining = 0
        g.lair_remaining = 0
    state.ghosts_eaten_this_window = 0


def _reset_board(state: GameState) -> None:
    state.pills = set(state.maze.pills0)
    state.powerpills = set(state.maze.powerpills0)


def step(state: GameState, pacman_dir: Direction, ghost_dirs: list[Direction]) -> StepResult:
    """Advance one tick; mutates and returns the state with the tick's events."""
    if state.over:
        raise SteppedFinishedGame(f"game ended at tick {state.tick}")
    cfg = state.config
    maze = state.maze
    events: list[Event] = []
    state.tick += 1

    pac_prev = state.pacman
    d = _sanitize(maze, pac_prev, state.pacman_facing, pacman_dir)
    state.pacman = maze.shift(pac_prev, d)
    state.pacman_facing = d

    ghost_prev: dict[int, Position] = {}
    dir_iter = iter(ghost_dirs or [])
    for g in state.ghosts:
        ghost_prev[g.id] = g.pos
        if g.lair_remaining > 0:
            g.lair_remaining -= 1
            continue
        gd = _sanitize(maze, g.pos, g.facing, next(dir_iter, Direction.NEUTRAL))
        g.pos = maze.shift(g.pos, gd)
        g.facing = gd
        if g.edible_remaining > 0:
            g.edible_remaining -= 1

    life_lost = False
    for g in state.ghosts:
        if g.lair_remaining > 0:
            continue
        swapped = g.pos == pac_prev and ghost_prev[g.id] == state.pacman
        if g.pos != state.pacman and not swapped:
            continue
        if g.edible_remaining > 0:
            bonus = min(cfg.ghost_score_base * 2 ** state.ghosts_eaten_this_window,
                        cfg.ghost_score_base * 8)
            state.score += bonus
            state.ghosts_eaten_this_window += 1
            g.edible_remaining = 0
            g.lair_remaining = cfg.lair_ticks
            g.pos = _lair_cell(maze, g.id)
            g.facing = Direction.NEUTRAL
            events.append(Event(EventKind.ATE_GHOST, ghost_id=g.id))
        else:
            state.lives -= 1
            _reset_actors(state)
            events.append(Event(EventKind.LOST_LIFE))
            life_lost = True
            break

    if not life_lost:
        if state.pacman in state.pills:
            state.pills.remove(state.pacman)
            state.score += cfg.pill_score
            events.append(Event(EventKind.ATE_PILL))
        elif state.pacman in state.powerpills:
            state.powerpills.remove(state.pacman)
            state.score += cfg.powerpill_score
            state.ghosts_eaten_this_window = 0
            for g in state.ghosts:
                if g.lair_remaining == 0:
                    g.edible_remaining = cfg.edible_ticks
            events.append(Event(EventKind.ATE_POWERPILL))

        if not state.pills and not state.powerpills:
            events.append(Event(EventKind.LEVEL_CLEARED))
            state.level += 1
            _reset_board(state)
            _reset_actors(state)
            state.level_start_tick = state.tick
        elif state.tick - state.level_start_tick >= cfg.max_ticks_per_level:
            events.append(Event(EventKind.LEVEL_TIMEOUT))
            state.level += 1
            _reset_board(state)
            _reset_actors(state)
            state.level_start_tick = state.tick

    if state.lives == 0 or state.level > cfg.max_levels:
        state.over = True
        events.append(Event(EventKind.GAME_OVER))
    return StepResult(events=events, state=state)


def run_game(pc: PacmanFactory, gc: GhostTeamFactory, maze: Maze,
             config: GameConfig, seed: int,
             collect_events: list[Event] | None = None) -> GameResult:
    """Play a full game; a pure function of its arguments.

    pc/gc are factories called with per-role seeds derived from `seed`.
    Pass a list as collect_events to also capture the full event log.
    """
    state = new_game(maze, config, seed)
    pacman = pc(derive_seed(seed, "pacman"))
    ghosts = gc(derive_seed(seed, "ghosts"))
    levels_cleared = 0
    while not state.over:
        try:
            pdir = pacman(state)
        except Exception as exc:
            raise ControllerFault("pacman", state.tick) from exc
        try:
            gdirs = ghosts(state)
        except Exception as exc:
            raise ControllerFault("ghosts", state.tick) from exc
        result = step(state, pdir, gdirs)
        for ev in result.events:
            if ev.kind == EventKind.LEVEL_CLEARED:
                levels_cleared += 1
        if collect_events is not None:
            collect_events.extend(result.events)
    return GameResult(final_score=state.score, levels_cleared=levels_cleared,
                      ticks_survived=state.tick, seed=seed)
