"""Comparison controllers: random ghost team, rule-based Pac-Man, and the
human-input adapter the session server feeds."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .engine import GameState, legal_moves
from .maze import Direction


class RandomGhostTeam:
    """Each ghost picks uniformly among all legal moves (reversal included)
    at junctions; in corridors it follows the corridor; dead ends reverse."""

    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def __call__(self, state: GameState) -> list[Direction]:
        dirs = []
        for g in state.ghosts:
            if g.lair_remaining > 0:
                continue
            moves = legal_moves(state, g.id)
            if len(moves) >= 3 or g.facing == Direction.NEUTRAL:
                dirs.append(self._rng.choice(moves))
            elif len(moves) == 1:
                dirs.append(moves[0])
            else:
                forward = [d for d in moves if d != g.facing.opposite]
                dirs.append(forward[0] if forward else moves[0])
        return dirs


def random_ghost_team(seed: int) -> RandomGhostTeam:
    return RandomGhostTeam(seed)


@dataclass(frozen=True)
class StarterConfig:
    flee_distance: int = 20
    chase_edible: bool = True

    def __post_init__(self):
        if self.flee_distance <= 0:
            raise ValueError("flee_distance must be > 0")


class StarterPacman:
    """Three fixed rules in strict priority: flee a close inedible ghost,
    chase the nearest edible ghost, else head for the nearest pill.

    Deterministic: ties fall back to Up, Down, Left, Right order.
    """

    def __init__(self, cfg: StarterConfig):
        self.cfg = cfg

    def __call__(self, state: GameState) -> Direction:
        maze = state.maze
        dm = maze.distance_matrix()
        idx = maze.cell_index()
        pac = idx[state.pacman]
        steps = maze.neighbours(state.pacman)

        threats = [idx[g.pos] for g in state.ghosts
                   if g.lair_remaining == 0 and g.edible_remaining == 0]
        close = [t for t in threats if dm[pac, t] <= self.cfg.flee_distance]
        if close:
            return max(steps, key=lambda dq: min(dm[idx[dq[1]], t] for t in close))[0]

        edible = [idx[g.pos] for g in state.ghosts
                  if g.lair_remaining == 0 and g.edible_remaining > 0]
        if edible and self.cfg.chase_edible:
            target = min(edible, key=lambda t: dm[pac, t])
            return min(steps, key=lambda dq: dm[idx[dq[1]], target])[0]

        goals = sorted(state.pills | state.powerpills)
        if not goals:
            return Direction.NEUTRAL
        target = idx[min(goals, key=lambda g: dm[pac, idx[g]])]
        return min(steps, key=lambda dq: dm[idx[dq[1]], target])[0]


def starter_pacman(cfg: StarterConfig = StarterConfig()) -> StarterPacman:
    return StarterPacman(cfg)


class HumanInputQueue:
    """Pending direction presses; single writer, single reader, latest wins."""

    def __init__(self):
        self._pending: deque[tuple[Direction, int]] = deque()

    def push(self, direction: Direction, received_tick: int = 0) -> None:
        self._pending.append((direction, received_tick))

    def drain_latest(self) -> Direction | None:
        """Consume everything pending, returning the most recent direction."""
        latest = None
        while self._pending:
            latest = self._pending.popleft()[0]
        return latest

    def __len__(self) -> int:
        return len(self._pending)


class HumanPacman:
    """Replays queued presses: the latest press becomes the desired heading,
    held until it is legal; meanwhile the previous heading is kept."""

    def __init__(self, queue: HumanInputQueue):
        self.queue = queue
        self._desired = Direction.NEUTRAL
        self._heading = Direction.NEUTRAL

    def __call__(self, state: GameState) -> Direction:
        latest = self.queue.drain_latest()
        if latest is not None:
            self._desired = latest
        moves = legal_moves(state, "pacman")
        if self._desired in moves:
            self._heading = self._desired
            return self._heading
        if self._heading in moves:
            return self._heading
        return Direction.NEUTRAL


def human_pacman(queue: HumanInputQueue) -> HumanPacman:
    return HumanPacman(queue)
