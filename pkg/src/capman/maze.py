"""Maze parsing and walkable-cell graph queries.

Maze files are plain UTF-8 text, one character per cell:

    '#'  wall                    '.'  pill
    ' '  empty corridor          'o'  power pill
    'P'  Pac-Man start           'G'  ghost start
    'H'  lair cell               '='  tunnel corridor cell

A first line starting with ';' is kept as a comment. Rows that carry '='
at both column 0 and column width-1 wrap horizontally. Lines shorter than
the widest line are padded with walls.

A parsed Maze is immutable and safe to share between concurrent games.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np


class Position(NamedTuple):
    col: int
    row: int


class Direction(Enum):
    UP = "Up"
    DOWN = "Down"
    LEFT = "Left"
    RIGHT = "Right"
    NEUTRAL = "Neutral"

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITES[self]


_DELTAS = {
    Direction.UP: (0, -1),
    Direction.DOWN: (0, 1),
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
    Direction.NEUTRAL: (0, 0),
}

_OPPOSITES = {
    Direction.UP: Direction.DOWN,
    Direction.DOWN: Direction.UP,
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
    Direction.NEUTRAL: Direction.NEUTRAL,
}

# Fixed scan order used everywhere a direction list is produced.
DIRECTION_ORDER = (Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT)


class MazeError(Exception):
    pass


class UnknownCharacter(MazeError):
    def __init__(self, char: str, position: Position):
        self.char = char
        self.position = position
        super().__init__(f"unknown maze character {char!r} at {position}")


class NoPacmanStart(MazeError):
    pass


class NoGhostStart(MazeError):
    pass


class DisconnectedMaze(MazeError):
    pass


class DeadCell(MazeError):
    def __init__(self, position: Position):
        self.position = position
        super().__init__(f"walkable cell with no walkable neighbour at {position}")


class NotWalkable(MazeError):
    def __init__(self, position: Position):
        self.position = position
        super().__init__(f"position {position} is not walkable")


_WALKABLE_CHARS = {" ", ".", "o", "P", "G", "H", "="}
_ALL_CHARS = _WALKABLE_CHARS | {"#"}


@dataclass(frozen=True)
class Maze:
    """Immutable walkable-cell graph of one maze."""

    width: int
    height: int
    walkable: frozenset[Position]
    pills0: frozenset[Position]
    powerpills0: frozenset[Position]
    pacman_start: Position
    ghost_starts: tuple[Position, ...]
    lair: frozenset[Position]
    tunnel_cells: frozenset[Position]
    tunnel_rows: frozenset[int]
    name: str = ""
    comment: str | None = None
    # Lazily-built lookup caches; never part of equality.
    _caches: dict = field(default_factory=dict, compare=False, repr=False)

    def neighbours(self, p: Position) -> list[tuple[Direction, Position]]:
        """Walkable 4-neighbours of p in Up, Down, Left, Right order.

        Tunnel rows wrap horizontally. Raises NotWalkable for non-cells.
        """
        if p not in self.walkable:
            raise NotWalkable(p)
        out = []
        for d in DIRECTION_ORDER:
            q = self.shift(p, d)
            if q is not None:
                out.append((d, q))
        return out

    def shift(self, p: Position, d: Direction) -> Position | None:
        """Target of moving one step from p in direction d, or None if blocked."""
        dc, dr = d.delta
        col, row = p.col + dc, p.row + dr
        if p.row in self.tunnel_rows:
            if col < 0:
                col = self.width - 1
            elif col >= self.width:
                col = 0
        q = Position(col, row)
        return q if q in self.walkable else None

    def bfs_distance(self, a: Position, b: Position) -> int:
        """Shortest walkable path length in steps (tunnel wrap included)."""
        dm = self.distance_matrix()
        idx = self.cell_index()
        if a not in idx:
            raise NotWalkable(a)
        if b not in idx:
            raise NotWalkable(b)
        return int(dm[idx[a], idx[b]])

    # ---- indexed views used by the CA lattice and distance queries ----

    def positions(self) -> list[Position]:
        """Walkable cells in row-major order; index space for the arrays below."""
        if "positions" not in self._caches:
            self._caches["positions"] = sorted(self.walkable, key=lambda p: (p.row, p.col))
        return self._caches["positions"]

    def cell_index(self) -> dict[Position, int]:
        if "index" not in self._caches:
            self._caches["index"] = {p: i for i, p in enumerate(self.positions())}
        return self._caches["index"]

    def neighbour_array(self) -> np.ndarray:
        """(n_cells, 4) int32 cell indices per direction (U,D,L,R); -1 where blocked."""
        if "neigh" not in self._caches:
            idx = self.cell_index()
            arr = np.full((len(idx), 4), -1, dtype=np.int32)
            for p, i in idx.items():
                for k, d in enumerate(DIRECTION_ORDER):
                    q = self.shift(p, d)
                    if q is not None:
                        arr[i, k] = idx[q]
            arr.setflags(write=False)
            self._caches["neigh"] = arr
        return self._caches["neigh"]

    def edge_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR view of incoming edges per cell: (offsets, source cell, source
        slot). Slot = source_index*4 + direction the source proposes along;
        edge order per target follows DIRECTION_ORDER."""
        if "edges" not in self._caches:
            neigh = self.neighbour_array()
            n = neigh.shape[0]
            offsets = np.zeros(n + 1, dtype=np.int32)
            srcs, slots = [], []
            opp = (1, 0, 3, 2)
            for t in range(n):
                for k in range(4):
                    c = neigh[t, k]
                    if c >= 0:
                        srcs.append(c)
                        slots.append(c * 4 + opp[k])
                offsets[t + 1] = len(srcs)
            edges = (offsets, np.array(srcs, dtype=np.int32),
                     np.array(slots, dtype=np.int64))
            for arr in edges:
                arr.setflags(write=False)
            self._caches["edges"] = edges
        return self._caches["edges"]

    def distance_matrix(self) -> np.ndarray:
        """All-pairs BFS distances over walkable cells, int32."""
        if "dist" not in self._caches:
            neigh = self.neighbour_array()
            n = neigh.shape[0]
            dm = np.full((n, n), -1, dtype=np.int32)
            for src in range(n):
                row = dm[src]
                row[src] = 0
                q = deque([src])
                while q:
                    c = q.popleft()
                    dc = row[c] + 1
                    for k in range(4):
                        nb = neigh[c, k]
                        if nb >= 0 and row[nb] < 0:
                            row[nb] = dc
                            q.append(nb)
            dm.setflags(write=False)
            self._caches["dist"] = dm
        return self._caches["dist"]

    def diameter(self) -> int:
        return int(self.distance_matrix().max())


def parse_maze(text: str, name: str = "") -> Maze:
    """Parse maze-file text into a Maze, validating all structural invariants."""
    lines = text.split("\n")
    comment = None
    if lines and lines[0].startswith(";"):
        comment = lines[0]
        lines = lines[1:]
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MazeError("empty maze")

    width = max(len(line) for line in lines)
    height = len(lines)
    grid = [line.ljust(width, "#") for line in lines]

    walkable, pills, powerpills, ghost_starts, lair, tunnel_cells = (
        set(), set(), set(), [], set(), set())
    pacman_start = None
    for row, line in enumerate(grid):
        for col, ch in enumerate(line):
            if ch not in _ALL_CHARS:
                raise UnknownCharacter(ch, Position(col, row))
            if ch == "#":
                continue
            p = Position(col, row)
            walkable.add(p)
            if ch == ".":
                pills.add(p)
            elif ch == "o":
                powerpills.add(p)
            elif ch == "P":
                if pacman_start is not None:
                    raise MazeError(f"second Pac-Man start at {p}")
                pacman_start = p
            elif ch == "G":
                ghost_starts.append(p)
            elif ch == "H":
                lair.add(p)
            elif ch == "=":
                tunnel_cells.add(p)

    if pacman_start is None:
        raise NoPacmanStart("maze has no 'P' cell")
    if not ghost_starts:
        raise NoGhostStart("maze has no 'G' cell")

    tunnel_rows = {
        row for row in range(height)
        if Position(0, row) in tunnel_cells and Position(width - 1, row) in tunnel_cells
    }

    maze = Maze(
        width=width,
        height=height,
        walkable=frozenset(walkable),
        pills0=frozenset(pills),
        powerpills0=frozenset(powerpills),
        pacman_start=pacman_start,
        ghost_starts=tuple(ghost_starts),
        lair=frozenset(lair),
        tunnel_cells=frozenset(tunnel_cells),
        tunnel_rows=frozenset(tunnel_rows),
        name=name or (comment.lstrip("; ").strip() if comment else ""),
        comment=comment,
    )
    _validate(maze)
    return maze


def _validate(maze: Maze) -> None:
    for p in maze.walkable:
        if not maze.neighbours(p):
            raise DeadCell(p)
    seen = {maze.pacman_start}
    q = deque([maze.pacman_start])
    while q:
        p = q.popleft()
        for _, nb in maze.neighbours(p):
            if nb not in seen:
                seen.add(nb)
                q.append(nb)
    if seen != maze.walkable:
        missing = next(iter(maze.walkable - seen))
        raise DisconnectedMaze(f"cell {missing} unreachable from Pac-Man start")


def render_maze(maze: Maze) -> str:
    """Serialize a Maze back to file text (inverse of parse_maze)."""
    rows = []
    for row in range(maze.height):
        chars = []
        for col in range(maze.width):
            p = Position(col, row)
            if p not in maze.walkable:
                chars.append("#")
            elif p == maze.pacman_start:
                chars.append("P")
            elif p in maze.ghost_starts:
                chars.append("G")
            elif p in maze.pills0:
                chars.append(".")
            elif p in maze.powerpills0:
                chars.append("o")
            elif p in maze.lair:
                chars.append("H")
            elif p in maze.tunnel_cells:
                chars.append("=")
            else:
                chars.append(" ")
        rows.append("".join(chars))
    body = "\n".join(rows) + "\n"
    if maze.comment is not None:
        return maze.comment + "\n" + body
    return body


def load_maze(path) -> Maze:
    import os
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_maze(text, name=os.path.splitext(os.path.basename(str(path)))[0])
