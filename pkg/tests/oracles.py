"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written against the *rules*, not the
package internals: hand-rolled adjacency, a push-style dict-based CA pass,
a nearest-dominating-source flood fill, and an event-log score replay.
"""

from __future__ import annotations

import numpy as np

from capman.ca import CAGrid, CHAR_TO_CODE, CODE_TO_CHAR, DOMINATES
from capman.engine import EventKind, GameConfig
from capman.maze import Maze, Position

# Strength of a propagating wave; mirrors the domination table's total
# order on source values.
STRENGTH = {"E": 4, "P": 3, "G": 2, "p": 1}


def flood_distances(maze: Maze, start: Position) -> dict[Position, int]:
    """Brute-force BFS with hand-rolled adjacency (including tunnel wrap)."""
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            candidates = [(p.col, p.row - 1), (p.col, p.row + 1),
                          (p.col - 1, p.row), (p.col + 1, p.row)]
            if p.row in maze.tunnel_rows:
                if p.col == 0:
                    candidates.append((maze.width - 1, p.row))
                if p.col == maze.width - 1:
                    candidates.append((0, p.row))
            for col, row in candidates:
                q = Position(col, row)
                if q in maze.walkable and q not in dist:
                    dist[q] = dist[p] + 1
                    nxt.append(q)
        frontier = nxt
    return dist


def make_grid(maze: Maze, stamps: dict[Position, str], pacman: Position) -> CAGrid:
    """Build a CAGrid with an arbitrary source layout (tests only)."""
    idx = maze.cell_index()
    n = len(idx)
    value = np.zeros(n, dtype=np.int8)
    decay = np.ones(n, dtype=np.float64)
    source = np.zeros(n, dtype=np.bool_)
    for p, ch in stamps.items():
        value[idx[p]] = CHAR_TO_CODE[ch]
        source[idx[p]] = True
    value[idx[pacman]] = CHAR_TO_CODE["@"]
    source[idx[pacman]] = False
    return CAGrid(maze, value, decay, source, pacman)


def nearest_dominating_oracle(maze: Maze, stamps: dict[Position, str],
                              pacman: Position, decay_keep: float = 0.9):
    """Expected jitter-free fixed point of the domination CA.

    Waves cannot cross source cells or Pac-Man, so each source floods the
    source-free graph. A cell ends up owned by the strongest value class
    that reaches it, at the distance of that class's nearest source
    (strength order E > P > G > p). Returns ({pos: (char, decay)}, settle)
    where settle is the farthest any final owner had to travel.
    """
    blocked = set(stamps) | {pacman}

    def source_flood(s: Position) -> dict[Position, int]:
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for p in frontier:
                for q in _adjacent(maze, p):
                    if q in blocked or q in dist:
                        continue
                    dist[q] = dist[p] + 1
                    nxt.append(q)
            frontier = nxt
        return dist

    floods = {s: source_flood(s) for s in stamps}
    expected: dict[Position, tuple[str, float]] = {}
    settle = 0
    for q in maze.walkable:
        if q == pacman:
            expected[q] = ("@", 1.0)
            continue
        if q in stamps:
            expected[q] = (stamps[q], 1.0)
            continue
        best = None  # (strength, -dist, char)
        for s, ch in stamps.items():
            d = floods[s].get(q)
            if d is None:
                continue
            key = (STRENGTH[ch], -d)
            if best is None or key > best[0]:
                best = (key, ch, d)
        if best is None:
            expected[q] = ("e", 1.0)
        else:
            expected[q] = (best[1], decay_keep ** best[2])
            settle = max(settle, best[2])
    return expected, settle


def _adjacent(maze: Maze, p: Position) -> list[Position]:
    out = []
    candidates = [(p.col, p.row - 1), (p.col, p.row + 1),
                  (p.col - 1, p.row), (p.col + 1, p.row)]
    if p.row in maze.tunnel_rows:
        if p.col == 0:
            candidates.append((maze.width - 1, p.row))
        if p.col == maze.width - 1:
            candidates.append((0, p.row))
    for col, row in candidates:
        q = Position(col, row)
        if q in maze.walkable:
            out.append(q)
    return out


def reference_update(grid: CAGrid, jitter: np.ndarray, decay_keep: float,
                     jitter_scale: float) -> dict[Position, tuple[str, float]]:
    """Push-style dict re-implementation of one synchronous update pass.

    jitter is indexed like the package kernel's: [proposing cell index,
    direction slot U/D/L/R]. Returns the full post-pass cell map.
    """
    maze = grid.maze
    idx = maze.cell_index()
    before = {p: (CODE_TO_CHAR[grid.value[i]], float(grid.decay[i]))
              for p, i in idx.items()}
    slot_of = {"Up": 0, "Down": 1, "Left": 2, "Right": 3}

    proposals: dict[Position, list[tuple[int, float]]] = {}
    for p, (ch, dec) in before.items():
        if ch in ("e", "@"):
            continue
        for d, q in maze.neighbours(p):
            target_ch = before[q][0]
            if target_ch not in DOMINATES[ch]:
                continue
            r = jitter[idx[p], slot_of[d.value]]
            new_decay = dec * decay_keep + r * (dec * jitter_scale)
            proposals.setdefault(q, []).append((STRENGTH[ch], new_decay))

    after = dict(before)
    for q, props in proposals.items():
        if bool(grid.source[idx[q]]) or before[q][0] == "@":
            continue
        strength, dec = max(props)
        winner = {v: k for k, v in STRENGTH.items()}[strength]
        cur_ch, cur_dec = before[q]
        if winner == cur_ch:
            if dec > cur_dec:
                after[q] = (winner, dec)
        else:
            after[q] = (winner, dec)
    return after


def replay_score(events, cfg: GameConfig) -> int:
    """Recompute the score purely from the event log (doubling included)."""
    score = 0
    window = 0
    for ev in events:
        if ev.kind == EventKind.ATE_PILL:
            score += cfg.pill_score
        elif ev.kind == EventKind.ATE_POWERPILL:
            score += cfg.powerpill_score
            window = 0
        elif ev.kind == EventKind.ATE_GHOST:
            score += min(cfg.ghost_score_base * 2 ** window,
                         cfg.ghost_score_base * 8)
            window += 1
        elif ev.kind in (EventKind.LOST_LIFE, EventKind.LEVEL_CLEARED,
                         EventKind.LEVEL_TIMEOUT):
            window = 0
    return score
