"""Cellular-automaton influence-map controller.

Every tick the grid is rebuilt from the game state: pills, power pills and
ghosts are stamped as sources at decay 1, everything else is empty. N
synchronous update passes then let each non-empty cell push its value onto
neighbours it dominates, decay shrinking multiplicatively per step with a
small jitter. Pac-Man finally picks a move from his four adjacent cells
alone: chase the strongest goal value, break value ties on decay (nearest
goal / farthest ghost).

Cell values and the domination table:

    '@' Pac-Man    dominates nothing, dominated by nothing
    'E' edible     dominates p, P, G, e
    'P' power pill dominates p, G, e
    'G' ghost      dominates p, G, e
    'p' pill       dominates e
    'e' empty      dominates nothing

Updates are double-buffered: all proposals read the pre-update grid, then
each target keeps the strongest (value rank, then decay) valid proposal.
A same-value overwrite (only G re-dominates G) needs strictly higher decay.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import GameState
from .maze import DIRECTION_ORDER, Direction, Maze, Position

try:
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a normal dependency
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


class GameIsOver(Exception):
    pass


class NoNeighbours(Exception):
    pass


# Cell value codes. Order matters: 1..4 is the wave strength order used to
# resolve competing proposals (E > P > G > p).
EMPTY, PILL, GHOST, POWERPILL, EDIBLE, PACMAN = 0, 1, 2, 3, 4, 5
CODE_TO_CHAR = "epGPE@"
CHAR_TO_CODE = {c: i for i, c in enumerate(CODE_TO_CHAR)}

DOMINATES: dict[str, frozenset[str]] = {
    "@": frozenset(),
    "E": frozenset("pPGe"),
    "p": frozenset("e"),
    "P": frozenset("pGe"),
    "G": frozenset("pGe"),
    "e": frozenset(),
}


def domination_matrix(table: dict[str, frozenset[str]] = DOMINATES) -> np.ndarray:
    """6x6 bool matrix m[a, b]: value-code a dominates value-code b."""
    m = np.zeros((6, 6), dtype=np.bool_)
    for a, dominated in table.items():
        for b in dominated:
            m[CHAR_TO_CODE[a], CHAR_TO_CODE[b]] = True
    return m


_DOM = domination_matrix()
_DOM.setflags(write=False)


@dataclass(frozen=True)
class CAParams:
    """Update count and decay-rule constants.

    Defaults give the decay rule D = PD - PD/10 + R*PD/1000 with
    R ~ U[-0.5, 0.5]. decay_keep=1 with jitter_scale=0 disables decay
    entirely (test mode for the value-only controller).
    """

    updates_n: int
    decay_keep: float = 0.9
    jitter_scale: float = 1.0 / 1000.0
    jitter_half_range: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if self.updates_n < 0:
            raise ValueError("updates_n must be >= 0")
        if not 0.0 < self.decay_keep <= 1.0:
            raise ValueError("decay_keep must be in (0, 1]")
        if self.jitter_scale < 0 or self.jitter_half_range < 0:
            raise ValueError("jitter terms must be non-negative")
        if self.decay_keep - self.jitter_scale * self.jitter_half_range <= 0:
            raise ValueError("jitter large enough to zero out decay")


@dataclass(frozen=True)
class CACell:
    pos: Position
    value: str
    decay: float
    is_source: bool


class CAGrid:
    """Per-tick lattice over the maze's walkable cells.

    Cell data lives in flat arrays indexed by Maze.cell_index(); the
    mapping view is materialized on demand for inspection and tests.
    """

    def __init__(self, maze: Maze, value: np.ndarray, decay: np.ndarray,
                 source: np.ndarray, pacman_pos: Position):
        self.maze = maze
        self.value = value
        self.decay = decay
        self.source = source
        self.pacman_pos = pacman_pos

    def cell(self, pos: Position) -> CACell:
        i = self.maze.cell_index()[pos]
        return CACell(pos=pos, value=CODE_TO_CHAR[self.value[i]],
                      decay=float(self.decay[i]), is_source=bool(self.source[i]))

    def cells(self) -> dict[Position, CACell]:
        return {p: self.cell(p) for p in self.maze.positions()}

    def copy(self) -> "CAGrid":
        return CAGrid(self.maze, self.value.copy(), self.decay.copy(),
                      self.source.copy(), self.pacman_pos)

    def snapshot(self) -> tuple:
        return (self.value.tobytes(), self.decay.tobytes(),
                self.source.tobytes(), self.pacman_pos)


def build_grid(state: GameState) -> CAGrid:
    """Stamp a fresh grid from the game state; no carry-over between ticks."""
    if state.over:
        raise GameIsOver("cannot build a CA grid for a finished game")
    maze = state.maze
    idx = maze.cell_index()
    n = len(idx)
    value = np.zeros(n, dtype=np.int8)
    decay = np.ones(n, dtype=np.float64)
    source = np.zeros(n, dtype=np.bool_)
    for p in state.pills:
        value[idx[p]] = PILL
        source[idx[p]] = True
    for p in state.powerpills:
        value[idx[p]] = POWERPILL
        source[idx[p]] = True
    # Inedible ghosts stamp after edible ones so a shared cell reads as a threat.
    for g in state.ghosts:
        if g.lair_remaining == 0 and g.edible_remaining > 0:
            value[idx[g.pos]] = EDIBLE
            source[idx[g.pos]] = True
    for g in state.ghosts:
        if g.lair_remaining == 0 and g.edible_remaining == 0:
            value[idx[g.pos]] = GHOST
            source[idx[g.pos]] = True
    i = idx[state.pacman]
    value[i] = PACMAN
    decay[i] = 1.0
    source[i] = False
    return CAGrid(maze, value, decay, source, state.pacman)


def decay_step(pd: float, r: float, params: CAParams) -> float:
    """One propagation step of the decay rule."""
    return pd * params.decay_keep + r * (pd * params.jitter_scale)


@njit(cache=True)
def _update_pass(value, decay, source, off, esrc, eslot, jflat, decay_keep,
                 jitter_scale, dom, base, jbase, new_value, new_decay):
    n = value.shape[0]
    for c in range(n):
        base[c] = decay[c] * decay_keep
        jbase[c] = decay[c] * jitter_scale
    changed = 0
    for t in range(n):
        cur_v = value[t]
        new_value[t] = cur_v
        new_decay[t] = decay[t]
        if source[t] or cur_v == 5:
            continue
        best_v = -1
        best_d = 0.0
        for e in range(off[t], off[t + 1]):
            c = esrc[e]
            v = value[c]
            if v == 0 or v == 5:
                continue
            if not dom[v, cur_v]:
                continue
            d = base[c] + jflat[eslot[e]] * jbase[c]
            if v > best_v or (v == best_v and d > best_d):
                best_v = v
                best_d = d
        if best_v < 0:
            continue
        if best_v == cur_v:
            if best_d > decay[t]:
                new_decay[t] = best_d
                changed += 1
        else:
            new_value[t] = best_v
            new_decay[t] = best_d
            changed += 1
    return changed


@njit(cache=True, parallel=True)
def _update_pass_parallel(value, decay, source, off, esrc, eslot, jflat,
                          decay_keep, jitter_scale, dom, base, jbase,
                          new_value, new_decay):
    n = value.shape[0]
    for c in range(n):
        base[c] = decay[c] * decay_keep
        jbase[c] = decay[c] * jitter_scale
    changed = 0
    for t in prange(n):
        cur_v = value[t]
        new_value[t] = cur_v
        new_decay[t] = decay[t]
        if source[t] or cur_v == 5:
            continue
        best_v = -1
        best_d = 0.0
        for e in range(off[t], off[t + 1]):
            c = esrc[e]
            v = value[c]
            if v == 0 or v == 5:
                continue
            if not dom[v, cur_v]:
                continue
            d = base[c] + jflat[eslot[e]] * jbase[c]
            if v > best_v or (v == best_v and d > best_d):
                best_v = v
                best_d = d
        if best_v < 0:
            continue
        if best_v == cur_v:
            if best_d > decay[t]:
                new_decay[t] = best_d
                changed += 1
        else:
            new_value[t] = best_v
            new_decay[t] = best_d
            changed += 1
    return changed


@njit(cache=True)
def _run_passes(value, decay, source, off, esrc, eslot, jflat2, decay_keep,
                jitter_scale, dom, early_exit, base, jbase,
                new_value, new_decay):
    """jflat2.shape[0] passes in place; one kernel call per game tick."""
    for u in range(jflat2.shape[0]):
        changed = _update_pass(value, decay, source, off, esrc, eslot,
                               jflat2[u], decay_keep, jitter_scale, dom,
                               base, jbase, new_value, new_decay)
        value[:] = new_value
        decay[:] = new_decay
        if early_exit and changed == 0:
            break


def ca_update(grid: CAGrid, params: CAParams, rng: np.random.Generator,
              jitter: np.ndarray | None = None, parallel: bool = False) -> int:
    """One synchronous update pass, in place. Returns the changed-cell count.

    jitter, when given, must be an (n_cells, 4) array of R values indexed by
    proposing cell and proposal direction; otherwise one is drawn from rng.
    The parallel pass is bit-identical to the sequential one because cell
    results are independent and jitter is pre-drawn.
    """
    n = grid.value.shape[0]
    if jitter is None:
        jitter = rng.uniform(-params.jitter_half_range, params.jitter_half_range,
                             size=(n, 4))
    off, esrc, eslot = grid.maze.edge_csr()
    new_value = np.empty_like(grid.value)
    new_decay = np.empty_like(grid.decay)
    scratch = np.empty(n), np.empty(n)
    kernel = _update_pass_parallel if parallel else _update_pass
    changed = kernel(grid.value, grid.decay, grid.source, off, esrc, eslot,
                     np.ascontiguousarray(jitter).reshape(-1),
                     params.decay_keep, params.jitter_scale, _DOM,
                     scratch[0], scratch[1], new_value, new_decay)
    grid.value, grid.decay = new_value, new_decay
    return int(changed)


def run_updates(grid: CAGrid, params: CAParams, rng: np.random.Generator,
                early_exit: bool = False, parallel: bool = False) -> CAGrid:
    """Apply exactly updates_n passes (the controller's per-tick loop).

    The whole tick's jitter is drawn as one (updates_n, n_cells, 4) tensor,
    then the passes run inside a single kernel call. early_exit stops once
    a pass changes nothing; off by default so the update count stays the
    controller's behavioural knob.
    """
    if params.updates_n == 0:
        return grid
    n = grid.value.shape[0]
    jitter3 = rng.uniform(-params.jitter_half_range, params.jitter_half_range,
                          size=(params.updates_n, n, 4))
    if parallel:
        for u in range(params.updates_n):
            changed = ca_update(grid, params, rng, jitter=jitter3[u], parallel=True)
            if early_exit and changed == 0:
                break
        return grid
    off, esrc, eslot = grid.maze.edge_csr()
    _run_passes(grid.value, grid.decay, grid.source, off, esrc, eslot,
                jitter3.reshape(params.updates_n, -1),
                params.decay_keep, params.jitter_scale, _DOM, bool(early_exit),
                np.empty(n), np.empty(n),
                np.empty_like(grid.value), np.empty_like(grid.decay))
    return grid


# Move choice: value priority best-to-worst, then decay inside a value class
# (highest for goals, lowest for ghosts = farthest threat).
_PRIORITY = {EDIBLE: 0, POWERPILL: 1, PILL: 2, EMPTY: 3, GHOST: 4}


def best_move(grid: CAGrid, rng: np.random.Generator) -> Direction:
    """Pick Pac-Man's move from his adjacent cells only."""
    maze = grid.maze
    idx = maze.cell_index()
    entries = []
    for d in DIRECTION_ORDER:
        q = maze.shift(grid.pacman_pos, d)
        if q is not None:
            i = idx[q]
            entries.append((d, int(grid.value[i]), float(grid.decay[i])))
    if not entries:
        raise NoNeighbours(f"no walkable neighbours at {grid.pacman_pos}")
    best_rank = min(_PRIORITY[v] for _, v, _ in entries)
    group = [e for e in entries if _PRIORITY[e[1]] == best_rank]
    code = group[0][1]
    if code == EMPTY:
        tied = group
    elif code == GHOST:
        low = min(dec for _, _, dec in group)
        tied = [e for e in group if e[2] == low]
    else:
        high = max(dec for _, _, dec in group)
        tied = [e for e in group if e[2] == high]
    if len(tied) > 1:
        return tied[int(rng.integers(len(tied)))][0]
    return tied[0][0]


class CAPacmanController:
    """Per tick: rebuild grid, run updates_n passes, read adjacent cells.

    Stateless across ticks apart from the PRNG stream. The grid of the most
    recent decision stays on last_grid for overlays and debug dumps.
    """

    def __init__(self, params: CAParams, seed: int | None = None,
                 parallel: bool = False):
        self.params = params
        self.parallel = parallel
        self._rng = np.random.default_rng(params.rng_seed if seed is None else seed)
        self.last_grid: CAGrid | None = None

    def __call__(self, state: GameState) -> Direction:
        grid = build_grid(state)
        run_updates(grid, self.params, self._rng, parallel=self.parallel)
        self.last_grid = grid
        return best_move(grid, self._rng)


def ca_pacman(params: CAParams):
    """Controller factory for run_game; the game hands in the per-run seed."""
    def make(seed: int) -> CAPacmanController:
        return CAPacmanController(params, seed=seed)
    return make


def render_values(grid: CAGrid) -> str:
    """Value-character matrix; walls are '#'."""
    idx = grid.maze.cell_index()
    rows = []
    for row in range(grid.maze.height):
        chars = []
        for col in range(grid.maze.width):
            p = Position(col, row)
            chars.append(CODE_TO_CHAR[grid.value[idx[p]]] if p in idx else "#")
        rows.append("".join(chars))
    return "\n".join(rows) + "\n"


def render_decay(grid: CAGrid) -> str:
    """Decay matrix at fixed 4-decimal cells; walls are '######'."""
    idx = grid.maze.cell_index()
    rows = []
    for row in range(grid.maze.height):
        cells = []
        for col in range(grid.maze.width):
            p = Position(col, row)
            cells.append(f"{grid.decay[idx[p]]:.4f}" if p in idx else "######")
        rows.append(" ".join(cells))
    return "\n".join(rows) + "\n"
