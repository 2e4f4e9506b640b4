"""Show the domination CA turning a board into an influence field.

Three corridor scenarios: plain propagation toward a goal, the symmetric
two-ghost board where plain cell values cannot pick a side, and the same
board made decidable by cell decay. Run: python demos/02_influence_field.py
"""

import numpy as np

from capman.ca import (CAParams, best_move, render_decay, render_values,
                       run_updates)
from capman.maze import Position, parse_maze

import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))
from oracles import make_grid  # grid builder with arbitrary source layouts

R0 = dict(jitter_scale=0.0)  # disable the random term for readable output


def show(title, maze_text, stamps, pacman, params):
    maze = parse_maze(maze_text)
    grid = make_grid(maze, {Position(*p): ch for p, ch in stamps.items()},
                     Position(*pacman))
    print(f"== {title}")
    print("before:")
    print(render_values(grid), end="")
    run_updates(grid, params, np.random.default_rng(0))
    print(f"after {params.updates_n} updates:")
    print(render_values(grid), end="")
    print(render_decay(grid), end="")
    move = best_move(grid, np.random.default_rng(0))
    print(f"-> move: {move.value}\n")


# Start markers satisfy the parser; the stamped grids below override them.
CORRIDOR = "############\n#P        G#\n############\n"

show("ghost left, power pill right: flee toward the goal",
     CORRIDOR, {(1, 1): "G", (10, 1): "P"}, (5, 1),
     CAParams(updates_n=8, **R0))

show("two ghosts, equal distance, decay disabled: a coin flip",
     CORRIDOR, {(2, 1): "G", (8, 1): "G"}, (5, 1),
     CAParams(updates_n=8, decay_keep=1.0, jitter_scale=0.0))

show("two ghosts at distances 2 and 4: decay reveals the nearer threat",
     CORRIDOR, {(3, 1): "G", (9, 1): "G"}, (5, 1),
     CAParams(updates_n=8, **R0))
