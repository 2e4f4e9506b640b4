"""capman: a cellular-automaton influence-map Pac-Man controller, the
baseline controllers it is measured against, and a seeded benchmark
harness with a session server for human play."""

from importlib import resources

from .maze import Direction, Maze, Position, load_maze, parse_maze, render_maze
from .engine import (GameConfig, GameResult, GameState, GhostState, StepResult,
                     Event, EventKind, legal_moves, new_game, run_game, step)
from .ca import (CAGrid, CAParams, CAPacmanController, best_move, build_grid,
                 ca_pacman, ca_update, decay_step, render_decay, render_values,
                 run_updates)
from .baselines import (HumanInputQueue, StarterConfig, human_pacman,
                        random_ghost_team, starter_pacman)
from .bench import (ExperimentSpec, ExperimentStats, compare_report,
                    load_human_results, read_csv, run_experiment,
                    sweep_updates, write_csv)

__version__ = "0.1.0"


def bundled_maze_path(name: str) -> str:
    """Filesystem path of a maze shipped with the package ("small", "classic")."""
    return str(resources.files(__package__).joinpath(f"mazes/{name}.txt"))
