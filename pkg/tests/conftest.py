import random

import pytest

from capman import bundled_maze_path, load_maze, parse_maze
from capman.maze import MazeError, Position


@pytest.fixture(scope="session")
def small_maze():
    return load_maze(bundled_maze_path("small"))


@pytest.fixture(scope="session")
def classic_maze():
    return load_maze(bundled_maze_path("classic"))


@pytest.fixture(scope="session")
def tunnel_maze():
    return parse_maze(
        ";tunnel\n"
        "#####\n"
        "=.P.=\n"
        "#G..#\n"
        "#####\n"
    )


# Ghost A two cells left of Pac-Man, ghost B four cells right: the decay
# scenario where value alone cannot distinguish the two threats.
TWO_GHOST_CORRIDOR = (
    "##########\n"
    "#G P   G #\n"
    "##########\n"
)


@pytest.fixture(scope="session")
def two_ghost_corridor():
    return parse_maze(TWO_GHOST_CORRIDOR)


def random_test_maze(rng: random.Random, width: int, height: int):
    """Rejection-sample a small valid maze with random interior walls."""
    while True:
        rows = []
        for r in range(height):
            row = []
            for c in range(width):
                edge = r in (0, height - 1) or c in (0, width - 1)
                row.append("#" if edge or rng.random() < 0.22 else " ")
            rows.append(row)
        open_cells = [Position(c, r) for r in range(height) for c in range(width)
                      if rows[r][c] == " "]
        if len(open_cells) < 8:
            continue
        p, g = rng.sample(open_cells, 2)
        rows[p.row][p.col] = "P"
        rows[g.row][g.col] = "G"
        text = "\n".join("".join(r) for r in rows) + "\n"
        try:
            return parse_maze(text)
        except MazeError:
            continue
