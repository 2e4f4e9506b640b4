"""Walk through the maze format and the tick engine.

Parses the bundled small maze, steps a short scripted game, and prints the
board with the event stream. Run: python demos/01_maze_and_engine.py
"""

import capman
from capman.baselines import random_ghost_team
from capman.engine import GameConfig, new_game, step
from capman.maze import Direction, Position


def draw(state):
    glyphs = {state.pacman: "@"}
    for g in state.ghosts:
        glyphs[g.pos] = "E" if g.edible_remaining else "G"
    rows = []
    for row in range(state.maze.height):
        line = []
        for col in range(state.maze.width):
            p = Position(col, row)
            if p in glyphs:
                line.append(glyphs[p])
            elif p in state.pills:
                line.append(".")
            elif p in state.powerpills:
                line.append("o")
            elif p in state.maze.walkable:
                line.append(" ")
            else:
                line.append("#")
        rows.append("".join(line))
    return "\n".join(rows)


maze = capman.load_maze(capman.bundled_maze_path("small"))
print(f"maze {maze.name!r}: {maze.width}x{maze.height}, "
      f"{len(maze.walkable)} cells, {len(maze.pills0)} pills, "
      f"diameter {maze.diameter()}")

state = new_game(maze, GameConfig(), seed=7)
ghosts = random_ghost_team(seed=7)

script = [Direction.RIGHT] * 6 + [Direction.DOWN] * 4 + [Direction.LEFT] * 5
for move in script:
    result = step(state, move, ghosts(state))
    for event in result.events:
        print(f"tick {state.tick:3d}: {event.kind.value}"
              + (f" (ghost {event.ghost_id})" if event.ghost_id is not None else ""))

print(draw(state))
print(f"after {state.tick} ticks: score={state.score} lives={state.lives}")
