"""Session server bridging the engine to the browser UI.

One WebSocket connection = one session = one paced game loop. Inputs flow
into a HumanInputQueue (latest press wins); every tick the session steps
the engine and streams a state frame, optionally with the CA decay field.
Finished games append one results row for the human-baseline aggregation.

Wire format (JSON text frames, versioned with "v"):

    server -> client: {"v":1,"type":"maze",...}   once, on connect
                      {"v":1,"type":"state",...}  every tick
                      {"v":1,"type":"over","result":{...}}
                      {"v":1,"type":"error","reason":...}
    client -> server: {"v":1,"type":"input","dir":"Left"}
                      {"v":1,"type":"control","verb":"start"|"pause"|"restart"}
"""

from __future__ import annotations

import asyncio
import csv
import os
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from . import bundled_maze_path
from .baselines import HumanInputQueue, human_pacman, random_ghost_team, starter_pacman
from .ca import CAParams, CAPacmanController
from .engine import (EventKind, GameConfig, GameResult, derive_seed, new_game,
                     step)
from .maze import Direction, Maze, load_maze

PROTOCOL_VERSION = 1


class BindError(Exception):
    pass


@dataclass
class SessionConfig:
    port: int = 8080
    tick_ms: int = 150
    mode: str = "human"              # "human" | "watch-ai"
    maze_path: str = ""
    seed: int = 42
    overlay: bool = False
    results_path: str | None = None
    ai: str = "ca"                   # watch-ai controller: "ca" | "starter"
    updates_n: int = 17
    game_config: GameConfig = field(default_factory=GameConfig)
    static_dir: str | None = None

    def __post_init__(self):
        if self.tick_ms < 16:
            raise ValueError("tick_ms must be >= 16")
        if self.mode not in ("human", "watch-ai"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.maze_path:
            self.maze_path = bundled_maze_path("classic")


def maze_message(maze: Maze) -> dict:
    return {
        "v": PROTOCOL_VERSION,
        "type": "maze",
        "name": maze.name,
        "width": maze.width,
        "height": maze.height,
        "walls": sorted([c, r] for c, r in set(
            (col, row) for col in range(maze.width) for row in range(maze.height)
        ) - set(maze.walkable)),
        "lair": sorted([c, r] for c, r in maze.lair),
        "tunnel_rows": sorted(maze.tunnel_rows),
    }


def state_message(state, grid=None) -> dict:
    msg = {
        "v": PROTOCOL_VERSION,
        "type": "state",
        "tick": state.tick,
        "score": state.score,
        "lives": state.lives,
        "level": state.level,
        "pacman": {"col": state.pacman.col, "row": state.pacman.row,
                   "facing": state.pacman_facing.value},
        "ghosts": [{"id": g.id, "col": g.pos.col, "row": g.pos.row,
                    "edible": g.edible_remaining > 0,
                    "lair": g.lair_remaining > 0} for g in state.ghosts],
        "pills": sorted([p.col, p.row] for p in state.pills),
        "powerpills": sorted([p.col, p.row] for p in state.powerpills),
        "over": state.over,
    }
    if grid is not None:
        msg["overlay"] = {
            "cells": [[p.col, p.row, cell.value, round(cell.decay, 4)]
                      for p, cell in grid.cells().items()],
        }
    return msg


def over_message(result: GameResult) -> dict:
    return {"v": PROTOCOL_VERSION, "type": "over",
            "result": {"final_score": result.final_score,
                       "levels_cleared": result.levels_cleared,
                       "ticks_survived": result.ticks_survived,
                       "seed": result.seed}}


def record_result(path, participant: str, game_index: int,
                  result: GameResult) -> None:
    """Append one finished game to the results file (header on first write)."""
    new_file = not os.path.exists(path)
    with open(path, "a", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        if new_file:
            w.writerow(["participant", "game_index", "score", "levels",
                        "ticks", "seed"])
        w.writerow([participant, game_index, result.final_score,
                    result.levels_cleared, result.ticks_survived, result.seed])


class Session:
    """One connection: a reader task feeding queues, one paced game loop."""

    def __init__(self, cfg: SessionConfig, maze: Maze, ws: WebSocket,
                 participant: str):
        self.cfg = cfg
        self.maze = maze
        self.ws = ws
        self.participant = participant
        self.queue = HumanInputQueue()
        self.running = asyncio.Event()   # cleared = paused or idle
        self.started = asyncio.Event()   # a start verb is pending
        self.restart = False
        self.closed = False
        self.in_game = False
        self.games_started = 0
        self.games_completed = 0

    async def run(self):
        await self.ws.send_json(maze_message(self.maze))
        reader = asyncio.create_task(self._read_loop())
        try:
            while not self.closed:
                started = asyncio.create_task(self.started.wait())
                done, _ = await asyncio.wait({started, reader},
                                             return_when=asyncio.FIRST_COMPLETED)
                started.cancel()
                if reader in done:
                    break
                self.started.clear()
                await self._play_game()
        finally:
            reader.cancel()

    async def _read_loop(self):
        try:
            while True:
                frame = await self.ws.receive_json()
                kind = frame.get("type")
                if kind == "input":
                    if self.cfg.mode == "human":
                        self.queue.push(Direction(frame["dir"]))
                elif kind == "control":
                    self._control(frame.get("verb", ""))
                else:
                    raise ValueError(f"unknown frame type {kind!r}")
        except WebSocketDisconnect:
            self.closed = True
        except Exception as exc:
            self.closed = True
            try:
                await self.ws.send_json({"v": PROTOCOL_VERSION, "type": "error",
                                         "reason": str(exc)})
                await self.ws.close()
            except Exception:
                pass

    def _control(self, verb: str):
        if verb == "start":
            self.running.set()
            if not self.in_game:
                self.started.set()
        elif verb == "pause":
            self.running.clear()
        elif verb == "restart":
            self.restart = True
            self.running.set()
        else:
            raise ValueError(f"unknown control verb {verb!r}")

    def _make_controllers(self, seed: int):
        ghosts = random_ghost_team(derive_seed(seed, "ghosts"))
        if self.cfg.mode == "human":
            return human_pacman(self.queue), ghosts, None
        if self.cfg.ai == "starter":
            pacman = starter_pacman()
        else:
            pacman = CAPacmanController(CAParams(updates_n=self.cfg.updates_n),
                                        seed=derive_seed(seed, "pacman"))
        return pacman, ghosts, pacman if isinstance(pacman, CAPacmanController) else None

    async def _play_game(self):
        seed = self.cfg.seed + self.games_started
        self.games_started += 1
        self.in_game = True
        try:
            await self._run_ticks(seed)
        finally:
            self.in_game = False

    async def _run_ticks(self, seed: int):
        self.restart = False
        state = new_game(self.maze, self.cfg.game_config, seed)
        pacman, ghosts, ca = self._make_controllers(seed)
        observer = None
        if self.cfg.overlay and ca is None:
            observer = CAPacmanController(CAParams(updates_n=self.cfg.updates_n),
                                          seed=derive_seed(seed, "observer"))
        levels = 0
        await self.ws.send_json(state_message(state))
        while not state.over and not self.closed:
            if self.restart:
                return
            if not self.running.is_set():
                await self.running.wait()
                continue
            await asyncio.sleep(self.cfg.tick_ms / 1000.0)
            grid = None
            if observer is not None:
                observer(state)
                grid = observer.last_grid
            move = pacman(state)
            result = step(state, move, ghosts(state))
            if ca is not None and self.cfg.overlay:
                grid = ca.last_grid
            levels += sum(e.kind == EventKind.LEVEL_CLEARED
                          for e in result.events)
            try:
                await self.ws.send_json(state_message(state, grid))
            except Exception:
                self.closed = True
                return
        if state.over:
            result = GameResult(final_score=state.score, levels_cleared=levels,
                                ticks_survived=state.tick, seed=seed)
            try:
                await self.ws.send_json(over_message(result))
            except Exception:
                self.closed = True
            if self.cfg.results_path:
                record_result(self.cfg.results_path, self.participant,
                              self.games_completed, result)
            self.games_completed += 1


_PLACEHOLDER = """<!doctype html>
<title>capman</title>
<p>Web UI not built. Run <code>npm install && npm run build</code> in
frontend/ and restart with <code>--static frontend/dist</code>, or connect
a client to <code>ws://host/session</code> directly.</p>
"""


def create_app(cfg: SessionConfig) -> FastAPI:
    maze = load_maze(cfg.maze_path)
    app = FastAPI(title="capman session server")

    @app.websocket("/session")
    async def session(ws: WebSocket):
        await ws.accept()
        participant = ws.query_params.get("participant", "anon")
        await Session(cfg, maze, ws, participant).run()

    if cfg.static_dir and os.path.isdir(cfg.static_dir):
        app.mount("/", StaticFiles(directory=cfg.static_dir, html=True),
                  name="ui")
    else:
        @app.get("/")
        async def index():
            return HTMLResponse(_PLACEHOLDER)

    return app


def serve(cfg: SessionConfig) -> None:
    import uvicorn
    app = create_app(cfg)
    try:
        uvicorn.run(app, host="127.0.0.1", port=cfg.port, log_level="warning")
    except OSError as exc:
        raise BindError(f"cannot bind port {cfg.port}: {exc}") from exc
