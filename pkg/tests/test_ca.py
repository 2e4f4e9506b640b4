import math
import random

import numpy as np
import pytest

from capman.ca import (CAParams, CHAR_TO_CODE, CODE_TO_CHAR, DOMINATES,
                       CAPacmanController, GameIsOver, best_move, build_grid,
                       ca_update, decay_step, domination_matrix, render_decay,
                       render_values, run_updates)
from capman.engine import GameConfig, new_game
from capman.maze import Direction, Position, parse_maze

from conftest import random_test_maze
from oracles import make_grid, nearest_dominating_oracle, reference_update

R0 = dict(jitter_scale=0.0)  # forces the jitter term of the decay rule to zero


def rng0(seed=0):
    return np.random.default_rng(seed)


# A 14-cell corridor with the mandatory start markers parked on the right;
# grids for wave tests are stamped explicitly via make_grid.
CORRIDOR = parse_maze("################\n#............PG#\n################\n")


def corridor_grid(stamps, pacman=Position(13, 1)):
    return make_grid(CORRIDOR, stamps, pacman)


class TestDominationTable:
    def test_antisymmetric(self):
        for a, dominated in DOMINATES.items():
            for b in dominated:
                if a != b:
                    assert a not in DOMINATES[b], f"{a} and {b} dominate each other"

    def test_pacman_isolated(self):
        assert DOMINATES["@"] == frozenset()
        for dominated in DOMINATES.values():
            assert "@" not in dominated

    def test_matrix_matches_table(self):
        m = domination_matrix()
        for a, dominated in DOMINATES.items():
            for b in DOMINATES:
                assert m[CHAR_TO_CODE[a], CHAR_TO_CODE[b]] == (b in dominated)

    def test_wave_strength_is_total_order(self):
        # Proposal conflicts resolve by value: each stronger class dominates
        # every weaker one, following the table.
        order = ["E", "P", "G", "p"]
        for i, strong in enumerate(order):
            for weak in order[i + 1:]:
                assert weak in DOMINATES[strong]


class TestBuildGrid:
    def test_stamps_sources(self, small_maze):
        s = new_game(small_maze, GameConfig(ghost_count=2), 0)
        s.pills = set(list(small_maze.pills0)[:3])
        s.powerpills = set()
        s.ghosts[0].edible_remaining = 10
        s.ghosts[1].pos = Position(5, 5)
        g = build_grid(s)
        counts = {}
        for cell in g.cells().values():
            counts[cell.value] = counts.get(cell.value, 0) + 1
            if cell.value in "pPGE":
                assert cell.is_source and cell.decay == 1.0
        assert counts["p"] == 3
        assert counts["E"] == 1
        assert counts["G"] == 1
        assert counts["@"] == 1

    def test_no_pills_left(self, small_maze):
        s = new_game(small_maze, GameConfig(ghost_count=1), 0)
        s.pills = set()
        s.ghosts[0].lair_remaining = 5
        g = build_grid(s)
        values = [c.value for c in g.cells().values()]
        assert values.count("p") == 0
        assert values.count("G") == 0  # lair ghost omitted

    def test_ghost_on_pacman_cell_stays_pacman(self, small_maze):
        s = new_game(small_maze, GameConfig(ghost_count=1), 0)
        s.ghosts[0].pos = s.pacman
        g = build_grid(s)
        assert g.cell(s.pacman).value == "@"
        assert [c.value for c in g.cells().values()].count("@") == 1

    def test_rebuild_purity(self, small_maze):
        s = new_game(small_maze, GameConfig(), 0)
        assert build_grid(s).snapshot() == build_grid(s).snapshot()

    def test_finished_game_rejected(self, small_maze):
        s = new_game(small_maze, GameConfig(), 0)
        s.over = True
        with pytest.raises(GameIsOver):
            build_grid(s)


class TestDecayStep:
    def test_formula_values(self):
        p = CAParams(updates_n=1)
        assert decay_step(1.0, 0.0, p) == pytest.approx(0.9, abs=1e-15)
        assert decay_step(0.9, 0.0, p) == pytest.approx(0.81, abs=1e-15)
        assert decay_step(1.0, 0.5, p) == pytest.approx(0.9005, abs=1e-15)

    def test_strictly_decreasing(self):
        p = CAParams(updates_n=1)
        rng = random.Random(0)
        for _ in range(500):
            pd = rng.uniform(1e-6, 1.0)
            r = rng.uniform(-0.5, 0.5)
            assert 0.0 < decay_step(pd, r, p) < pd

    def test_param_validation(self):
        with pytest.raises(ValueError):
            CAParams(updates_n=-1)
        with pytest.raises(ValueError):
            CAParams(updates_n=1, decay_keep=0.0)
        with pytest.raises(ValueError):
            CAParams(updates_n=1, decay_keep=1.2)
        with pytest.raises(ValueError):
            CAParams(updates_n=1, decay_keep=0.4, jitter_scale=1.0,
                     jitter_half_range=0.5)


class TestUpdates:
    def test_single_propagation_step(self):
        g = corridor_grid({Position(5, 1): "p"})
        params = CAParams(updates_n=1, **R0)
        ca_update(g, params, rng0())
        assert g.cell(Position(4, 1)).value == "p"
        assert g.cell(Position(6, 1)).value == "p"
        assert g.cell(Position(4, 1)).decay == pytest.approx(0.9, abs=1e-15)
        assert g.cell(Position(3, 1)).value == "e"

    def test_powerpill_wave_beats_ghost_wave(self):
        g = corridor_grid({Position(2, 1): "G", Position(8, 1): "P"})
        run_updates(g, CAParams(updates_n=12, **R0), rng0())
        # P dominates G but not vice versa: the whole contested middle is P.
        assert g.cell(Position(5, 1)).value == "P"
        assert g.cell(Position(4, 1)).value == "P"
        assert g.cell(Position(3, 1)).value == "P"

    def test_zero_updates_identity(self):
        g = corridor_grid({Position(5, 1): "p"})
        before = g.snapshot()
        run_updates(g, CAParams(updates_n=0), rng0())
        assert g.snapshot() == before

    def test_wave_front_is_min_of_n_and_distance(self):
        src = Position(1, 1)
        for k in range(0, 15):
            g = corridor_grid({src: "p"})
            run_updates(g, CAParams(updates_n=k, **R0), rng0())
            for col in range(1, 13):
                cell = g.cell(Position(col, 1))
                d = col - 1
                if 0 < d <= k:
                    assert cell.value == "p"
                    assert cell.decay == pytest.approx(0.9 ** d, rel=1e-12)
                elif d > k:
                    assert cell.value == "e"

    def test_fixed_point_idempotent(self):
        g = corridor_grid({Position(1, 1): "p", Position(10, 1): "G"})
        run_updates(g, CAParams(updates_n=CORRIDOR.diameter(), **R0), rng0())
        before = g.snapshot()
        changed = ca_update(g, CAParams(updates_n=1, **R0), rng0())
        assert changed == 0
        assert g.snapshot() == before

    def test_pacman_cell_immutable(self, small_maze):
        s = new_game(small_maze, GameConfig(), 0)
        g = build_grid(s)
        i = small_maze.cell_index()[s.pacman]
        run_updates(g, CAParams(updates_n=30), rng0())
        assert g.value[i] == CHAR_TO_CODE["@"]
        assert g.decay[i] == 1.0
        assert not g.source[i]

    def test_one_step_jitter_bound(self, small_maze):
        s = new_game(small_maze, GameConfig(), 0)
        params = CAParams(updates_n=1)
        bound = params.jitter_scale * params.jitter_half_range  # PD = 1 at step one
        g = build_grid(s)
        ca_update(g, params, rng0(3))
        for i in range(g.value.shape[0]):
            if g.source[i] or CODE_TO_CHAR[g.value[i]] in "@e":
                continue
            assert abs(g.decay[i] - params.decay_keep) <= bound

    def test_kernel_matches_reference_pass(self):
        rng = random.Random(1)
        for trial in range(25):
            maze = random_test_maze(rng, rng.randint(6, 9), rng.randint(6, 9))
            stamps, pacman = _random_stamps(rng, maze)
            g = make_grid(maze, stamps, pacman)
            params = CAParams(updates_n=1)
            nprng = rng0(trial)
            for _ in range(3):
                jitter = nprng.uniform(-0.5, 0.5, size=(g.value.shape[0], 4))
                expected = reference_update(g, jitter, params.decay_keep,
                                            params.jitter_scale)
                ca_update(g, params, nprng, jitter=jitter)
                got = {p: (c.value, c.decay) for p, c in g.cells().items()}
                for p in expected:
                    assert got[p][0] == expected[p][0], (trial, p)
                    assert got[p][1] == expected[p][1], (trial, p)

    def test_parallel_bit_identical(self, small_maze):
        s = new_game(small_maze, GameConfig(), 0)
        params = CAParams(updates_n=1)
        seq, par = build_grid(s), build_grid(s)
        nprng = rng0(9)
        for _ in range(10):
            jitter = nprng.uniform(-0.5, 0.5, size=(seq.value.shape[0], 4))
            ca_update(seq, params, nprng, jitter=jitter)
            ca_update(par, params, nprng, jitter=jitter, parallel=True)
            assert seq.snapshot() == par.snapshot()

    def test_fused_run_matches_update_loop(self, small_maze):
        s = new_game(small_maze, GameConfig(), 0)
        params = CAParams(updates_n=13)
        fused = build_grid(s)
        run_updates(fused, params, rng0(4))
        looped = build_grid(s)
        jitter3 = rng0(4).uniform(-params.jitter_half_range,
                                  params.jitter_half_range,
                                  size=(13, looped.value.shape[0], 4))
        for u in range(13):
            ca_update(looped, params, rng0(), jitter=jitter3[u])
        assert fused.snapshot() == looped.snapshot()

    def test_early_exit_flag_reaches_same_grid(self):
        g1 = corridor_grid({Position(1, 1): "p"})
        g2 = corridor_grid({Position(1, 1): "p"})
        run_updates(g1, CAParams(updates_n=40, **R0), rng0())
        run_updates(g2, CAParams(updates_n=40, **R0), rng0(), early_exit=True)
        assert g1.snapshot() == g2.snapshot()


def _random_stamps(rng: random.Random, maze):
    cells = sorted(maze.walkable)
    counts = [("p", rng.randint(1, 5)), ("P", rng.randint(0, 2)),
              ("G", rng.randint(0, 2)), ("E", rng.randint(0, 2))]
    picks = rng.sample(cells, min(len(cells) - 1, 1 + sum(c for _, c in counts)))
    stamps = {}
    i = 0
    for ch, cnt in counts:
        for _ in range(cnt):
            if i < len(picks) - 1:
                stamps[picks[i]] = ch
                i += 1
    return stamps, picks[-1]


class TestFixedPointOracle:
    def test_mixed_sources_match_nearest_dominating_oracle(self):
        rng = random.Random(2024)
        for trial in range(12):
            maze = random_test_maze(rng, rng.randint(6, 10), rng.randint(6, 10))
            stamps, pacman = _random_stamps(rng, maze)
            expected, settle = nearest_dominating_oracle(maze, stamps, pacman)
            g = make_grid(maze, stamps, pacman)
            run_updates(g, CAParams(updates_n=max(settle, 1), **R0), rng0(trial))
            for p, (ch, dec) in expected.items():
                cell = g.cell(p)
                assert cell.value == ch, (trial, p)
                assert cell.decay == pytest.approx(dec, rel=1e-12), (trial, p)
            assert ca_update(g, CAParams(updates_n=1, **R0), rng0()) == 0


class TestBestMove:
    def test_flees_ghost_toward_powerpill(self):
        g = corridor_grid({Position(2, 1): "G", Position(8, 1): "P"},
                          pacman=Position(5, 1))
        run_updates(g, CAParams(updates_n=4, **R0), rng0())
        # Left neighbour holds the G wave, right the P wave: go right.
        assert best_move(g, rng0()) == Direction.RIGHT

    def test_two_ghosts_picks_lowest_decay(self):
        g = corridor_grid({Position(2, 1): "G", Position(9, 1): "G"},
                          pacman=Position(4, 1))
        run_updates(g, CAParams(updates_n=6, **R0), rng0())
        left = g.cell(Position(3, 1))
        right = g.cell(Position(5, 1))
        assert left.value == right.value == "G"
        assert left.decay > right.decay
        assert best_move(g, rng0()) == Direction.RIGHT

    def test_empty_neighbours_uniform(self):
        g = corridor_grid({Position(1, 1): "p"}, pacman=Position(7, 1))
        run_updates(g, CAParams(updates_n=1, **R0), rng0())
        assert g.cell(Position(6, 1)).value == "e"
        assert g.cell(Position(8, 1)).value == "e"
        rng = rng0(5)
        lefts = sum(best_move(g, rng) == Direction.LEFT for _ in range(10_000))
        # 5 sigma around a fair coin over 10k draws
        assert abs(lefts - 5000) < 5 * math.sqrt(10_000 * 0.25)

    def test_never_into_wall(self):
        rng = random.Random(31)
        for trial in range(20):
            maze = random_test_maze(rng, 7, 7)
            stamps, pacman = _random_stamps(rng, maze)
            g = make_grid(maze, stamps, pacman)
            run_updates(g, CAParams(updates_n=rng.randint(0, 8)), rng0(trial))
            move = best_move(g, rng0(trial))
            assert maze.shift(pacman, move) is not None

    def test_priority_order_edible_over_powerpill(self):
        g = corridor_grid({Position(4, 1): "E", Position(6, 1): "P"},
                          pacman=Position(5, 1))
        assert best_move(g, rng0()) == Direction.LEFT


class TestController:
    def two_ghost_state(self, maze):
        s = new_game(maze, GameConfig(ghost_count=2), 0)
        return s

    def test_symmetric_corridor_without_decay_is_a_coin_flip(self):
        maze = parse_maze("##########\n#G  P  G #\n##########\n")
        s = self.two_ghost_state(maze)
        params = CAParams(updates_n=8, decay_keep=1.0, jitter_scale=0.0)
        ctl = CAPacmanController(params, seed=1)
        moves = [ctl(s) for _ in range(400)]
        rights = sum(m == Direction.RIGHT for m in moves)
        assert set(moves) == {Direction.LEFT, Direction.RIGHT}
        assert abs(rights - 200) < 5 * math.sqrt(400 * 0.25)

    def test_asymmetric_corridor_with_decay_flees_nearer_ghost(
            self, two_ghost_corridor):
        s = self.two_ghost_state(two_ghost_corridor)
        for seed in range(20):
            ctl = CAPacmanController(CAParams(updates_n=17), seed=seed)
            assert ctl(s) == Direction.RIGHT

    def test_small_n_is_blind_to_distant_goals(self):
        maze = parse_maze("##########\n#.  P   G#\n##########\n")
        s = new_game(maze, GameConfig(ghost_count=1), 0)
        s.ghosts[0].lair_remaining = 99  # ghost out of the picture
        ctl = CAPacmanController(CAParams(updates_n=1), seed=0)
        grid_moves = set()
        for _ in range(50):
            grid_moves.add(ctl(s))
        g = ctl.last_grid
        assert g.cell(Position(3, 1)).value == "e"  # pill wave 3 away: not seen
        assert g.cell(Position(5, 1)).value == "e"
        assert grid_moves == {Direction.LEFT, Direction.RIGHT}

    def test_controller_seed_reproducible(self, small_maze):
        s = new_game(small_maze, GameConfig(), 3)
        a = CAPacmanController(CAParams(updates_n=9), seed=42)
        b = CAPacmanController(CAParams(updates_n=9), seed=42)
        assert [a(s) for _ in range(30)] == [b(s) for _ in range(30)]


class TestDumps:
    def test_golden_corridor_dump(self):
        maze = parse_maze("########\n#.  P G#\n########\n")
        g = make_grid(maze, {Position(1, 1): "p", Position(6, 1): "G"},
                      pacman=Position(4, 1))
        run_updates(g, CAParams(updates_n=2, **R0), rng0())
        assert render_values(g) == ("########\n"
                                    "#ppp@GG#\n"
                                    "########\n")
        wall = "######"
        assert render_decay(g) == (
            " ".join([wall] * 8) + "\n"
            + " ".join([wall, "1.0000", "0.9000", "0.8100",
                        "1.0000", "0.9000", "1.0000", wall]) + "\n"
            + " ".join([wall] * 8) + "\n")
