"""Miniature update-count sweep with CSV output and a comparison table.

A desk-scale version of the full evaluation (use `capman sweep` with
--games 100 for the real thing). Run: python demos/03_update_sweep.py
"""

import capman
from capman.baselines import StarterConfig
from capman.bench import (ExperimentSpec, compare_report, run_experiment,
                          sweep_updates, write_csv)
from capman.ca import CAParams
from capman.engine import GameConfig

GAMES = 6  # keep the demo quick; variance is large at this sample size

template = ExperimentSpec(
    pacman="ca",
    maze=capman.bundled_maze_path("classic"),
    games=GAMES,
    base_seed=0,
    ca_params=CAParams(updates_n=1),
    config=GameConfig(),
)

stage1, stage2 = sweep_updates([1, 17, 33], stage2_window=(16, 18),
                               template=template)
for stats in stage1 + stage2:
    n = stats.spec.ca_params.updates_n
    print(f"N={n:<3d} avg={stats.avg:8.1f} stddev={stats.stddev:7.1f} "
          f"min={stats.min:6d} max={stats.max:6d}")

write_csv(stage1 + stage2, "sweep_demo.csv")
print("\nwrote sweep_demo.csv")

starter = run_experiment(ExperimentSpec(
    pacman="starter", maze=template.maze, games=GAMES, base_seed=0,
    starter=StarterConfig(), config=template.config))
best = max(stage1 + stage2, key=lambda s: s.avg)
print()
print(compare_report([best, starter]), end="")
