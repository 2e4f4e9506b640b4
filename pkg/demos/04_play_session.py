"""Launch the session server and play in the browser.

Human play with the CA decay overlay available as a toggle:

    capman serve --mode human --port 8080 --results human.csv \
        --overlay --static frontend/dist

Then open http://localhost:8080, press space to start, steer with the
arrow keys, and press O for the overlay. Every finished game appends a row
to human.csv; aggregate participants with:

    capman compare human.csv sweep.csv

Watching the CA controller play itself:

    capman serve --mode watch-ai --updates 17 --overlay --static frontend/dist

This script just starts the server programmatically (Ctrl-C to stop).
"""

import capman
from capman.server import SessionConfig, serve

serve(SessionConfig(
    port=8080,
    mode="watch-ai",
    updates_n=17,
    maze_path=capman.bundled_maze_path("classic"),
    tick_ms=120,
    overlay=True,
    static_dir="frontend/dist",
))
