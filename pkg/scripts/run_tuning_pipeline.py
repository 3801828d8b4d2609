#!/usr/bin/env python3
"""Two-stage Bayesian-optimization pipeline: joint PD gains first, then the
fuzzy-regulator output bounds around the frozen PD result.

Each stage is 150 episodes; expect a few minutes per stage.
"""

import sys
from pathlib import Path

from flexjoint.cli import main

OUT = Path("results/tuning")


def run(tuner_seed: int = 0, episodes: int = 150) -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    pd_out = OUT / "stage_pd"
    code = main(["tune", "--stage", "pd", "--episodes", str(episodes),
                 "--tuner-seed", str(tuner_seed), "--out", str(pd_out)])
    if code != 0:
        return code
    return main(["tune", "--stage", "flr", "--episodes", str(episodes),
                 "--tuner-seed", str(tuner_seed),
                 "--gains", f"{pd_out}_gains.txt",
                 "--out", str(OUT / "stage_flr")])


if __name__ == "__main__":
    sys.exit(run(int(sys.argv[1]) if len(sys.argv) > 1 else 0))
