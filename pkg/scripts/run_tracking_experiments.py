#!/usr/bin/env python3
"""Square-wave tracking episodes for every controller variant, with and
without the seeded random disturbance.  Outputs land in results/tracking/."""

import sys
from pathlib import Path

from flexjoint.cli import main

OUT = Path("results/tracking")

CONTROLLERS = ["fuzzy-cascaded", "cascaded", "fuzzy1-pd2", "pd1-fuzzy2",
               "single-pd"]


def run(seed: int = 10) -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    worst = 0
    for controller in CONTROLLERS:
        for disturbance in ("off", "uniform"):
            out = OUT / f"{controller}_{disturbance}"
            code = main(["simulate", "--controller", controller,
                         "--disturbance", disturbance,
                         "--seed", str(seed), "--out", str(out)])
            print(f"{controller:>14s} d={disturbance:<7s} exit={code}")
            worst = max(worst, 0 if code == 2 else code)  # divergence expected
    return worst


if __name__ == "__main__":
    sys.exit(run(int(sys.argv[1]) if len(sys.argv) > 1 else 10))
