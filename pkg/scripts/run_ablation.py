#!/usr/bin/env python3
"""Controller-variant ablation under a set of shared disturbance seeds."""

import sys
from pathlib import Path

from flexjoint.cli import main

OUT = Path("results/ablation")


def run(seeds=(10, 0, 1)) -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for seed in seeds:
        code = main(["ablate", "--seed", str(seed),
                     "--out", str(OUT / f"seed{seed}")])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    seeds = [int(a) for a in sys.argv[1:]] or (10, 0, 1)
    sys.exit(run(seeds))
