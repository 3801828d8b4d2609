#!/usr/bin/env python3
"""Stability report for the bundled gains (nominal and fuzzy worst case),
optionally for a tuned gains file passed as the first argument."""

import sys
from pathlib import Path

from flexjoint.cli import main

OUT = Path("results/stability")


def run(gains_file: str | None = None) -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    args = ["analyze", "--out", str(OUT / "report")]
    if gains_file:
        args += ["--gains", gains_file]
    return main(args)


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else None))
