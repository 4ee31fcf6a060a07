#!/usr/bin/env python3
"""Run every named experiment at its default desk-scale parameters.

Results land in results/<name>.csv plus a .manifest per run; the summary at
the end lists each experiment's exit status.  Pass --quick for reduced
ladders and sample counts (about a minute total).
"""

import argparse
import subprocess
import sys
import time
from pathlib import Path

EXPERIMENTS = [
    "bush-refutes-naive",
    "opposed-pair-scaling",
    "bipartite-ball-sharpness",
    "clamshell-alpha",
    "parabolic-net-p23",
    "projection-containment",
    "fiber-length",
    "lemma-rect-structure",
    "wolff-bound-check",
    "broadness-scan",
]

QUICK_ARGS = {
    "bush-refutes-naive": ["--delta-exps", "4..6", "--samples", "100000"],
    "opposed-pair-scaling": [],
    "bipartite-ball-sharpness": ["--delta-exps", "5..6"],
    "clamshell-alpha": [],
    "parabolic-net-p23": ["--delta-exps", "4..5", "--samples", "50000"],
    "projection-containment": [],
    "fiber-length": [],
    "lemma-rect-structure": [],
    "wolff-bound-check": [],
    "broadness-scan": ["--delta-exps", "5..7", "--n", "128"],
}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="reduced ladders")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", default="results")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    statuses = []
    for name in EXPERIMENTS:
        extra = QUICK_ARGS[name] if args.quick else []
        cmd = [
            sys.executable,
            "-m",
            "heislab.cli",
            "run",
            name,
            "--seed",
            str(args.seed),
            "--out",
            str(outdir / f"{name}.csv"),
            *extra,
        ]
        t0 = time.time()
        proc = subprocess.run(cmd)
        statuses.append((name, proc.returncode, time.time() - t0))

    print("\nsummary:")
    worst = 0
    for name, code, wall in statuses:
        mark = "ok" if code == 0 else f"exit {code}"
        print(f"  {name:28s} {mark:8s} {wall:6.1f}s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
