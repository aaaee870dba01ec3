"""One optimization run at the default 1:6 weighting, then the pattern tables
of the best schedule (centre frequency and sidebands 1..10).

Writes trace.csv (best/average fitness, best-member SLL/SBL per generation)
and pattern_m*.csv under --out.
"""

import argparse
import logging
from pathlib import Path

from tmarray.cli import cmd_evaluate, cmd_optimize
from tmarray.io import build_run_config


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--w2", type=float, default=6.0)
    ap.add_argument("--generations", type=int, default=2000)
    ap.add_argument("--out", type=Path, default=Path("runs/convergence"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = build_run_config({
        "rng_seed": str(args.seed), "w2": str(args.w2),
        "generations": str(args.generations), "out_dir": str(args.out),
    })
    res = cmd_optimize(cfg)
    cmd_evaluate(args.out / "best_schedule.csv", cfg)
    print((args.out / "best_schedule.csv").read_text())
    print(f"SLL {res['metrics'].sll_db:.2f} dB  SBL {res['metrics'].sbl_db:.2f} dB")


if __name__ == "__main__":
    main()
