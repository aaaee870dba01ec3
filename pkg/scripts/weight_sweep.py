"""Weight sweep over w1:w2 in {1:1, 1:3, 1:6, 1:10} next to the published table.

    python scripts/weight_sweep.py --seeds 5 --out runs/weight_sweep
"""

import argparse
import logging
from pathlib import Path

from tmarray.cli import cmd_sweep, parse_ratios
from tmarray.io import build_run_config

PUBLISHED = {(1, 1): (-42.3, -21.4), (1, 3): (-34.8, -24.2), (1, 6): (-29.3, -28.6), (1, 10): (-24.7, -31.0)}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--generations", type=int, default=2000)
    ap.add_argument("--ratios", default="1:1,1:3,1:6,1:10")
    ap.add_argument("--out", type=Path, default=Path("runs/weight_sweep"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = build_run_config({"generations": str(args.generations), "out_dir": str(args.out)})
    summary = cmd_sweep(cfg, parse_ratios(args.ratios), args.seeds)
    print(f"{'w1':>3} {'w2':>3}  {'SLL':>7} {'SBL':>7}   published SLL / SBL")
    for s in summary:
        pub = PUBLISHED.get((int(s["w1"]), int(s["w2"])), (float("nan"), float("nan")))
        print(f"{s['w1']:3g} {s['w2']:3g}  {s['median_sll_db']:7.2f} {s['median_sbl_db']:7.2f}   {pub[0]:6.1f} / {pub[1]:6.1f}")


if __name__ == "__main__":
    main()
