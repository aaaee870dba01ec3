"""Command line interface: ``evaluate``, ``pattern``, ``optimize`` and ``sweep``.

Exit codes: 0 success, 2 configuration or parse error, 3 degenerate input.
The default output directory can be set with ``TMARRAY_OUT``.
"""

from __future__ import annotations

import argparse
from dataclasses import fields, replace
import logging
import os
from pathlib import Path
import statistics
import sys

from .array_model import ArrayConfig, ExcitationSchedule, angle_grid, harmonic_pattern
from .ga import GaConfig, evolve
from .io import (
    ConfigError,
    RunConfig,
    ScheduleParseError,
    build_run_config,
    format_metrics,
    format_run_config,
    load_run_config,
    read_schedule,
    write_pattern,
    write_schedule,
    write_trace,
)
from .metrics import DegenerateScheduleError, fitness

log = logging.getLogger("tmarray")

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE = 0, 2, 3
OUT_ENV = "TMARRAY_OUT"

# config fields exposed one flag each (dashes instead of underscores)
_FIELD_FLAGS = [f.name for f in fields(ArrayConfig)] + [
    f.name for f in fields(GaConfig) if f.name not in ("early_stop", "rng_seed")
]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key=value config file")
    p.add_argument("--seed", dest="rng_seed", help="RNG seed (unsigned 64-bit)")
    p.add_argument("--out", dest="out_dir", help=f"output directory (default ${OUT_ENV} or ./out)")
    p.add_argument("--harmonics", dest="sideband_count", help="number of sidebands n_max")
    p.add_argument("--grid", dest="grid_points", help="angle grid points over [0, 90] deg")
    p.add_argument("--clamp-db", dest="suppression_clamp_db", help="suppression clamp in dB")
    p.add_argument("--no-refine", dest="refine_extrema", action="store_const", const="false")
    p.add_argument("--early-stop", dest="early_stop", action="store_const", const="true")
    p.add_argument("--closeness-db", dest="closeness_db")
    p.add_argument("--floor-db", dest="floor_db")
    for name in _FIELD_FLAGS:
        p.add_argument("--" + name.replace("_", "-"), dest=name)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmarray", description="Time-modulated linear array synthesis with a modified GA."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="metrics and pattern tables for a schedule file")
    p.add_argument("schedule", type=Path)
    _add_common(p)

    p = sub.add_parser("pattern", help="pattern table of one harmonic for a schedule file")
    p.add_argument("schedule", type=Path)
    p.add_argument("--harmonic", "-m", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("optimize", help="run the genetic algorithm")
    _add_common(p)

    p = sub.add_parser("sweep", help="GA runs over several weight ratios and seeds")
    p.add_argument("--ratios", default="1:1,1:3,1:6,1:10", help="comma-separated w1:w2 pairs")
    p.add_argument("--seeds", type=int, default=5, help="seeds per ratio")
    _add_common(p)
    return parser


def run_config_from_args(args) -> RunConfig:
    base = RunConfig(out_dir=Path(os.environ.get(OUT_ENV, "out")))
    if args.config is not None:
        base = load_run_config(args.config, base)
    overrides = {}
    for key in _FIELD_FLAGS + [
        "rng_seed", "out_dir", "sideband_count", "grid_points", "suppression_clamp_db",
        "refine_extrema", "early_stop", "closeness_db", "floor_db",
    ]:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = str(value)
    return build_run_config(overrides, base)


def parse_ratios(text: str) -> list[tuple[float, float]]:
    ratios = []
    for item in text.split(","):
        try:
            a, b = item.split(":")
            ratios.append((float(a), float(b)))
        except ValueError:
            raise ConfigError(f"ratios: cannot parse {item!r}, expected w1:w2") from None
    if not ratios:
        raise ConfigError("ratios: empty list")
    return ratios


def _fmt_w(w: float) -> str:
    return f"{w:g}"


# ---------------------------------------------------------------------------


def cmd_evaluate(schedule_file, cfg: RunConfig, harmonics=None) -> dict:
    """Write metrics.txt and pattern_m<m>.csv tables; return the metrics summary."""
    schedule = read_schedule(schedule_file, cfg.array)
    value, metrics = fitness(cfg.array, schedule, cfg.ga.w1, cfg.ga.w2, cfg.metrics)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.txt").write_text(format_metrics(metrics, value, cfg.ga.w1, cfg.ga.w2))
    main = 2.0 * cfg.array.tau_bar * schedule.genes.sum()
    grid = angle_grid(cfg.metrics.grid_points)
    if harmonics is None:
        harmonics = range(cfg.metrics.sideband_count + 1)
    for m in harmonics:
        pattern = harmonic_pattern(cfg.array, schedule, m, grid)
        write_pattern(out / f"pattern_m{m}.csv", pattern, main, cfg.metrics.suppression_clamp_db)
    return {"sll_db": metrics.sll_db, "sbl_db": metrics.sbl_db, "fitness": value, "metrics": metrics}


def cmd_optimize(cfg: RunConfig, out_dir=None) -> dict:
    """Run the GA; write best_schedule.csv, metrics.txt, trace.csv and config.txt."""
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def progress(gen, trace):
        if gen % 100 == 0:
            log.info(
                "gen %5d  best %.3f  avg %.3f  SLL %.2f dB  SBL %.2f dB",
                gen, trace.best_fitness[-1], trace.average_fitness[-1],
                -trace.best_sll_suppression_db[-1], -trace.best_sbl_suppression_db[-1],
            )

    best, metrics, trace = evolve(cfg.array, cfg.ga, cfg.metrics, progress=progress)
    value = cfg.ga.w1 * metrics.sll_suppression_db + cfg.ga.w2 * metrics.sbl_suppression_db
    write_schedule(
        out / "best_schedule.csv",
        best,
        header=f"rows: element pairs from centre outward; columns: time steps\nseed={cfg.ga.rng_seed}",
    )
    (out / "metrics.txt").write_text(format_metrics(metrics, value, cfg.ga.w1, cfg.ga.w2))
    (out / "config.txt").write_text(format_run_config(cfg))
    write_trace(out / "trace.csv", trace)
    return {"schedule": best, "metrics": metrics, "trace": trace, "fitness": value}


def cmd_sweep(cfg: RunConfig, weight_ratios, seeds_per_ratio: int) -> list[dict]:
    """GA runs for every (ratio, seed); writes sweep.csv and sweep_summary.csv."""
    if not weight_ratios:
        raise ConfigError("ratios: empty list")
    if seeds_per_ratio < 1:
        raise ConfigError("seeds: must be >= 1")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for w1, w2 in weight_ratios:
        for i in range(seeds_per_ratio):
            seed = cfg.ga.rng_seed + i
            run_cfg = replace(cfg, ga=replace(cfg.ga, w1=w1, w2=w2, rng_seed=seed))
            run_dir = out / f"w{_fmt_w(w1)}_{_fmt_w(w2)}_seed{seed}"
            res = cmd_optimize(run_cfg, run_dir)
            m = res["metrics"]
            rows.append(dict(w1=w1, w2=w2, seed=seed, sll_db=m.sll_db, sbl_db=m.sbl_db, fitness=res["fitness"]))
            log.info("w=%g:%g seed=%d  SLL %.2f dB  SBL %.2f dB", w1, w2, seed, m.sll_db, m.sbl_db)

    with open(out / "sweep.csv", "w") as fh:
        fh.write("w1,w2,seed,sll_db,sbl_db,fitness\n")
        for r in rows:
            fh.write(f"{_fmt_w(r['w1'])},{_fmt_w(r['w2'])},{r['seed']},{r['sll_db']:.6f},{r['sbl_db']:.6f},{r['fitness']:.6f}\n")
    summary = []
    with open(out / "sweep_summary.csv", "w") as fh:
        fh.write("w1,w2,runs,median_sll_db,median_sbl_db,median_fitness\n")
        for w1, w2 in weight_ratios:
            sel = [r for r in rows if r["w1"] == w1 and r["w2"] == w2]
            s = dict(
                w1=w1, w2=w2, runs=len(sel),
                median_sll_db=statistics.median(r["sll_db"] for r in sel),
                median_sbl_db=statistics.median(r["sbl_db"] for r in sel),
                median_fitness=statistics.median(r["fitness"] for r in sel),
            )
            summary.append(s)
            fh.write(
                f"{_fmt_w(w1)},{_fmt_w(w2)},{s['runs']},{s['median_sll_db']:.6f},"
                f"{s['median_sbl_db']:.6f},{s['median_fitness']:.6f}\n"
            )
    return summary


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr
    )
    try:
        cfg = run_config_from_args(args)
        if args.command == "evaluate":
            res = cmd_evaluate(args.schedule, cfg)
            print(f"SLL {res['sll_db']:.2f} dB  SBL {res['sbl_db']:.2f} dB  fitness {res['fitness']:.4f}")
            for n, v in enumerate(res["metrics"].per_sideband_suppression_db, start=1):
                print(f"  sideband {n:2d}: {-v:8.2f} dB")
        elif args.command == "pattern":
            res = cmd_evaluate(args.schedule, cfg, harmonics=[args.harmonic])
            print(f"wrote {Path(cfg.out_dir) / f'pattern_m{args.harmonic}.csv'}")
        elif args.command == "optimize":
            res = cmd_optimize(cfg)
            print(f"SLL {res['metrics'].sll_db:.2f} dB  SBL {res['metrics'].sbl_db:.2f} dB  "
                  f"fitness {res['fitness']:.4f}  generations {len(res['trace'])}")
        elif args.command == "sweep":
            summary = cmd_sweep(cfg, parse_ratios(args.ratios), args.seeds)
            print(" w1   w2   SLL (dB)  SBL (dB)")
            for s in summary:
                print(f"{s['w1']:3g}  {s['w2']:3g}  {s['median_sll_db']:8.2f}  {s['median_sbl_db']:8.2f}")
    except DegenerateScheduleError as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, ScheduleParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
