"""Flat-file formats: schedules, pattern tables, traces, metrics reports and
key=value run configuration."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .array_model import ArrayConfig, ExcitationSchedule, HarmonicPattern
from .ga import EarlyStop, GaConfig, GaTrace
from .metrics import MetricsConfig, PatternMetrics


class ScheduleParseError(ValueError):
    def __init__(self, path, line, column, message):
        self.path, self.line, self.column = path, line, column
        super().__init__(f"{path}:{line}:{column}: {message}")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# schedules


def format_schedule(schedule: ExcitationSchedule) -> str:
    rows = [",".join(str(int(g)) for g in row) for row in schedule.genes]
    return "\n".join(rows) + "\n"


def write_schedule(path, schedule: ExcitationSchedule, header: str | None = None) -> None:
    text = format_schedule(schedule)
    if header:
        text = "".join(f"# {line}\n" for line in header.splitlines()) + text
    Path(path).write_text(text)


def read_schedule(path, config: ArrayConfig | None = None) -> ExcitationSchedule:
    """Parse a schedule file: one row per element pair (centre outward),
    comma-separated integer levels, ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        row = []
        col = 1
        for cell in line.split(","):
            token = cell.strip()
            column = col + (len(cell) - len(cell.lstrip()))
            try:
                row.append(int(token))
            except ValueError:
                raise ScheduleParseError(path, lineno, column, f"expected an integer, found {token!r}") from None
            col += len(cell) + 1
        if rows and len(row) != len(rows[0]):
            raise ScheduleParseError(
                path, lineno, 1, f"row has {len(row)} entries, previous rows have {len(rows[0])}"
            )
        rows.append(row)
    if not rows:
        raise ScheduleParseError(path, 1, 1, "no schedule rows found")
    schedule = ExcitationSchedule(np.array(rows, dtype=np.int64))
    if config is not None:
        if schedule.shape != config.shape:
            raise ValueError(
                f"dimension mismatch: expected {config.shape[0]}x{config.shape[1]} "
                f"(element_pairs x time_steps), found {schedule.shape[0]}x{schedule.shape[1]}"
            )
        schedule.validate(config)
    return schedule


# ---------------------------------------------------------------------------
# pattern tables and traces


def normalized_db(pattern: HarmonicPattern, main_beam: float, floor_db: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(pattern.magnitude / main_beam)
    return np.maximum(db, -floor_db)


def write_pattern(path, pattern: HarmonicPattern, main_beam: float, floor_db: float = 240.0) -> None:
    db = normalized_db(pattern, main_beam, floor_db)
    with open(path, "w", newline="") as fh:
        fh.write("theta_deg,magnitude_db_normalized\n")
        for th, v in zip(np.degrees(pattern.theta_radians), db):
            fh.write(f"{th:.6f},{v:.6f}\n")


def read_pattern(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


TRACE_COLUMNS = ("generation", "best_fitness", "avg_fitness", "best_sll_db", "best_sbl_db", "survivors")


def write_trace(path, trace: GaTrace) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for g in range(len(trace)):
            fh.write(
                f"{g},{trace.best_fitness[g]:.12f},{trace.average_fitness[g]:.12f},"
                f"{-trace.best_sll_suppression_db[g]:.12f},{-trace.best_sbl_suppression_db[g]:.12f},"
                f"{trace.survivor_count[g]}\n"
            )


def read_trace(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = list(zip(*[[float(v) for v in row] for row in reader]))
    return {name: np.array(col) for name, col in zip(header, cols)}


# ---------------------------------------------------------------------------
# metrics report


def format_metrics(metrics: PatternMetrics, fitness: float | None = None, w1=None, w2=None) -> str:
    lines = [
        f"sll_db={metrics.sll_db:.12f}",
        f"sbl_db={metrics.sbl_db:.12f}",
        f"main_beam_db={metrics.main_beam_db:.12f}",
    ]
    if fitness is not None:
        lines += [f"fitness={fitness:.12f}", f"w1={w1}", f"w2={w2}"]
    for n, v in enumerate(metrics.per_sideband_suppression_db, start=1):
        lines.append(f"sideband_{n}_db={-v:.12f}")
    angles = ",".join(f"{np.degrees(a):.6f}" for a in metrics.sidelobe_angles)
    lines.append(f"sidelobe_angles_deg={angles}")
    return "\n".join(lines) + "\n"


def read_metrics(path) -> dict[str, str]:
    return parse_key_values(Path(path).read_text(), str(path))


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    array: ArrayConfig = field(default_factory=ArrayConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    ga: GaConfig = field(default_factory=GaConfig)
    out_dir: Path = Path("out")
    write_patterns: bool = True


def _coerce(value: str, default, name):
    try:
        if isinstance(default, bool):
            low = value.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        return value.strip()
    except ValueError:
        raise ConfigError(f"{name}: cannot interpret {value!r} as {type(default).__name__}") from None


def parse_key_values(text: str, source: str = "<config>") -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, found {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


EARLY_STOP_KEYS = ("early_stop", "closeness_db", "floor_db")


def config_keys() -> list[str]:
    keys = []
    for cls in (ArrayConfig, MetricsConfig, GaConfig):
        keys += [f.name for f in fields(cls) if f.name != "early_stop"]
    return keys + list(EARLY_STOP_KEYS) + ["out_dir"]


def build_run_config(values: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    """Merge ``values`` (strings keyed by field name) over ``base``.

    Unknown keys and invalid values raise :class:`ConfigError` naming the field.
    """
    base = base or RunConfig()
    unknown = set(values) - set(config_keys())
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")

    def updates(obj):
        out = {}
        for f in fields(obj):
            if f.name in values and f.name != "early_stop":
                out[f.name] = _coerce(values[f.name], getattr(obj, f.name), f.name)
        return out

    stop = base.ga.early_stop
    enabled = _coerce(values["early_stop"], True, "early_stop") if "early_stop" in values else stop is not None
    cur = stop or EarlyStop()
    stop = None
    if enabled:
        stop = EarlyStop(
            closeness_db=_coerce(values.get("closeness_db", str(cur.closeness_db)), 1.0, "closeness_db"),
            floor_db=_coerce(values.get("floor_db", str(cur.floor_db)), 1.0, "floor_db"),
        )
    try:
        array = replace(base.array, **updates(base.array))
        metrics = replace(base.metrics, **updates(base.metrics))
        ga = replace(base.ga, early_stop=stop, **updates(base.ga))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out_dir = Path(values["out_dir"]) if "out_dir" in values else base.out_dir
    return RunConfig(array=array, metrics=metrics, ga=ga, out_dir=out_dir, write_patterns=base.write_patterns)


def load_run_config(path, base: RunConfig | None = None) -> RunConfig:
    return build_run_config(parse_key_values(Path(path).read_text(), str(path)), base)


def format_run_config(cfg: RunConfig) -> str:
    lines = []
    for obj in (cfg.array, cfg.metrics, cfg.ga):
        for f in fields(obj):
            if f.name == "early_stop":
                continue
            lines.append(f"{f.name}={getattr(obj, f.name)}")
    stop = cfg.ga.early_stop
    lines.append(f"early_stop={stop is not None}")
    if stop is not None:
        lines += [f"closeness_db={stop.closeness_db}", f"floor_db={stop.floor_db}"]
    return "\n".join(lines) + "\n"
