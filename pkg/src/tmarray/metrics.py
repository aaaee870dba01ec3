"""Sidelobe / sideband levels and the weighted GA fitness.

Levels are computed as positive *suppressions* in dB relative to the
centre-frequency main beam |E_0(0)|; the CLI negates them for display.

Stationary points are located on a discrete angle grid: a sample is a peak
when it rises from its left neighbour and the next differing sample falls
(so a plateau reports its first point); endpoints count when they exceed
their single neighbour. Interior peaks are optionally refined by the vertex
of the parabola through the three bracketing samples. The same vectorized
helpers back both the single-schedule functions and :class:`Evaluator`, so
the GA and the CLI see identical numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array_model import (
    ArrayConfig,
    ExcitationSchedule,
    HarmonicPattern,
    angle_grid,
    element_factors,
    harmonic_coefficients,
)

NULL_FRACTION = 1e-9


class DegenerateScheduleError(ValueError):
    """Raised for schedules whose main beam |E_0(0)| is zero (all genes zero)."""


@dataclass(frozen=True)
class MetricsConfig:
    grid_points: int = 2001
    sideband_count: int = 10
    suppression_clamp_db: float = 240.0
    refine_extrema: bool = True

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        if self.sideband_count < 1:
            raise ValueError("sideband_count must be >= 1")
        if not self.suppression_clamp_db > 0:
            raise ValueError("suppression_clamp_db must be > 0")


@dataclass(frozen=True)
class PatternMetrics:
    main_beam_db: float
    sll_suppression_db: float
    sbl_suppression_db: float
    per_sideband_suppression_db: tuple[float, ...]
    sidelobe_angles: tuple[float, ...] = field(default=())

    @property
    def sll_db(self) -> float:
        """SLL in display convention (negative dB)."""
        return -self.sll_suppression_db

    @property
    def sbl_db(self) -> float:
        return -self.sbl_suppression_db


# ---------------------------------------------------------------------------
# vectorized stationary-point helpers, all operating along the last axis


def _plateau_mask(d: np.ndarray) -> np.ndarray:
    # d: (R, G-1) slopes with some exact zeros; a plateau peak is its first point
    s = np.sign(d)
    n = s.shape[-1]
    idx = np.where(s != 0, np.arange(n), n)
    nxt = np.minimum.accumulate(idx[:, ::-1], axis=-1)[:, ::-1]
    s_pad = np.concatenate([s, np.zeros((len(s), 1))], axis=-1)
    s_fill = np.take_along_axis(s_pad, nxt, axis=-1)
    mask = np.zeros((len(d), n + 1), dtype=bool)
    mask[:, 1:-1] = (s[:, :-1] > 0) & (s_fill[:, 1:] < 0)
    mask[:, 0] = s[:, 0] < 0
    mask[:, -1] = s[:, -1] > 0
    return mask


def _peak_mask(y: np.ndarray) -> np.ndarray:
    shape = y.shape
    y = y.reshape(-1, shape[-1])
    d = np.diff(y, axis=-1)
    mask = np.zeros(y.shape, dtype=bool)
    mask[:, 1:-1] = (d[:, :-1] > 0) & (d[:, 1:] < 0)
    mask[:, 0] = d[:, 0] < 0
    mask[:, -1] = d[:, -1] > 0
    flat = ~d.all(axis=-1)
    if flat.any():
        # rows containing plateaus; constant rows (e.g. vanishing harmonics) have no peak
        rows = np.flatnonzero(flat)
        rows = rows[d[rows].any(axis=-1)]
        mask[flat] = False
        if rows.size:
            mask[rows] = _plateau_mask(d[rows])
    return mask.reshape(shape)


def _refine(theta: np.ndarray, y: np.ndarray, idx: tuple, refine: bool):
    """Angles and values for peaks at ``idx`` (a tuple from np.nonzero)."""
    pos = idx[-1]
    vals = y[idx]
    angles = theta[pos].astype(float)
    if not refine:
        return angles, vals
    G = y.shape[-1]
    interior = (pos > 0) & (pos < G - 1)
    if not np.any(interior):
        return angles, vals
    lead = tuple(a[interior] for a in idx[:-1])
    i = pos[interior]
    x0, x1, x2 = theta[i - 1], theta[i], theta[i + 1]
    y0, y1, y2 = y[lead + (i - 1,)], y[lead + (i,)], y[lead + (i + 1,)]
    # parabola through three (possibly unevenly spaced) samples, centred at x1
    h0, h2 = x0 - x1, x2 - x1
    r0, r2 = (y0 - y1) / h0, (y2 - y1) / h2
    a = (r2 - r0) / (h2 - h0)
    b = r0 - a * h0
    with np.errstate(divide="ignore", invalid="ignore"):
        dx = np.where(a < 0, -b / (2 * a), 0.0)
    dx = np.clip(dx, h0, h2)
    angles = angles.copy()
    vals = vals.astype(float, copy=True)
    angles[interior] = x1 + dx
    vals[interior] = y1 + b * dx + a * dx * dx
    return angles, vals


def _first_null(y: np.ndarray, main: np.ndarray) -> np.ndarray:
    """Index of the first null after the main lobe, or G when none exists."""
    G = y.shape[-1]
    cand = np.zeros(y.shape, dtype=bool)
    cand[..., 1:-1] = (y[..., 1:-1] < y[..., :-2]) & (y[..., 1:-1] < y[..., 2:])
    cand |= y < NULL_FRACTION * main[..., None]
    cand[..., 0] = False
    has = cand.any(axis=-1)
    return np.where(has, cand.argmax(axis=-1), G)


def _suppression_db(main: np.ndarray, peak: np.ndarray, clamp: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        sup = 20.0 * np.log10(main / peak)
    sup = np.where(peak > 0, sup, clamp)
    return np.minimum(sup, clamp)


def find_local_maxima(pattern: HarmonicPattern, refine: bool = True) -> list[tuple[float, float]]:
    """Discrete stationary maxima of a sampled pattern as (angle, magnitude) pairs."""
    theta = np.asarray(pattern.theta_radians, dtype=float)
    y = np.asarray(pattern.magnitude, dtype=float)
    if y.size < 3:
        raise ValueError("pattern grid needs at least 3 points to locate maxima")
    idx = np.nonzero(_peak_mask(y))
    angles, vals = _refine(theta, y, idx, refine)
    return [(float(a), float(v)) for a, v in zip(angles, vals)]


# ---------------------------------------------------------------------------


class Evaluator:
    """Batch SLL/SBL evaluator with the grid and element factors precomputed.

    Calling it on a stack of gene matrices (P, N, L) returns main beam,
    SLL suppression, SBL suppression and per-sideband suppressions (P, n_max).
    Harmonics -1..-n_max are skipped: |E_-m| equals |E_m| by conjugate symmetry.
    """

    def __init__(self, config: ArrayConfig, metrics_cfg: MetricsConfig | None = None):
        self.config = config
        self.metrics_cfg = metrics_cfg or MetricsConfig()
        self.theta = angle_grid(self.metrics_cfg.grid_points)
        self.factors = element_factors(config, self.theta)
        self.harmonics = np.arange(0, self.metrics_cfg.sideband_count + 1)

    def patterns(self, genes: np.ndarray) -> np.ndarray:
        """|E_m(theta)| for m = 0..n_max, shape (P, n_max + 1, G)."""
        coeffs = harmonic_coefficients(self.config, genes, self.harmonics)
        parts = np.ascontiguousarray(np.stack([coeffs.real, coeffs.imag]))
        field = parts @ self.factors
        return 2.0 * np.sqrt(field[0] ** 2 + field[1] ** 2)

    def __call__(self, genes: np.ndarray):
        genes = np.asarray(genes)
        single = genes.ndim == 2
        if single:
            genes = genes[None]
        cfg = self.metrics_cfg
        clamp = cfg.suppression_clamp_db
        main = 2.0 * self.config.tau_bar * genes.sum(axis=(-2, -1)).astype(float)
        if np.any(main <= 0):
            raise DegenerateScheduleError(
                "main beam |E_0(0)| is zero: an all-zero schedule has undefined SLL/SBL"
            )
        y = self.patterns(genes)
        mask = _peak_mask(y)

        # SLL: peaks of E_0 beyond the first null
        y0 = y[:, 0, :]
        null = _first_null(y0, main)
        side_mask = mask[:, 0, :] & (np.arange(y0.shape[-1]) >= null[:, None])
        idx = np.nonzero(side_mask)
        _, vals = _refine(self.theta, y0, idx, cfg.refine_extrema)
        side_peak = np.zeros(len(genes))
        np.maximum.at(side_peak, idx[0], vals)
        sll = _suppression_db(main, side_peak, clamp)

        # SBL: global maximum over all stationary maxima of each sideband
        ys = y[:, 1:, :]
        idx = np.nonzero(mask[:, 1:, :])
        _, vals = _refine(self.theta, ys, idx, cfg.refine_extrema)
        sb_peak = np.zeros(ys.shape[:2])
        np.maximum.at(sb_peak, idx[:2], vals)
        per = _suppression_db(main[:, None], sb_peak, clamp)
        sbl = per.min(axis=-1)

        main_db = 20.0 * np.log10(main)
        if single:
            return main_db[0], sll[0], sbl[0], per[0]
        return main_db, sll, sbl, per

    def sidelobe_angles(self, genes: np.ndarray) -> tuple[float, ...]:
        genes = np.asarray(genes)
        main = np.array([2.0 * self.config.tau_bar * genes.sum()])
        y0 = self.patterns(genes[None])[0, 0]
        null = _first_null(y0[None], main)[0]
        idx = np.nonzero(_peak_mask(y0) & (np.arange(y0.size) >= null))
        angles, _ = _refine(self.theta, y0, idx, self.metrics_cfg.refine_extrema)
        return tuple(float(a) for a in angles)


def evaluate_batch(config: ArrayConfig, genes: np.ndarray, metrics_cfg: MetricsConfig | None = None):
    """Shortcut for ``Evaluator(config, metrics_cfg)(genes)``."""
    return Evaluator(config, metrics_cfg)(genes)


def _evaluate(config, schedule, metrics_cfg):
    schedule.validate(config)
    ev = Evaluator(config, metrics_cfg)
    return ev, ev(schedule.genes)


def compute_sll(
    config: ArrayConfig, schedule: ExcitationSchedule, metrics_cfg: MetricsConfig | None = None
) -> tuple[float, tuple[float, ...]]:
    """SLL suppression in dB and the angles of the sidelobe peaks it considered."""
    ev, (_, sll, _, _) = _evaluate(config, schedule, metrics_cfg)
    return float(sll), ev.sidelobe_angles(schedule.genes)


def compute_sbl(
    config: ArrayConfig, schedule: ExcitationSchedule, metrics_cfg: MetricsConfig | None = None
) -> tuple[float, list[float]]:
    """Worst-case sideband suppression over n = 1..n_max, plus the per-sideband list."""
    _, (_, _, sbl, per) = _evaluate(config, schedule, metrics_cfg)
    return float(sbl), [float(v) for v in per]


def combine(w1: float, w2: float, sll: np.ndarray | float, sbl: np.ndarray | float):
    """Weighted fitness w1 * SLL + w2 * SBL on positive suppressions (maximized)."""
    if w1 < 0 or w2 < 0:
        raise ValueError("fitness weights must be nonnegative")
    if w1 == 0 and w2 == 0:
        raise ValueError("fitness weights w1 and w2 cannot both be zero")
    return w1 * sll + w2 * sbl


def fitness(
    config: ArrayConfig,
    schedule: ExcitationSchedule,
    w1: float,
    w2: float,
    metrics_cfg: MetricsConfig | None = None,
) -> tuple[float, PatternMetrics]:
    combine(w1, w2, 0.0, 0.0)
    ev, (main_db, sll, sbl, per) = _evaluate(config, schedule, metrics_cfg)
    metrics = PatternMetrics(
        main_beam_db=float(main_db),
        sll_suppression_db=float(sll),
        sbl_suppression_db=float(sbl),
        per_sideband_suppression_db=tuple(float(v) for v in per),
        sidelobe_angles=ev.sidelobe_angles(schedule.genes),
    )
    return float(combine(w1, w2, sll, sbl)), metrics
