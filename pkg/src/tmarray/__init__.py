"""Time-modulated linear array synthesis: harmonic patterns, SLL/SBL metrics
and a modified integer-coded genetic algorithm."""

from .array_model import (
    ArrayConfig,
    ExcitationSchedule,
    HarmonicPattern,
    angle_grid,
    harmonic_coefficient,
    harmonic_coefficients,
    harmonic_pattern,
    instantaneous_field,
    numeric_fourier_coefficient,
)
from .metrics import (
    DegenerateScheduleError,
    MetricsConfig,
    PatternMetrics,
    compute_sbl,
    compute_sll,
    evaluate_batch,
    find_local_maxima,
    fitness,
)
from .ga import GaConfig, GaTrace, crossover, evolve, initialize_population, mark_survivors, mutate

__all__ = [
    "ArrayConfig",
    "ExcitationSchedule",
    "HarmonicPattern",
    "angle_grid",
    "harmonic_coefficient",
    "harmonic_coefficients",
    "harmonic_pattern",
    "instantaneous_field",
    "numeric_fourier_coefficient",
    "DegenerateScheduleError",
    "MetricsConfig",
    "PatternMetrics",
    "compute_sbl",
    "compute_sll",
    "evaluate_batch",
    "find_local_maxima",
    "fitness",
    "GaConfig",
    "GaTrace",
    "crossover",
    "evolve",
    "initialize_population",
    "mark_survivors",
    "mutate",
]
