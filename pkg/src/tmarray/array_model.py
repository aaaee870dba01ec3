"""Array geometry, excitation schedules and harmonic radiation patterns.

A symmetric broadside array of ``2N`` isotropic elements is described by the
``N`` element pairs counted outward from the array centre. Each pair is
switched through ``L`` equal time steps per modulation period; the integer
gene ``g[k, q]`` is its excitation level during step ``q``.

Two routes to the Fourier coefficients of the switched excitation are
provided: the closed-form sinc/phase expression used everywhere for speed,
and :func:`numeric_fourier_coefficient`, which integrates the piecewise
constant waveform step by step and serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class ArrayConfig:
    element_pairs: int = 8
    spacing_wavelengths: float = 0.5
    time_steps: int = 10
    max_gene: int = 7
    modulation_period_seconds: float = 1e-5
    carrier_frequency_hz: float = 0.0

    def __post_init__(self):
        if int(self.element_pairs) != self.element_pairs or self.element_pairs < 1:
            raise ValueError(f"element_pairs must be a positive integer, got {self.element_pairs!r}")
        if int(self.time_steps) != self.time_steps or self.time_steps < 1:
            raise ValueError(f"time_steps must be a positive integer, got {self.time_steps!r}")
        if int(self.max_gene) != self.max_gene or self.max_gene < 1:
            raise ValueError(f"max_gene must be a positive integer, got {self.max_gene!r}")
        if not self.spacing_wavelengths > 0:
            raise ValueError(f"spacing_wavelengths must be > 0, got {self.spacing_wavelengths!r}")
        if not self.modulation_period_seconds > 0:
            raise ValueError("modulation_period_seconds must be > 0")
        if self.carrier_frequency_hz < 0:
            raise ValueError("carrier_frequency_hz must be >= 0")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.element_pairs, self.time_steps)

    @property
    def tau_bar(self) -> float:
        """Normalized time step tau / T_p = 1 / L."""
        return 1.0 / self.time_steps

    @property
    def time_step_seconds(self) -> float:
        return self.modulation_period_seconds / self.time_steps

    @property
    def prf(self) -> float:
        """Modulation frequency 1 / T_p in Hz."""
        return 1.0 / self.modulation_period_seconds

    def sideband_frequency(self, m: int) -> float:
        """Absolute frequency of harmonic ``m``: f_0 + m * prf."""
        return self.carrier_frequency_hz + m * self.prf


@dataclass(frozen=True, eq=False)
class ExcitationSchedule:
    """Integer gene matrix, rows = element pairs (centre outward), columns = time steps.

    Flattened row-major the matrix is the GA chromosome.
    """

    genes: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.asarray(self.genes)
        if g.ndim != 2:
            raise ValueError(f"genes must be a 2-D matrix, got shape {g.shape}")
        if g.size and not np.issubdtype(g.dtype, np.integer):
            if not np.all(np.equal(np.mod(g, 1), 0)):
                raise ValueError("genes must be integers")
        g = g.astype(np.int64)
        g.setflags(write=False)
        object.__setattr__(self, "genes", g)

    @classmethod
    def from_chromosome(cls, chromosome: Iterable[int], config: ArrayConfig) -> ExcitationSchedule:
        chrom = np.asarray(list(chromosome) if not isinstance(chromosome, np.ndarray) else chromosome)
        n, L = config.shape
        if chrom.size != n * L:
            raise ValueError(f"chromosome length {chrom.size} does not match N*L = {n * L}")
        return cls(chrom.reshape(n, L))

    @classmethod
    def uniform(cls, config: ArrayConfig, level: int = 1) -> ExcitationSchedule:
        return cls(np.full(config.shape, level, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.genes.shape

    @property
    def chromosome(self) -> np.ndarray:
        return self.genes.reshape(-1)

    def validate(self, config: ArrayConfig) -> None:
        if self.genes.shape != config.shape:
            raise ValueError(
                f"schedule shape {self.genes.shape} does not match config (N, L) = {config.shape}"
            )
        if self.genes.size and (self.genes.min() < 0 or self.genes.max() > config.max_gene):
            raise ValueError(f"genes must lie in [0, {config.max_gene}]")

    def is_static(self) -> bool:
        return bool(np.all(self.genes == self.genes[:, :1]))

    def __eq__(self, other):
        if not isinstance(other, ExcitationSchedule):
            return NotImplemented
        return self.genes.shape == other.genes.shape and bool(np.array_equal(self.genes, other.genes))

    def __hash__(self):
        return hash((self.genes.shape, self.genes.tobytes()))


@dataclass(frozen=True, eq=False)
class HarmonicPattern:
    harmonic_index: int
    theta_radians: np.ndarray
    magnitude: np.ndarray

    def __post_init__(self):
        if len(self.theta_radians) != len(self.magnitude):
            raise ValueError("theta and magnitude lengths differ")


def angle_grid(points: int = 2001) -> np.ndarray:
    """Uniform grid over [0, pi/2], both ends included."""
    if points < 2:
        raise ValueError("an angle grid needs at least 2 points")
    return np.linspace(0.0, np.pi / 2, points)


def _check_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("angle grid must be a nonempty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("angle grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > np.pi / 2 + 1e-15:
        raise ValueError("angle grid must lie within [0, pi/2]")
    return grid


def element_factors(config: ArrayConfig, theta: np.ndarray) -> np.ndarray:
    """cos((2k-1) pi d/lambda sin(theta)) as an (N, len(theta)) matrix."""
    k = np.arange(1, config.element_pairs + 1)
    u = np.pi * config.spacing_wavelengths * np.sin(np.asarray(theta, dtype=float))
    return np.cos(np.outer(2 * k - 1, u))


def _prefactor(m: np.ndarray, L: int) -> np.ndarray:
    # sin(pi m tau_bar)/(pi m); m = 0 takes the limit tau_bar, multiples of L are exact zeros
    m = np.asarray(m)
    out = np.empty(m.shape, dtype=float)
    zero = m == 0
    null = (m % L == 0) & ~zero
    rest = ~zero & ~null
    out[zero] = 1.0 / L
    out[null] = 0.0
    out[rest] = np.sin(np.pi * m[rest] / L) / (np.pi * m[rest])
    return out


def harmonic_coefficients(config: ArrayConfig, genes: np.ndarray, harmonics: Iterable[int]) -> np.ndarray:
    """Vectorized a_mk for a stack of gene matrices.

    ``genes`` has shape (..., N, L); the result has shape (..., M, N) for the
    M requested harmonics.
    """
    genes = np.asarray(genes)
    L = config.time_steps
    m = np.asarray(list(harmonics), dtype=np.int64)
    q = np.arange(1, L + 1)
    phase = np.exp(-1j * np.pi * np.outer(m, 2 * q - 1) / L)  # (M, L)
    sums = np.einsum("...kq,mq->...mk", genes.astype(float), phase)
    return sums * _prefactor(m, L)[:, None]


def harmonic_coefficient(config: ArrayConfig, schedule: ExcitationSchedule, k: int, m: int) -> complex:
    """Fourier coefficient of element pair ``k`` (1-based) at harmonic ``m``."""
    schedule.validate(config)
    if not 1 <= k <= config.element_pairs:
        raise ValueError(f"element index k must be in [1, {config.element_pairs}], got {k}")
    return complex(harmonic_coefficients(config, schedule.genes[k - 1 : k], [m])[0, 0])


def harmonic_pattern(
    config: ArrayConfig, schedule: ExcitationSchedule, m: int, grid: np.ndarray | None = None
) -> HarmonicPattern:
    """|E_m(theta)| = 2 |sum_k a_mk cos((2k-1) pi d/lambda sin theta)| on ``grid``."""
    schedule.validate(config)
    grid = angle_grid() if grid is None else _check_grid(grid)
    coeffs = harmonic_coefficients(config, schedule.genes, [m])[0]
    mag = 2.0 * np.abs(coeffs @ element_factors(config, grid))
    return HarmonicPattern(int(m), grid, mag)


def instantaneous_field(config: ArrayConfig, schedule: ExcitationSchedule, theta: float, t: float) -> complex:
    """Array factor at angle ``theta`` and time ``t`` within one modulation period.

    The carrier term exp(j 2 pi f_0 t) is omitted: it has unit modulus and
    drops out of every pattern magnitude. The return value is therefore the
    complex envelope 2 sum_k U_k(t) cos((2k-1) pi d/lambda sin theta), where
    U_k(t) is the gene of pair k in the time step containing ``t``.
    """
    schedule.validate(config)
    Tp = config.modulation_period_seconds
    if not 0 <= t < Tp:
        raise ValueError(f"t must lie in [0, T_p) = [0, {Tp}), got {t}")
    q = min(int(np.floor(t * config.time_steps / Tp)), config.time_steps - 1)
    status = schedule.genes[:, q].astype(float)
    return complex(2.0 * status @ element_factors(config, np.array([theta]))[:, 0])


def numeric_fourier_coefficient(config: ArrayConfig, schedule: ExcitationSchedule, k: int, m: int) -> complex:
    """(1/T_p) * integral of U_k(t) exp(-j 2 pi m t / T_p) over one period.

    Integrates each time step in closed form, so there is no sampling error.
    """
    schedule.validate(config)
    if not 1 <= k <= config.element_pairs:
        raise ValueError(f"element index k must be in [1, {config.element_pairs}], got {k}")
    L = config.time_steps
    row = schedule.genes[k - 1]
    total = 0j
    for q in range(L):
        u0, u1 = q / L, (q + 1) / L  # step bounds in units of T_p
        if m == 0:
            piece = u1 - u0
        else:
            w = -2j * np.pi * m
            piece = (np.exp(w * u1) - np.exp(w * u0)) / w
        total += row[q] * piece
    return complex(total)
