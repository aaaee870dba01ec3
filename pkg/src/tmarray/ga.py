"""Modified integer-coded genetic algorithm for time-modulated array schedules.

Per generation:

1. evaluate the weighted fitness of every member (elites carried over from
   the previous generation keep their cached fitness);
2. rank members by fitness, ties going to the lower population index, and
   take the top ``elite_count`` as elites (best first);
3. flag survivors: elites always, everyone else iff fitness >= mean fitness;
4. build the next population as the elites, copied unmutated, followed by
   offspring bred from survivor pairs: two distinct parents drawn uniformly
   from the survivor pool, single-point crossover, then mutation.

Random draws come from one ``numpy.random.Generator`` seeded with
``rng_seed`` and are consumed in a fixed order: the initial population
(regenerating any all-zero member in population order), then for each
offspring pair in turn: parent pair, crossover decision, cut point (only
when crossing), mutation of child A, mutation of child B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np

from .array_model import ArrayConfig, ExcitationSchedule
from .metrics import Evaluator, MetricsConfig, PatternMetrics, combine, fitness

log = logging.getLogger(__name__)

MUTATION_MODES = ("gene", "chromosome")


@dataclass(frozen=True)
class EarlyStop:
    closeness_db: float = 1.0
    floor_db: float = 27.0


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 60
    generations: int = 2000
    crossover_probability: float = 0.95
    mutation_probability: float = 0.05
    elite_count: int = 25
    w1: float = 1.0
    w2: float = 6.0
    rng_seed: int = 0
    early_stop: EarlyStop | None = None
    mutation_mode: str = "gene"

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must satisfy 0 <= elite_count < population_size")
        for name in ("crossover_probability", "mutation_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.w1 < 0 or self.w2 < 0 or (self.w1 == 0 and self.w2 == 0):
            raise ValueError("weights w1, w2 must be nonnegative and not both zero")
        if self.mutation_mode not in MUTATION_MODES:
            raise ValueError(f"mutation_mode must be one of {MUTATION_MODES}")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")


@dataclass
class GaTrace:
    best_fitness: list[float] = field(default_factory=list)
    average_fitness: list[float] = field(default_factory=list)
    best_sll_suppression_db: list[float] = field(default_factory=list)
    best_sbl_suppression_db: list[float] = field(default_factory=list)
    survivor_count: list[int] = field(default_factory=list)
    fallback: list[bool] = field(default_factory=list)

    def __len__(self):
        return len(self.best_fitness)

    def append(self, best, avg, sll, sbl, survivors, fallback=False):
        self.best_fitness.append(float(best))
        self.average_fitness.append(float(avg))
        self.best_sll_suppression_db.append(float(sll))
        self.best_sbl_suppression_db.append(float(sbl))
        self.survivor_count.append(int(survivors))
        self.fallback.append(bool(fallback))


# ---------------------------------------------------------------------------
# operators on raw gene arrays


def _random_genes(shape, g_max, rng):
    genes = rng.integers(0, g_max + 1, size=shape)
    for i in range(shape[0]):
        while not genes[i].any():
            genes[i] = rng.integers(0, g_max + 1, size=shape[1:])
    return genes


def _crossover_genes(a, b, probability, rng, cut=None):
    if a.shape != b.shape:
        raise ValueError(f"parent shapes differ: {a.shape} vs {b.shape}")
    fa, fb = a.reshape(-1).copy(), b.reshape(-1).copy()
    if fa.size < 2 or rng.random() >= probability:
        return fa.reshape(a.shape), fb.reshape(b.shape)
    if cut is None:
        cut = int(rng.integers(1, fa.size))
    fa[cut:], fb[cut:] = b.reshape(-1)[cut:], a.reshape(-1)[cut:]
    return fa.reshape(a.shape), fb.reshape(b.shape)


def _mutate_genes(genes, probability, g_max, rng, mode="gene"):
    out = np.array(genes, copy=True)
    if mode == "gene":
        hit = rng.random(out.shape) < probability
        draws = rng.integers(0, g_max + 1, size=out.shape)
        out[hit] = draws[hit]
    elif mode == "chromosome":
        if rng.random() < probability:
            flat = out.reshape(-1)
            flat[rng.integers(flat.size)] = rng.integers(0, g_max + 1)
    else:
        raise ValueError(f"unknown mutation mode {mode!r}")
    return out


# ---------------------------------------------------------------------------
# public operators


def initialize_population(
    array_cfg: ArrayConfig, ga_cfg: GaConfig, rng: np.random.Generator
) -> list[ExcitationSchedule]:
    """Uniform random genes in [0, max_gene]; all-zero members are redrawn."""
    genes = _random_genes((ga_cfg.population_size,) + array_cfg.shape, array_cfg.max_gene, rng)
    return [ExcitationSchedule(g) for g in genes]


def mark_survivors(fitnesses, elite_indices=()) -> tuple[np.ndarray, int]:
    """Mating eligibility: elites always, others iff fitness >= population mean."""
    f = np.asarray(fitnesses, dtype=float)
    if f.size == 0:
        raise ValueError("fitness list is empty")
    flags = f >= f.mean()
    flags[list(elite_indices)] = True
    return flags, int(flags.sum())


def crossover(
    parent_a: ExcitationSchedule,
    parent_b: ExcitationSchedule,
    probability: float,
    rng: np.random.Generator,
    cut: int | None = None,
) -> tuple[ExcitationSchedule, ExcitationSchedule]:
    """Single-point crossover of the flattened chromosomes.

    With ``probability`` a cut in [1, N*L - 1] is drawn (or ``cut`` is used)
    and the tails are swapped; otherwise both children are plain copies.
    """
    a, b = _crossover_genes(parent_a.genes, parent_b.genes, probability, rng, cut)
    return ExcitationSchedule(a), ExcitationSchedule(b)


def mutate(
    schedule: ExcitationSchedule,
    per_gene_probability: float,
    g_max: int,
    rng: np.random.Generator,
    mode: str = "gene",
) -> ExcitationSchedule:
    """Redraw genes uniformly from {0..g_max}.

    ``mode="gene"`` tests each gene independently; ``mode="chromosome"``
    redraws a single random gene with the given probability.
    """
    return ExcitationSchedule(_mutate_genes(schedule.genes, per_gene_probability, g_max, rng, mode))


# ---------------------------------------------------------------------------


def _next_generation(pop, elites, pool, array_cfg, ga_cfg, rng, best):
    n_children = ga_cfg.population_size - len(elites)
    children = []
    fallback = len(pool) < 2
    while len(children) < n_children:
        if fallback:
            pa = pb = pop[best]
        else:
            i, j = rng.choice(pool, size=2, replace=False)
            pa, pb = pop[i], pop[j]
        ca, cb = _crossover_genes(pa, pb, ga_cfg.crossover_probability, rng)
        for child in (ca, cb):
            child = _mutate_genes(
                child, ga_cfg.mutation_probability, array_cfg.max_gene, rng, ga_cfg.mutation_mode
            )
            children.append(child)
    children = np.stack(children[:n_children])
    return np.concatenate([pop[elites], children]), fallback


def evolve(
    array_cfg: ArrayConfig,
    ga_cfg: GaConfig,
    metrics_cfg: MetricsConfig | None = None,
    rng: np.random.Generator | None = None,
    progress=None,
) -> tuple[ExcitationSchedule, PatternMetrics, GaTrace]:
    """Run the GA and return (best schedule, its metrics, per-generation trace).

    ``rng`` defaults to ``np.random.default_rng(ga_cfg.rng_seed)``.
    ``progress``, if given, is called as ``progress(generation, trace)``.
    """
    metrics_cfg = metrics_cfg or MetricsConfig()
    rng = np.random.default_rng(ga_cfg.rng_seed) if rng is None else rng
    evaluate = Evaluator(array_cfg, metrics_cfg)
    P, E = ga_cfg.population_size, ga_cfg.elite_count

    pop = _random_genes((P,) + array_cfg.shape, array_cfg.max_gene, rng)
    fit = np.empty(P)
    sll = np.empty(P)
    sbl = np.empty(P)
    fresh = np.ones(P, dtype=bool)
    trace = GaTrace()
    best_genes, best_fit = None, -np.inf
    fallback = False

    for gen in range(ga_cfg.generations):
        # elites with unchanged genes keep their cached fitness
        if fresh.any():
            # re-draw of an all-zero offspring is not done here: such a member
            # gets the lowest possible fitness instead
            sub = pop[fresh]
            alive = sub.reshape(len(sub), -1).any(axis=1)
            f_sub = np.full(len(sub), -np.inf)
            s1 = np.zeros(len(sub))
            s2 = np.zeros(len(sub))
            if alive.any():
                _, a, b, _ = evaluate(sub[alive])
                s1[alive], s2[alive] = a, b
                f_sub[alive] = combine(ga_cfg.w1, ga_cfg.w2, a, b)
            fit[fresh], sll[fresh], sbl[fresh] = f_sub, s1, s2

        order = np.argsort(-fit, kind="stable")
        elites = order[:E]
        best = order[0]
        finite = np.isfinite(fit)
        flags, count = mark_survivors(np.where(finite, fit, fit[finite].min()), elites)
        flags &= finite | np.isin(np.arange(P), elites)
        count = int(flags.sum())
        trace.append(fit[best], fit[finite].mean(), sll[best], sbl[best], count, fallback)
        if fit[best] > best_fit:
            best_fit, best_genes = fit[best], pop[best].copy()
        if progress is not None:
            progress(gen, trace)

        stop = ga_cfg.early_stop
        if stop is not None and (
            abs(sll[best] - sbl[best]) <= stop.closeness_db
            and min(sll[best], sbl[best]) >= stop.floor_db
        ):
            log.info("early stop at generation %d", gen)
            break
        if gen == ga_cfg.generations - 1:
            break

        pool = np.flatnonzero(flags)
        pop, fallback = _next_generation(pop, elites, pool, array_cfg, ga_cfg, rng, best)
        fit[:E], sll[:E], sbl[:E] = fit[elites], sll[elites], sbl[elites]
        fresh[:] = True
        fresh[:E] = False

    best_schedule = ExcitationSchedule(best_genes)
    _, metrics = fitness(array_cfg, best_schedule, ga_cfg.w1, ga_cfg.w2, metrics_cfg)
    return best_schedule, metrics, trace
