"""Constrained mixed-variable NSGA-II.

Variation acts on the continuous genome; discreteness only appears when a
genome is decoded. Solutions are compared with constrained dominance: a
smaller total violation wins, and equal violations fall back to Pareto
dominance.

Internally a population is a triple of arrays: genomes ``X (n, d)``,
objectives ``F (n, 3)`` and violations ``CV (n,)``.
"""
import logging
from dataclasses import dataclass, field, fields

import numpy as np

from moevcs.encoding import layout_of
from moevcs.errors import ConfigurationError, ScenarioError
from moevcs.metrics import hypervolume, objective_matrix, reference_point
from moevcs.model import validate_scenario
from moevcs.objectives import EvaluatedSolution, Evaluator, ObjectiveVector
from moevcs.repair import DemandRepair


logger = logging.getLogger(__name__)

# Genes closer than this are treated as equal by SBX.
SBX_EQUALITY = 1e-14


@dataclass(frozen=True)
class MoeaParams:
    population_size: int = 1000
    max_generations: int = 20000
    crossover_rate: float = 0.95
    mutation_probability: float = 0.01
    sbx_eta: float = 15.0
    pm_eta: float = 20.0
    epsilon: float = 0.1
    seed: int = 0
    threads: int = 1
    inject_baselines: bool = False
    repair_demand: bool = True

    @classmethod
    def from_settings(cls, settings, **overrides):
        """Pick the optimiser parameters out of a settings mapping."""
        names = {f.name for f in fields(cls)}
        values = {k: v for k, v in settings.items() if k in names}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self):
        problems = []
        if self.population_size < 4 or self.population_size % 2:
            problems.append('population_size must be even and >= 4')
        if self.max_generations < 1:
            problems.append('max_generations must be >= 1')
        for name in ('crossover_rate', 'mutation_probability'):
            if not 0 <= getattr(self, name) <= 1:
                problems.append('%s must be within [0, 1]' % name)
        for name in ('sbx_eta', 'pm_eta'):
            if not getattr(self, name) > 0:
                problems.append('%s must be > 0' % name)
        if self.epsilon < 0:
            problems.append('epsilon must be >= 0')
        if problems:
            raise ConfigurationError('; '.join(problems),
                                     details={'params': problems})
        return self


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    n_feasible: int
    best_f1: float
    best_f2: float
    best_f3: float
    hypervolume: float

    def as_line(self):
        return '%d, %d, %r, %r, %r, %r' % (
            self.generation, self.n_feasible, self.best_f1, self.best_f2,
            self.best_f3, self.hypervolume)


@dataclass
class ParetoArchive:
    """Final first front and the per-generation history of a run."""
    solutions: list
    history: list = field(default_factory=list)
    reference_point: np.ndarray = None
    evaluations: int = 0

    @property
    def feasible(self):
        return bool(self.solutions) and all(s.feasible
                                             for s in self.solutions)

    @property
    def objectives(self):
        return objective_matrix(self.solutions)


class RandomStreams(object):
    """Independent generators split from one seed, one per concern.

    Draws from one stream never shift another, so the same seed always
    yields the same run whatever the evaluation parallelism.
    """
    NAMES = ('init', 'selection', 'crossover', 'mutation')

    def __init__(self, seed):
        children = np.random.SeedSequence(seed).spawn(len(self.NAMES))
        for name, child in zip(self.NAMES, children):
            setattr(self, name, np.random.default_rng(child))


def _arrays(solutions):
    F = objective_matrix(solutions)
    CV = np.asarray([s.cv for s in solutions], dtype=float)
    return F, CV


def dominance_matrix(F, CV):
    """``D[i, j]`` is true when solution ``i`` constrained-dominates ``j``."""
    F = np.atleast_2d(F)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    same_cv = CV[:, None] == CV[None, :]
    return (CV[:, None] < CV[None, :]) | (same_cv & le & lt)


def constrained_dominates(a, b):
    """Whether solution ``a`` is better than ``b``."""
    if a.cv != b.cv:
        return a.cv < b.cv
    fa, fb = np.asarray(a.objectives), np.asarray(b.objectives)
    return bool(np.all(fa <= fb) and np.any(fa < fb))


def nondominated_fronts(D, limit=None):
    """Peel fronts off a dominance matrix.

    Stops once ``limit`` members have been assigned, when given.
    """
    n = len(D)
    remaining = D.sum(axis=0)
    assigned = np.zeros(n, dtype=bool)
    fronts = []
    count = 0
    while count < n and (limit is None or count < limit):
        current = np.flatnonzero((remaining == 0) & ~assigned)
        fronts.append(current)
        assigned[current] = True
        count += len(current)
        remaining = remaining - D[current].sum(axis=0)
    return fronts


def fast_nondominated_sort(population):
    """Partition solutions into fronts of indices under constrained
    dominance; front 0 is the best."""
    if not population:
        return []
    F, CV = _arrays(population)
    return [front.tolist() for front in
            nondominated_fronts(dominance_matrix(F, CV))]


def crowding_distance(front):
    """NSGA-II crowding distance of every member of a front.

    Boundary members of each objective get an infinite distance; an
    objective with zero range contributes nothing.
    """
    F = front if isinstance(front, np.ndarray) else objective_matrix(front)
    n, m = F.shape
    if n <= 2:
        return np.full(n, np.inf)

    distance = np.zeros(n)
    for k in range(m):
        order = np.argsort(F[:, k], kind='stable')
        values = F[order, k]
        span = values[-1] - values[0]
        distance[order[0]] = distance[order[-1]] = np.inf
        if span > 0:
            distance[order[1:-1]] += (values[2:] - values[:-2]) / span
    return distance


def _pick_winners(pairs, a_wins, b_wins, coins):
    return np.where(a_wins, pairs[:, 0],
                    np.where(b_wins, pairs[:, 1],
                             np.where(coins, pairs[:, 0], pairs[:, 1])))


def binary_tournament(D, crowding, rng, size):
    """Indices of ``size`` tournament winners.

    Constrained dominance decides first, then the larger crowding distance,
    then a fair coin.
    """
    pairs = rng.integers(0, len(D), size=(size, 2))
    coins = rng.random(size) < 0.5
    a, b = pairs[:, 0], pairs[:, 1]
    a_wins = D[a, b] | (~D[b, a] & (crowding[a] > crowding[b]))
    b_wins = D[b, a] | (~D[a, b] & (crowding[b] > crowding[a]))
    return _pick_winners(pairs, a_wins, b_wins, coins)


def tournament_select(population, rng, crowding=None):
    """Binary tournament over a list of evaluated solutions."""
    if len(population) < 2:
        raise ValueError('Tournament needs at least two candidates')
    F, CV = _arrays(population)
    if crowding is None:
        crowding = np.zeros(len(population))
    winner = binary_tournament(dominance_matrix(F, CV),
                               np.asarray(crowding, dtype=float), rng, 1)
    return population[int(winner[0])]


def sbx_crossover(p1, p2, params, rng, bounds):
    """Simulated binary crossover of paired rows of ``p1`` and ``p2``.

    Each pair is crossed with probability ``crossover_rate``, otherwise
    returned as clones. Children are clipped into ``bounds``.
    """
    lower, upper = bounds
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    single = p1.ndim == 1
    p1, p2 = np.atleast_2d(p1), np.atleast_2d(p2)
    if p1.shape != p2.shape:
        raise ValueError('Parents differ in shape: %s vs %s'
                         % (p1.shape, p2.shape))

    crossed = rng.random(len(p1)) < params.crossover_rate
    u = rng.random(p1.shape)
    exponent = 1.0 / (params.sbx_eta + 1.0)
    beta = np.where(u <= 0.5, (2.0 * u) ** exponent,
                    (1.0 / (2.0 * (1.0 - u))) ** exponent)
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)

    keep = ~crossed[:, None] | (np.abs(p1 - p2) <= SBX_EQUALITY)
    c1 = np.clip(np.where(keep, p1, c1), lower, upper)
    c2 = np.clip(np.where(keep, p2, c2), lower, upper)
    if single:
        return c1[0], c2[0]
    return c1, c2


def polynomial_mutation(genomes, params, rng, bounds):
    """Bounded polynomial mutation, each gene with ``mutation_probability``."""
    lower, upper = bounds
    genomes = np.asarray(genomes, dtype=float)
    mutate = rng.random(genomes.shape) < params.mutation_probability
    u = rng.random(genomes.shape)

    span = np.where(upper > lower, upper - lower, 1.0)
    delta1 = (genomes - lower) / span
    delta2 = (upper - genomes) / span
    power = params.pm_eta + 1.0
    exponent = 1.0 / power

    low_side = u < 0.5
    val = np.where(
        low_side,
        2.0 * u + (1.0 - 2.0 * u) * (1.0 - delta1) ** power,
        2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - delta2) ** power)
    val = np.maximum(val, 0.0)
    deltaq = np.where(low_side, val ** exponent - 1.0, 1.0 - val ** exponent)

    mutated = np.clip(genomes + deltaq * (upper - lower), lower, upper)
    return np.where(mutate, mutated, genomes)


def random_population(layout, size, rng):
    """Uniform genomes within the layout's gene bounds."""
    return layout.lower + (layout.upper - layout.lower) * \
        rng.random((size, layout.total_dim))


def initial_population(scenario, layout, params, rng):
    population = random_population(layout, params.population_size, rng)
    if params.inject_baselines:
        from moevcs.baselines import heuristic_genomes
        seeds = heuristic_genomes(scenario, layout)[:len(population)]
        if seeds:
            population[:len(seeds)] = seeds
            logger.debug('Injected %d heuristic schedule(s) into the '
                         'initial population', len(seeds))
    return population


def demand_repair(scenario, layout, params):
    """The run's repair operator, or the identity when it is disabled."""
    if params.repair_demand:
        return DemandRepair(scenario, layout)
    return lambda population: population


def make_offspring(X, parents, params, streams, bounds, repair):
    """SBX on consecutive parent pairs, then mutation, then repair."""
    c1, c2 = sbx_crossover(X[parents[0::2]], X[parents[1::2]], params,
                           streams.crossover, bounds)
    children = np.empty_like(X)
    children[0::2], children[1::2] = c1, c2
    children = polynomial_mutation(children, params, streams.mutation,
                                   bounds)
    return repair(children)


def rank_and_crowd(F, CV, size):
    """Select ``size`` survivors by front then crowding distance.

    Returns ``(survivors, rank, crowding)`` where ``rank`` and ``crowding``
    are aligned with ``survivors``.
    """
    D = dominance_matrix(F, CV)
    fronts = nondominated_fronts(D, limit=size)
    survivors, rank, crowding = [], [], []
    for level, front in enumerate(fronts):
        distance = crowding_distance(F[front])
        room = size - len(survivors)
        if len(front) > room:
            order = np.argsort(-distance, kind='stable')[:room]
            front, distance = front[order], distance[order]
        survivors.extend(front.tolist())
        rank.extend([level] * len(front))
        crowding.extend(distance.tolist())
        if len(survivors) >= size:
            break
    return np.asarray(survivors), np.asarray(rank), np.asarray(crowding)


def generation_stats(generation, F, CV, rank, ref):
    """Stats of a survivor population.

    The hypervolume of the feasible first front is 0 while ``ref`` is
    ``None``, that is until some generation holds a feasible member.
    """
    feasible = CV == 0
    if feasible.any():
        best = F[feasible].min(axis=0)
    else:
        best = np.full(3, np.nan)
    volume = 0.0
    if ref is not None:
        front = F[feasible & (rank == 0)]
        inside = np.all(front < ref, axis=1)
        volume = hypervolume(front[inside], ref)
    return GenerationStats(generation, int(feasible.sum()),
                           float(best[0]), float(best[1]), float(best[2]),
                           volume)


def evolve(scenario, params, progress=None):
    """Run the constrained NSGA-II and return the final first front.

    ``max_generations`` counts the initial population as generation 1, so
    ``max_generations - 1`` rounds of variation follow and exactly
    ``population_size * max_generations`` genomes are evaluated. Genomes go
    through the demand repair before every evaluation unless
    ``repair_demand`` is off.

    The hypervolume reference point is fixed from the feasible survivors of
    the first generation that has any.

    :param progress: optional callable receiving each
        :class:`GenerationStats`.
    :raises ConfigurationError: on invalid parameters, before any work.
    :raises ScenarioError: on an invalid scenario.
    """
    params.validate()
    report = validate_scenario(scenario)
    if not report.valid:
        raise ScenarioError('Invalid scenario: %s'
                            % '; '.join(report.violations),
                            details={'violations': list(report.violations)})

    layout = layout_of(scenario)
    bounds = (layout.lower, layout.upper)
    evaluator = Evaluator(scenario, layout, epsilon=params.epsilon,
                          threads=params.threads)
    repair = demand_repair(scenario, layout, params)
    streams = RandomStreams(params.seed)
    size = params.population_size

    X = repair(initial_population(scenario, layout, params, streams.init))
    F, CV = evaluator.evaluate_population(X)
    generation = 1
    survivors, rank, crowding = rank_and_crowd(F, CV, size)
    X, F, CV = X[survivors], F[survivors], CV[survivors]

    ref = None
    history = []

    def record():
        stats = generation_stats(generation, F, CV, rank, ref)
        history.append(stats)
        logger.debug('%s', stats.as_line())
        if progress is not None:
            progress(stats)

    while True:
        if ref is None and (CV == 0).any():
            ref = reference_point(F[CV == 0])
            logger.debug('Hypervolume reference point fixed at generation '
                         '%d: %s', generation, ref)
        record()
        if generation >= params.max_generations:
            break

        D = dominance_matrix(F, CV)
        parents = binary_tournament(D, crowding, streams.selection, size)
        children = make_offspring(X, parents, params, streams, bounds, repair)
        Fc, CVc = evaluator.evaluate_population(children)
        generation += 1

        X = np.vstack([X, children])
        F = np.vstack([F, Fc])
        CV = np.concatenate([CV, CVc])
        survivors, rank, crowding = rank_and_crowd(F, CV, size)
        X, F, CV = X[survivors], F[survivors], CV[survivors]

    first = np.flatnonzero(rank == 0)
    solutions = [EvaluatedSolution(X[i].copy(),
                                   ObjectiveVector(*map(float, F[i])),
                                   float(CV[i])) for i in first]
    logger.info('Evolution finished after %d generations: %d solution(s) '
                'in the first front, %d feasible in the population',
                generation, len(solutions), int((CV == 0).sum()))
    return ParetoArchive(solutions, history, ref, evaluator.evaluations)
