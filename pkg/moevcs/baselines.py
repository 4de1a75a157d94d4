"""Comparison strategies.

B1 spreads each EV's demand evenly over its parking window, B2 charges
first-come-first-served at full power, and B3/B4/B5 run a single-objective
GA on network impact, station cost and user cost respectively. Every result
is scored by the same :class:`~moevcs.objectives.Evaluator` as the
multi-objective front.
"""
import logging
from dataclasses import dataclass

import numpy as np

from moevcs.encoding import (CHARGING, IDLE, Schedule, decode, encode,
                             layout_of)
from moevcs.errors import (ConfigurationError, InfeasibleDemandError,
                           ScenarioError)
from moevcs.model import parking_slots, validate_scenario
from moevcs.objectives import Evaluator


logger = logging.getLogger(__name__)

# Slack allowed when checking that a demand fits its window.
DEMAND_TOLERANCE = 1e-9

SOGA_LABELS = {'f3': 'B3', 'f2': 'B4', 'f1': 'B5'}
OBJECTIVE_INDEX = {'f1': 0, 'f2': 1, 'f3': 2}
BASELINE_LABELS = ('B1', 'B2', 'B3', 'B4', 'B5')


@dataclass(frozen=True, eq=False)
class BaselineResult:
    label: str
    schedule: Schedule
    objectives: tuple
    cv: float
    feasible: bool


def _require_valid(scenario):
    report = validate_scenario(scenario)
    if not report.valid:
        raise ScenarioError('Invalid scenario: %s'
                            % '; '.join(report.violations),
                            details={'violations': list(report.violations)})


def _score(label, scenario, layout, schedule, epsilon=0.1):
    solution = Evaluator(scenario, layout,
                         epsilon=epsilon).evaluate(encode(schedule, layout))
    result = BaselineResult(label, schedule, solution.objectives,
                            solution.cv, solution.feasible)
    logger.info('%s: f1=%.4f f2=%.4f f3=%.4f cv=%.6g', label,
                *(tuple(result.objectives) + (result.cv,)))
    return result


def average_schedule(scenario, layout):
    """Schedule of B1, without scoring it."""
    dt = scenario.grid.slot_duration
    entries = {}
    for request in scenario.requests:
        battery = request.battery
        rate = request.energy_demand / (battery.efficiency_phi *
                                        request.parking_span * dt)
        if rate > battery.max_power + DEMAND_TOLERANCE:
            raise InfeasibleDemandError(
                'EV %s needs %.4f kW on average, above its %.4f kW limit'
                % (request.id, rate, battery.max_power), ev_id=request.id)
        rate = min(rate, battery.max_power)
        state = CHARGING if rate > 0 else IDLE
        for slot in parking_slots(request):
            entries[(request.id, slot)] = (state, rate, 0.0)
    return Schedule.from_entries(layout, entries)


def fcfs_schedule(scenario, layout):
    """Schedule of B2, without scoring it.

    EVs are served in order of arrival, ties by ascending id. Chargers are
    not shared, so the order only matters for logging.
    """
    dt = scenario.grid.slot_duration
    entries = {}
    ordered = sorted(scenario.requests,
                     key=lambda r: (r.arrival_slot, r.id))
    for request in ordered:
        battery = request.battery
        remaining = request.energy_demand
        for slot in parking_slots(request):
            if remaining <= DEMAND_TOLERANCE:
                break
            needed = remaining / (battery.efficiency_phi * dt)
            if needed <= battery.max_power:
                entries[(request.id, slot)] = (CHARGING, needed, 0.0)
                remaining = 0.0
            else:
                entries[(request.id, slot)] = (CHARGING, battery.max_power,
                                               0.0)
                remaining -= battery.efficiency_phi * battery.max_power * dt
        if remaining > DEMAND_TOLERANCE:
            raise InfeasibleDemandError(
                'EV %s still needs %.4f kWh when it departs'
                % (request.id, remaining), ev_id=request.id)
    return Schedule.from_entries(layout, entries)


def baseline_avg(scenario, epsilon=0.1):
    """B1: constant charging at the average required power."""
    _require_valid(scenario)
    layout = layout_of(scenario)
    return _score('B1', scenario, layout, average_schedule(scenario, layout),
                  epsilon)


def baseline_fcfs(scenario, epsilon=0.1):
    """B2: full power from arrival until the demand is met."""
    _require_valid(scenario)
    layout = layout_of(scenario)
    return _score('B2', scenario, layout, fcfs_schedule(scenario, layout),
                  epsilon)


def heuristic_genomes(scenario, layout):
    """Encoded B1 and B2 schedules, skipping those that cannot be built."""
    genomes = []
    for build in (average_schedule, fcfs_schedule):
        try:
            genomes.append(encode(build(scenario, layout), layout))
        except InfeasibleDemandError as e:
            logger.debug('No %s seed: %s', build.__name__, e)
    return genomes


def _lexicographic_tournament(cv, values, rng, size):
    pairs = rng.integers(0, len(cv), size=(size, 2))
    coins = rng.random(size) < 0.5
    a, b = pairs[:, 0], pairs[:, 1]
    a_wins = (cv[a] < cv[b]) | ((cv[a] == cv[b]) & (values[a] < values[b]))
    b_wins = (cv[b] < cv[a]) | ((cv[a] == cv[b]) & (values[b] < values[a]))
    return np.where(a_wins, a, np.where(b_wins, b,
                                        np.where(coins, a, b)))


def _truncate(cv, values, size):
    return np.lexsort((values, cv))[:size]


def soga(scenario, objective, params):
    """Single-objective GA minimising ``(cv, objective)`` lexicographically.

    Uses the genome, operators and parameters of the multi-objective run.
    Returns ``(genome, objectives, cv)`` of the best individual.
    """
    # Imported here: moea seeds its population from this module.
    from moevcs.moea import (RandomStreams, demand_repair,
                             initial_population, make_offspring)

    index = OBJECTIVE_INDEX[objective]
    layout = layout_of(scenario)
    bounds = (layout.lower, layout.upper)
    evaluator = Evaluator(scenario, layout, epsilon=params.epsilon,
                          threads=params.threads)
    repair = demand_repair(scenario, layout, params)
    streams = RandomStreams(params.seed)
    size = params.population_size

    X = repair(initial_population(scenario, layout, params, streams.init))
    F, CV = evaluator.evaluate_population(X)
    keep = _truncate(CV, F[:, index], size)
    X, F, CV = X[keep], F[keep], CV[keep]

    for generation in range(2, params.max_generations + 1):
        parents = _lexicographic_tournament(CV, F[:, index],
                                            streams.selection, size)
        children = make_offspring(X, parents, params, streams, bounds,
                                  repair)
        Fc, CVc = evaluator.evaluate_population(children)

        X = np.vstack([X, children])
        F = np.vstack([F, Fc])
        CV = np.concatenate([CV, CVc])
        keep = _truncate(CV, F[:, index], size)
        X, F, CV = X[keep], F[keep], CV[keep]
        logger.debug('SOGA %s gen %d: best %s=%r cv=%r', objective,
                     generation, objective, F[0, index], CV[0])

    return X[0], F[0], float(CV[0])


def baseline_soga(scenario, objective, params):
    """B3 (``'f3'``), B4 (``'f2'``) or B5 (``'f1'``).

    When no feasible individual is found the result is flagged infeasible
    and carries the smallest violation reached.
    """
    if objective not in SOGA_LABELS:
        raise ConfigurationError('Unknown objective %r, expected one of %s'
                                 % (objective, ', '.join(sorted(SOGA_LABELS))))
    params.validate()
    _require_valid(scenario)

    label = SOGA_LABELS[objective]
    layout = layout_of(scenario)
    genome, _, cv = soga(scenario, objective, params)
    result = _score(label, scenario, layout, decode(genome, layout),
                    params.epsilon)
    if not result.feasible:
        logger.warning('%s found no feasible schedule (best cv=%.6g)',
                       label, cv)
    return result


def run_baselines(scenario, labels, params):
    """Evaluate the requested baselines, in ``B1..B5`` order."""
    results = []
    for label in BASELINE_LABELS:
        if label not in labels:
            continue
        if label == 'B1':
            results.append(baseline_avg(scenario, params.epsilon))
        elif label == 'B2':
            results.append(baseline_fcfs(scenario, params.epsilon))
        else:
            objective = {v: k for k, v in SOGA_LABELS.items()}[label]
            results.append(baseline_soga(scenario, objective, params))
    return results
