"""Pricing, SoC dynamics, the three objectives and constraint violation.

All the arithmetic lives in :class:`Evaluator`, which works on whole
populations of decoded schedules at once. The per-schedule functions below
are thin wrappers over the same code path.

Sign conventions: ``Xc`` (charging load of a slot) is non-negative, ``Xd``
(discharging load) is non-positive, and the total grid load of a slot is
``base + Xc + Xd``. Energy is power times ``slot_duration``.
"""
import logging
import os
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from moevcs.encoding import (CHARGING, DISCHARGING, decode_population,
                             layout_of)


logger = logging.getLogger(__name__)

ObjectiveVector = namedtuple('ObjectiveVector', ['f1', 'f2', 'f3'])

N_OBJECTIVES = 3


@dataclass(frozen=True, eq=False)
class EvaluatedSolution:
    genome: np.ndarray
    objectives: ObjectiveVector
    cv: float

    @property
    def feasible(self):
        return self.cv == 0


@dataclass(frozen=True, eq=False)
class ConstraintViolation:
    """Per-constraint contributions of one schedule.

    ``equality`` is indexed like ``scenario.requests``, the SoC arrays like
    the layout entries and the grid arrays by slot.
    """
    total: float
    equality: np.ndarray
    soc_lower: np.ndarray
    soc_upper: np.ndarray
    grid_lower: np.ndarray
    grid_upper: np.ndarray

    def items(self, layout, scenario):
        """Yield ``(constraint, ev_id, slot, amount)`` for every violated
        constraint; ``ev_id`` or ``slot`` is ``None`` when not relevant."""
        for k, amount in enumerate(self.equality):
            if amount > 0:
                yield 'soc_required', scenario.requests[k].id, None, amount
        for name, values in (('soc_lower', self.soc_lower),
                             ('soc_upper', self.soc_upper)):
            for k in np.flatnonzero(values > 0):
                yield (name, int(layout.entry_ev_id[k]),
                       int(layout.entry_slot[k]), values[k])
        for name, values in (('grid_lower', self.grid_lower),
                             ('grid_upper', self.grid_upper)):
            for k in np.flatnonzero(values > 0):
                yield name, None, int(k + 1), values[k]


_Terms = namedtuple('_Terms', [
    'xc', 'xd', 'load', 'prices', 'soc', 'user', 'evcs', 'network',
    'equality', 'soc_lower', 'soc_upper', 'grid_lower', 'grid_upper'])


def price_at(base, xc, xd, tariff):
    """Load-dependent price of a slot.

    ``lambda = spot + alpha + beta * L + gamma * L**2`` with
    ``L = base + xc + xd``. Accepts scalars or arrays.
    """
    load = np.add(np.add(base, xc), xd)
    return (tariff.spot_price + tariff.fixed_coeff +
            tariff.linear_coeff * load + tariff.quad_coeff * load * load)


def resolve_threads(threads):
    return threads if threads and threads > 0 else (os.cpu_count() or 1)


class Evaluator(object):
    """Objective and constraint evaluation for one scenario.

    :param epsilon: tolerance relaxing the per-EV energy equality.
    :param threads: worker threads for :meth:`evaluate_population`
        (0 means one per core). Rows are evaluated independently, so the
        results do not depend on it.
    """

    def __init__(self, scenario, layout=None, epsilon=0.1, threads=1):
        self.scenario = scenario
        self.layout = layout if layout is not None else layout_of(scenario)
        self.epsilon = epsilon
        self.threads = resolve_threads(threads)
        self.evaluations = 0

        requests = scenario.requests
        self.tariff = scenario.tariff
        self.n_slots = scenario.grid.n_slots
        self.n_ev = len(requests)
        self.dt = scenario.grid.slot_duration
        self.base = scenario.base_load_array
        self.soc_arrival = np.array([r.soc_arrival for r in requests],
                                    dtype=float)
        self.soc_required = np.array([r.soc_required for r in requests],
                                     dtype=float)
        self.capacity = np.array([r.battery.capacity for r in requests],
                                 dtype=float)
        phi = np.array([r.battery.efficiency_phi for r in requests],
                       dtype=float)
        rate = np.array([r.battery.degradation_rate for r in requests],
                        dtype=float)

        self._ev = self.layout.entry_ev
        self._slot = self.layout.entry_slot - 1
        self._phi = phi[self._ev]
        self._rate = rate[self._ev]

    def _dense(self, values):
        """Scatter per-entry values into a (rows, EVs, slots) array."""
        dense = np.zeros((values.shape[0], self.n_ev, self.n_slots))
        dense[:, self._ev, self._slot] = values
        return dense

    def _terms(self, states, charge, discharge, prices=None):
        charge = np.where(states == CHARGING, charge, 0.0)
        discharge = np.where(states == DISCHARGING, discharge, 0.0)
        net = charge - discharge

        xc = self._dense(charge).sum(axis=1)
        xd = -self._dense(discharge).sum(axis=1)
        load = self.base[None, :] + xc + xd
        if prices is None:
            prices = price_at(self.base[None, :], xc, xd, self.tariff)

        stored = self._phi * net * self.dt
        soc = self.soc_arrival[None, :, None] + \
            np.cumsum(self._dense(stored), axis=2)
        soc_after = soc[:, self._ev, self._slot]

        degradation = self._rate * np.maximum(0.0, -stored)
        user = (net * self.dt * prices[:, self._slot] +
                degradation).sum(axis=1)

        grid_draw = np.maximum(load, 0.0)
        evcs = ((grid_draw * self.tariff.spot_price - xd * prices -
                 xc * prices) * self.dt).sum(axis=1)
        network = (load * load).sum(axis=1)

        residual = soc[:, :, -1] - self.soc_required[None, :] \
            if self.n_slots else np.zeros((len(net), self.n_ev))
        equality = np.maximum(0.0, np.abs(residual) - self.epsilon)
        soc_lower = np.maximum(0.0, -soc_after)
        soc_upper = np.maximum(0.0, soc_after - self.capacity[self._ev])
        grid_lower = np.maximum(0.0, self.tariff.x_min - grid_draw)
        grid_upper = np.maximum(0.0, grid_draw - self.tariff.x_max)

        return _Terms(xc, xd, load, prices, soc_after, user, evcs, network,
                      equality, soc_lower, soc_upper, grid_lower, grid_upper)

    def _evaluate_block(self, population):
        terms = self._terms(*decode_population(population, self.layout))
        objectives = np.column_stack([terms.user, terms.evcs, terms.network])
        cv = (terms.equality.sum(axis=1) + terms.soc_lower.sum(axis=1) +
              terms.soc_upper.sum(axis=1) + terms.grid_lower.sum(axis=1) +
              terms.grid_upper.sum(axis=1))
        return objectives, cv

    def evaluate_population(self, population):
        """Objectives ``(rows, 3)`` and total violation ``(rows,)``.

        Row order of the result matches the input.
        """
        population = np.atleast_2d(np.asarray(population, dtype=float))
        rows = len(population)
        self.evaluations += rows
        if self.threads <= 1 or rows < 2 * self.threads:
            return self._evaluate_block(population)

        blocks = np.array_split(population, self.threads)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            results = list(pool.map(self._evaluate_block, blocks))
        return (np.concatenate([f for f, _ in results]),
                np.concatenate([c for _, c in results]))

    def evaluate(self, genome):
        genome = np.array(genome, dtype=float)
        objectives, cv = self.evaluate_population(genome[None, :])
        return EvaluatedSolution(genome,
                                 ObjectiveVector(*map(float, objectives[0])),
                                 float(cv[0]))

    def schedule_terms(self, schedule, prices=None):
        """Every intermediate quantity of one schedule (first row only)."""
        if prices is not None:
            prices = np.asarray(prices, dtype=float)[None, :]
        terms = self._terms(schedule.state[None, :],
                            schedule.charge_power[None, :],
                            schedule.discharge_power[None, :], prices)
        return _Terms(*(t[0] for t in terms))


def aggregate_ev_load(schedule, slot):
    """``(Xc, Xd)`` of a 1-based slot; ``Xd`` is non-positive."""
    mask = schedule.layout.entry_slot == slot
    xc = float(schedule.active_charge[mask].sum())
    xd = -float(schedule.active_discharge[mask].sum())
    return xc, xd


def soc_trajectory(request, row, slot_duration=1.0):
    """SoC before the first parking slot and after each one, in kWh.

    ``row`` yields one ``(state, power)`` pair per parking slot, ``power``
    being the magnitude of the active charge or discharge power.
    Bounds are not enforced here; see :func:`constraint_violation`.
    """
    phi = request.battery.efficiency_phi
    trajectory = [request.soc_arrival]
    for state, power in row:
        trajectory.append(trajectory[-1] +
                          phi * state * power * slot_duration)
    return np.asarray(trajectory)


def user_cost(schedule, scenario, prices):
    """Total EV user cost (f1): energy bought or sold plus degradation."""
    terms = Evaluator(scenario, schedule.layout).schedule_terms(schedule,
                                                                prices)
    return float(terms.user)


def evcs_cost(schedule, scenario, prices):
    """Charging station cost (f2); negative values are profit."""
    terms = Evaluator(scenario, schedule.layout).schedule_terms(schedule,
                                                                prices)
    return float(terms.evcs)


def network_impact(schedule, scenario):
    """Sum of squared total slot loads (f3)."""
    terms = Evaluator(scenario, schedule.layout).schedule_terms(schedule)
    return float(terms.network)


def constraint_violation(schedule, scenario, eps=0.1):
    terms = Evaluator(scenario, schedule.layout,
                      epsilon=eps).schedule_terms(schedule)
    total = (terms.equality.sum() + terms.soc_lower.sum() +
             terms.soc_upper.sum() + terms.grid_lower.sum() +
             terms.grid_upper.sum())
    return ConstraintViolation(float(total), terms.equality, terms.soc_lower,
                               terms.soc_upper, terms.grid_lower,
                               terms.grid_upper)


def evaluate(genome, scenario, layout=None, epsilon=0.1):
    """Decode a genome, price it endogenously and score it."""
    return Evaluator(scenario, layout, epsilon=epsilon).evaluate(genome)
