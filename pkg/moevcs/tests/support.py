try:
    import unittest2 as unittest
except ImportError:
    import unittest  # NOQA

try:
    import mock
except ImportError:
    from unittest import mock  # NOQA

import itertools
import shutil
import tempfile

import numpy as np

from moevcs.encoding import Schedule, encode, layout_of
from moevcs.model import (BatteryParams, EvRequest, Scenario, TariffParams,
                          TimeGrid)
from moevcs.moea import MoeaParams
from moevcs.objectives import Evaluator


def make_request(ev_id, arrival, departure, soc_arrival, soc_required,
                 **battery):
    return EvRequest(id=ev_id, arrival_slot=arrival,
                     departure_slot=departure, soc_arrival=soc_arrival,
                     soc_required=soc_required,
                     battery=BatteryParams(**battery))


def make_scenario(base_load, requests=(), tariff=None, **grid):
    grid.setdefault('n_slots', len(base_load))
    return Scenario(grid=TimeGrid(**grid), base_load=base_load,
                    requests=requests, tariff=tariff or TariffParams(),
                    name='test')


def tiny_scenario():
    """Two EVs parked on the same four slots, 20 kWh each to charge,
    over a flat 10 kW building load."""
    return make_scenario([10.0] * 4, [
        make_request(1, 1, 4, 10.0, 30.0),
        make_request(2, 1, 4, 10.0, 30.0),
    ])


def small_params(**kwargs):
    values = dict(population_size=20, max_generations=10, seed=3,
                  threads=1)
    values.update(kwargs)
    return MoeaParams(**values)


def enumerated_population(scenario, powers=(-10, -5, 0, 5, 10)):
    """Encoded schedules whose net powers all come from ``powers``.

    Only per-EV combinations meeting the demand within 0.1 kWh and keeping
    the SoC within ``[0, capacity]`` are kept; the grid bounds are left to
    the evaluator. Assumes unit efficiency and one-hour slots.
    """
    layout = layout_of(scenario)
    per_ev = []
    for request in scenario.requests:
        slots = range(request.arrival_slot, request.departure_slot + 1)
        rows = []
        for combination in itertools.product(powers, repeat=len(slots)):
            soc = request.soc_arrival + np.cumsum(combination)
            if (abs(soc[-1] - request.soc_required) <= 0.1 and
                    soc.min() >= 0 and
                    soc.max() <= request.battery.capacity):
                rows.append({(request.id, slot): (int(np.sign(p)),
                                                  max(p, 0), max(-p, 0))
                             for slot, p in zip(slots, combination)})
        per_ev.append(rows)

    genomes = []
    for combination in itertools.product(*per_ev):
        entries = {}
        for part in combination:
            entries.update(part)
        genomes.append(encode(Schedule.from_entries(layout, entries),
                              layout))
    return np.array(genomes)


def enumerated_front(scenario, powers=(-10, -5, 0, 5, 10)):
    """Objectives of the feasible enumerated schedules."""
    F, CV = Evaluator(scenario).evaluate_population(
        enumerated_population(scenario, powers))
    return F[CV == 0]


class TemporaryDirectoryMixin(object):
    def setUp(self):
        super(TemporaryDirectoryMixin, self).setUp()
        self.tmpdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.tmpdir, ignore_errors=True)
