"""Built-in problem sets and scenario files.

The four built-in sets are defined by their hourly occupancy (EVs parked
per slot) over a 29-slot day starting at 01:00, every EV staying 8 hours.
Arrivals are recovered from the occupancy, EVs are given a random arrival
SoC and asked to leave fully charged.
"""
import json
import logging
from collections import namedtuple
from dataclasses import dataclass

import colander
import numpy as np
import pandas as pd

from moevcs.errors import OccupancyError, ScenarioError
from moevcs.model import (BatteryParams, EvRequest, Scenario, TariffParams,
                          TimeGrid)
from moevcs.schema import deserialize_scenario, serialize_scenario


logger = logging.getLogger(__name__)

STAY_LENGTH = 8
N_SLOTS = 29

PROFILES = {
    1: [10] * 7 + [13] + [10] * 13 + [20, 20, 17] + [10] * 5,
    2: [15, 15, 20, 20, 20, 20, 20, 23, 15, 15] + [10] * 11 +
       [20, 20, 17] + [10] * 5,
    3: [10] * 7 + [13, 10] + [15] * 12 + [25, 25, 22, 15] + [10] * 4,
    4: [10] * 7 + [20] + [10] * 8 + [15] * 5 + [30, 30, 20] + [15] * 5,
}

# Synthetic office-building load by clock hour, kW.
OVERNIGHT_KW = 30.0
DAYTIME_KW = 100.0
_RAMP = (DAYTIME_KW - OVERNIGHT_KW) / 4
HOURLY_BASE_LOAD = (
    [OVERNIGHT_KW] * 6 +
    [OVERNIGHT_KW + _RAMP * k for k in (1, 2, 3)] +
    [DAYTIME_KW] * 9 +
    [DAYTIME_KW - _RAMP * k for k in (1, 2, 3)] +
    [OVERNIGHT_KW] * 3)

ArrivalSolution = namedtuple('ArrivalSolution', ['arrivals', 'residuals'])


@dataclass(frozen=True)
class OccupancyProfile:
    counts: tuple
    stay_length: int = STAY_LENGTH

    def __post_init__(self):
        object.__setattr__(self, 'counts', tuple(int(n) for n in self.counts))

    @property
    def n_slots(self):
        return len(self.counts)

    @property
    def n_users(self):
        return sum(self.counts) // self.stay_length

    def at(self, slot):
        return self.counts[slot - 1]


def builtin_profile(set_id):
    try:
        return OccupancyProfile(PROFILES[set_id])
    except KeyError:
        raise ScenarioError('Unknown problem set %r, expected one of %s'
                            % (set_id, ', '.join(str(k) for k in PROFILES)))


def arrivals_from_occupancy(profile):
    """Per-slot arrival counts producing ``profile`` with fixed stays.

    Solves ``a[t] = o[t] - o[t-1] + a[t-stay]``, clamping negative arrivals
    to zero. Slots where the arrivals do not rebuild the occupancy are
    returned as non-zero ``residuals`` (rebuilt minus given).

    :raises OccupancyError: when counts are negative or an EV would have to
        arrive too late to complete its stay inside the grid.
    """
    counts = np.asarray(profile.counts, dtype=int)
    stay = profile.stay_length
    negative = np.flatnonzero(counts < 0) + 1
    if len(negative):
        raise OccupancyError('Occupancy counts must be non-negative',
                             slots=negative.tolist())

    n = len(counts)
    arrivals = np.zeros(n, dtype=int)
    previous = 0
    for t in range(n):
        leaving = arrivals[t - stay] if t >= stay else 0
        arrivals[t] = max(0, counts[t] - previous + leaving)
        previous = counts[t]

    late = np.flatnonzero(arrivals[max(n - stay + 1, 0):]) + \
        max(n - stay + 1, 0) + 1
    if len(late):
        raise OccupancyError('Arrivals in slots %s cannot stay %d slots '
                             'within a %d-slot grid'
                             % (', '.join(str(s) for s in late), stay, n),
                             slots=late.tolist())

    rebuilt = np.convolve(arrivals, np.ones(stay, dtype=int))[:n]
    residuals = rebuilt - counts
    if residuals.any():
        logger.warning('Occupancy rebuilt with residuals in slots %s',
                       (np.flatnonzero(residuals) + 1).tolist())
    return ArrivalSolution(arrivals, residuals)


def synthetic_base_load(grid):
    """Deterministic building load following the clock hour of each slot."""
    return [HOURLY_BASE_LOAD[int(grid.label(slot).split(':')[0])]
            for slot in grid.slots()]


def load_base_load_csv(path, n_slots=None):
    """Read a ``slot,kw`` CSV into a per-slot list.

    :raises ScenarioError: on missing columns or non-consecutive slots.
    """
    try:
        frame = pd.read_csv(path)
    except (OSError, ValueError) as e:
        raise ScenarioError('Cannot read base load %s: %s' % (path, e))

    missing = {'slot', 'kw'} - set(frame.columns)
    if missing:
        raise ScenarioError('Base load %s lacks column(s) %s'
                            % (path, ', '.join(sorted(missing))))

    frame = frame.sort_values('slot')
    expected = list(range(1, len(frame) + 1))
    if frame['slot'].tolist() != expected:
        raise ScenarioError('Base load %s must list slots 1..%d once each'
                            % (path, len(frame)))
    if n_slots is not None and len(frame) != n_slots:
        raise ScenarioError('Base load %s has %d slots, expected %d'
                            % (path, len(frame), n_slots))
    return frame['kw'].astype(float).tolist()


def build_problem_set(set_id, seed=0, base_load=None, soc_arrival_low=0.2,
                      soc_arrival_high=0.8, battery=None, tariff=None):
    """Instantiate built-in problem set ``set_id``.

    EVs are numbered from 1 in order of arrival. Arrival SoC is drawn
    uniformly in ``[low, high] * capacity`` from a generator seeded with
    ``seed``; every EV leaves with a full battery.

    :param base_load: per-slot kW list; the synthetic profile when omitted.
    """
    profile = builtin_profile(set_id)
    grid = TimeGrid(n_slots=profile.n_slots)
    battery = battery or BatteryParams()
    arrivals = arrivals_from_occupancy(profile).arrivals

    rng = np.random.default_rng(seed)
    requests = []
    for slot, count in enumerate(arrivals, start=1):
        for _ in range(count):
            soc = rng.uniform(soc_arrival_low * battery.capacity,
                              soc_arrival_high * battery.capacity)
            requests.append(EvRequest(
                id=len(requests) + 1,
                arrival_slot=slot,
                departure_slot=slot + profile.stay_length - 1,
                soc_arrival=float(soc),
                soc_required=battery.capacity,
                battery=battery))

    if base_load is None:
        base_load = synthetic_base_load(grid)
    scenario = Scenario(grid=grid, base_load=base_load, requests=requests,
                        tariff=tariff or TariffParams(),
                        name='set%d' % set_id)
    logger.info('Built problem set %d: %d EVs, seed %d', set_id,
                len(requests), seed)
    return scenario


def load_scenario(path):
    """Read a ``scenario.json`` file.

    :raises ScenarioError: if the file is unreadable or malformed.
    """
    try:
        with open(path) as f:
            document = json.load(f)
    except (OSError, ValueError) as e:
        raise ScenarioError('Cannot read scenario %s: %s' % (path, e))

    try:
        return deserialize_scenario(document)
    except colander.Invalid as e:
        details = e.asdict()
        raise ScenarioError('Malformed scenario %s: %s' % (
            path, '; '.join('%s: %s' % item
                            for item in sorted(details.items()))),
            details=details)


def dump_scenario(scenario):
    return json.dumps(serialize_scenario(scenario), indent=2,
                      sort_keys=True) + '\n'


def save_scenario(scenario, path):
    with open(path, 'w', newline='\n') as f:
        f.write(dump_scenario(scenario))
    logger.info('Scenario %s written to %s', scenario.name, path)
