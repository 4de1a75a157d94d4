"""Problem instance: time grid, EV requests, battery and tariff parameters.

Every type here is a frozen dataclass. Constructors do not validate, so
that a malformed instance can still be loaded and inspected; invariants are
collected by :func:`validate_scenario`.
"""
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    n_slots: int = 29
    slot_duration: float = 1.0
    start_label: str = '01:00'

    def label(self, slot):
        """Clock label ``HH:MM`` at the start of a 1-based slot."""
        hours, minutes = (int(part) for part in self.start_label.split(':'))
        offset = int(round((slot - 1) * self.slot_duration * 60))
        total = (hours * 60 + minutes + offset) % (24 * 60)
        return '%02d:%02d' % divmod(total, 60)

    def slots(self):
        return list(range(1, self.n_slots + 1))


@dataclass(frozen=True)
class BatteryParams:
    capacity: float = 50.0
    replacement_cost: float = 120000.0
    degradation_k: float = -1.0 / 64
    efficiency_phi: float = 1.0
    max_power: float = 10.0

    @property
    def degradation_rate(self):
        """Currency per kWh of SoC drop, ``|k/100| * C^B / B``."""
        return abs(self.degradation_k / 100.0) * self.replacement_cost / \
            self.capacity


@dataclass(frozen=True)
class EvRequest:
    id: int
    arrival_slot: int
    departure_slot: int
    soc_arrival: float
    soc_required: float
    battery: BatteryParams = field(default_factory=BatteryParams)

    @property
    def parking_span(self):
        return self.departure_slot - self.arrival_slot + 1

    @property
    def energy_demand(self):
        return self.soc_required - self.soc_arrival


@dataclass(frozen=True)
class TariffParams:
    spot_price: float = 0.2084
    fixed_coeff: float = 0.0
    linear_coeff: float = 5e-5
    quad_coeff: float = 5e-5
    x_min: float = 0.0
    x_max: float = 1000.0


@dataclass(frozen=True)
class Scenario:
    grid: TimeGrid
    base_load: tuple
    requests: tuple = ()
    tariff: TariffParams = field(default_factory=TariffParams)
    name: str = 'scenario'

    def __post_init__(self):
        # Normalise sequences so that instances stay hashable and immutable.
        object.__setattr__(self, 'base_load',
                           tuple(float(v) for v in self.base_load))
        object.__setattr__(self, 'requests', tuple(self.requests))

    @property
    def n_users(self):
        return len(self.requests)

    @property
    def base_load_array(self):
        return np.asarray(self.base_load, dtype=float)

    def request(self, ev_id):
        for request in self.requests:
            if request.id == ev_id:
                return request
        raise KeyError(ev_id)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    occupancy: tuple
    total_dim: int
    n_constraints: int

    @property
    def valid(self):
        return not self.violations

    def format(self):
        lines = ['valid: %s' % ('yes' if self.valid else 'no'),
                 'occupancy: %s' % ' '.join(str(n) for n in self.occupancy),
                 'total_dim: %d' % self.total_dim,
                 'n_constraints: %d' % self.n_constraints]
        lines.extend('violation: %s' % v for v in self.violations)
        return '\n'.join(lines)


def parking_slots(request):
    """Inclusive range of 1-based slots the EV spends parked."""
    return list(range(request.arrival_slot, request.departure_slot + 1))


def occupancy(scenario):
    """Number of parked EVs in each slot (``n_i``).

    Requests whose window does not fit the grid are only counted on the
    slots that do.
    """
    counts = np.zeros(max(scenario.grid.n_slots, 0), dtype=int)
    for request in scenario.requests:
        first = max(request.arrival_slot, 1)
        last = min(request.departure_slot, scenario.grid.n_slots)
        if first <= last:
            counts[first - 1:last] += 1
    return counts


def _battery_violations(prefix, battery):
    if not battery.capacity > 0:
        yield '%s: battery.capacity > 0' % prefix
    if not battery.replacement_cost >= 0:
        yield '%s: battery.replacement_cost >= 0' % prefix
    if not 0 < battery.efficiency_phi <= 1:
        yield '%s: 0 < battery.efficiency_phi <= 1' % prefix
    if not battery.max_power > 0:
        yield '%s: battery.max_power > 0' % prefix


def _request_violations(request, n_slots):
    prefix = 'EvRequest[%s]' % request.id
    if not 1 <= request.arrival_slot:
        yield '%s: arrival_slot >= 1' % prefix
    if not request.arrival_slot <= request.departure_slot:
        yield '%s: arrival_slot <= departure_slot' % prefix
    if not request.departure_slot <= n_slots:
        yield '%s: departure_slot <= n_slots' % prefix
    if not 0 <= request.soc_arrival:
        yield '%s: soc_arrival >= 0' % prefix
    if not request.soc_arrival <= request.soc_required:
        yield '%s: soc_arrival <= soc_required' % prefix
    if not request.soc_arrival <= request.battery.capacity:
        yield '%s: soc_arrival <= battery.capacity' % prefix
    if not request.soc_required <= request.battery.capacity:
        yield '%s: soc_required <= battery.capacity' % prefix
    for violation in _battery_violations(prefix, request.battery):
        yield violation


def _tariff_violations(tariff):
    for name in ('spot_price', 'fixed_coeff', 'linear_coeff', 'quad_coeff'):
        if not getattr(tariff, name) >= 0:
            yield 'TariffParams: %s >= 0' % name
    if not tariff.x_min <= tariff.x_max:
        yield 'TariffParams: x_min <= x_max'


def validate_scenario(scenario):
    """Collect every violated invariant of a scenario.

    Never raises; an empty ``violations`` tuple means the scenario is valid.
    The report also carries the per-slot occupancy, the genome dimension
    ``d = 3 * sum(n_i)`` and the number of constraints the evaluator checks.
    """
    grid = scenario.grid
    violations = []

    if not grid.n_slots >= 1:
        violations.append('TimeGrid: n_slots >= 1')
    if not grid.slot_duration > 0:
        violations.append('TimeGrid: slot_duration > 0')

    if len(scenario.base_load) != grid.n_slots:
        violations.append('Scenario: len(base_load) == n_slots (%d != %d)'
                          % (len(scenario.base_load), grid.n_slots))
    negative = [i + 1 for i, v in enumerate(scenario.base_load)
                if not v >= 0]
    if negative:
        violations.append('Scenario: base_load >= 0 (slots %s)'
                          % ', '.join(str(s) for s in negative))

    violations.extend(_tariff_violations(scenario.tariff))

    seen = set()
    for request in scenario.requests:
        if request.id in seen:
            violations.append('EvRequest[%s]: id is unique' % request.id)
        seen.add(request.id)
        violations.extend(_request_violations(request, grid.n_slots))

    counts = occupancy(scenario)
    total_stays = int(counts.sum())
    return ValidationReport(
        violations=tuple(violations),
        occupancy=tuple(int(n) for n in counts),
        total_dim=3 * total_stays,
        n_constraints=(len(scenario.requests) + 2 * total_stays +
                       2 * max(grid.n_slots, 0)))
