"""Genome layout and the mixed-variable decoding.

A genome is a flat float vector. For slot ``i`` with ``n_i`` parked EVs it
holds a block of ``3 * n_i`` genes: the ``n_i`` state genes, then the
discharge powers, then the charge powers. Occupants of a slot are ordered
by ascending EV id.

Populations are 2-D arrays (one genome per row) and every function here has
a row-wise counterpart so that whole populations decode in one call.
"""
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from moevcs.errors import DimensionMismatch, LayoutError


CHARGING = 1
IDLE = 0
DISCHARGING = -1

STATE_BOUNDS = (-1.0, 1.0)
STATE_THRESHOLD = 0.5

SCHEDULE_COLUMNS = ['ev_id', 'slot', 'state', 'charge_kw', 'discharge_kw']


@dataclass(frozen=True, eq=False)
class GenomeLayout:
    """Slot to gene index map.

    ``entry_*`` arrays describe the parked (EV, slot) pairs in genome order;
    ``state_index``, ``discharge_index`` and ``charge_index`` give, for each
    entry, the position of its three genes.
    """
    occupants: tuple
    offsets: tuple
    total_dim: int
    entry_ev_id: np.ndarray = field(repr=False)
    entry_ev: np.ndarray = field(repr=False)
    entry_slot: np.ndarray = field(repr=False)
    state_index: np.ndarray = field(repr=False)
    discharge_index: np.ndarray = field(repr=False)
    charge_index: np.ndarray = field(repr=False)
    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)

    @property
    def n_entries(self):
        return len(self.entry_ev)

    @property
    def n_slots(self):
        return len(self.occupants)

    def same_as(self, other):
        return (self is other or
                (self.occupants == other.occupants and
                 np.array_equal(self.upper, other.upper)))


def layout_of(scenario):
    """Build the deterministic genome layout of a scenario."""
    n_slots = scenario.grid.n_slots
    position = {r.id: k for k, r in enumerate(scenario.requests)}
    occupants = [[] for _ in range(n_slots)]
    for request in sorted(scenario.requests, key=lambda r: r.id):
        first = max(request.arrival_slot, 1)
        last = min(request.departure_slot, n_slots)
        for slot in range(first, last + 1):
            occupants[slot - 1].append(request.id)

    offsets = []
    ev_ids, evs, slots = [], [], []
    states, discharges, charges = [], [], []
    lower, upper = [], []
    offset = 0
    for slot, present in enumerate(occupants, start=1):
        n = len(present)
        offsets.append(offset)
        powers = [scenario.requests[position[ev]].battery.max_power
                  for ev in present]
        for j, ev in enumerate(present):
            ev_ids.append(ev)
            evs.append(position[ev])
            slots.append(slot)
            states.append(offset + j)
            discharges.append(offset + n + j)
            charges.append(offset + 2 * n + j)
        lower.extend([STATE_BOUNDS[0]] * n + [0.0] * (2 * n))
        upper.extend([STATE_BOUNDS[1]] * n + powers + powers)
        offset += 3 * n

    return GenomeLayout(
        occupants=tuple(tuple(p) for p in occupants),
        offsets=tuple(offsets),
        total_dim=offset,
        entry_ev_id=np.asarray(ev_ids, dtype=int),
        entry_ev=np.asarray(evs, dtype=int),
        entry_slot=np.asarray(slots, dtype=int),
        state_index=np.asarray(states, dtype=int),
        discharge_index=np.asarray(discharges, dtype=int),
        charge_index=np.asarray(charges, dtype=int),
        lower=np.asarray(lower, dtype=float),
        upper=np.asarray(upper, dtype=float))


@dataclass(frozen=True, eq=False)
class Schedule:
    """Decoded schedule: one row per parked (EV, slot) entry of a layout.

    ``charge_power`` and ``discharge_power`` are the raw power genes; only
    the one matching the state is active.
    """
    layout: GenomeLayout
    state: np.ndarray
    charge_power: np.ndarray
    discharge_power: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return (self.layout.same_as(other.layout) and
                np.array_equal(self.state, other.state) and
                np.array_equal(self.charge_power, other.charge_power) and
                np.array_equal(self.discharge_power, other.discharge_power))

    __hash__ = None

    @classmethod
    def idle(cls, layout):
        n = layout.n_entries
        return cls(layout, np.zeros(n, dtype=np.int8), np.zeros(n),
                   np.zeros(n))

    @classmethod
    def from_entries(cls, layout, entries):
        """Build a schedule from
        ``{(ev_id, slot): (state, charge, discharge)}``.

        Entries not mentioned stay idle.

        :raises LayoutError: if a key is not a parked (EV, slot) pair.
        """
        index = {(int(ev), int(slot)): k for k, (ev, slot) in
                 enumerate(zip(layout.entry_ev_id, layout.entry_slot))}
        schedule = cls.idle(layout)
        for key, (state, charge, discharge) in entries.items():
            try:
                k = index[key]
            except KeyError:
                raise LayoutError('EV %s is not parked in slot %s' % key)
            schedule.state[k] = state
            schedule.charge_power[k] = charge
            schedule.discharge_power[k] = discharge
        return schedule

    @property
    def active_charge(self):
        return np.where(self.state == CHARGING, self.charge_power, 0.0)

    @property
    def active_discharge(self):
        return np.where(self.state == DISCHARGING, self.discharge_power, 0.0)

    @property
    def net_power(self):
        """Signed power per entry, positive when charging."""
        return self.active_charge - self.active_discharge

    def to_frame(self):
        return pd.DataFrame({
            'ev_id': self.layout.entry_ev_id,
            'slot': self.layout.entry_slot,
            'state': self.state.astype(int),
            'charge_kw': self.active_charge,
            'discharge_kw': self.active_discharge,
        }, columns=SCHEDULE_COLUMNS)


def decode_states(values):
    """Nearest integer in {-1, 0, 1}; ties at +/-0.5 go to the active state."""
    values = np.asarray(values)
    states = np.where(values >= STATE_THRESHOLD, CHARGING,
                      np.where(values <= -STATE_THRESHOLD, DISCHARGING, IDLE))
    return states.astype(np.int8)


def decode_population(population, layout):
    """Decode a 2-D array of genomes.

    Returns ``(states, charge, discharge)`` arrays of shape
    ``(len(population), layout.n_entries)``; powers are clipped into their
    gene bounds.
    """
    population = np.atleast_2d(np.asarray(population, dtype=float))
    if population.shape[1] != layout.total_dim:
        raise DimensionMismatch('Genome has %d genes, layout expects %d'
                                % (population.shape[1], layout.total_dim))
    states = decode_states(population[:, layout.state_index])
    charge = np.clip(population[:, layout.charge_index],
                     layout.lower[layout.charge_index],
                     layout.upper[layout.charge_index])
    discharge = np.clip(population[:, layout.discharge_index],
                        layout.lower[layout.discharge_index],
                        layout.upper[layout.discharge_index])
    return states, charge, discharge


def decode(genome, layout):
    genome = np.asarray(genome, dtype=float)
    if genome.ndim != 1:
        raise DimensionMismatch('Expected a single genome, got shape %s'
                                % (genome.shape,))
    states, charge, discharge = decode_population(genome[None, :], layout)
    return Schedule(layout, states[0], charge[0], discharge[0])


def encode(schedule, layout):
    """Genome whose decoding is ``schedule``.

    :raises LayoutError: if the schedule was built on another layout.
    """
    if not schedule.layout.same_as(layout) or \
            len(schedule.state) != layout.n_entries:
        raise LayoutError('Schedule does not match the genome layout')
    genome = np.zeros(layout.total_dim)
    genome[layout.state_index] = schedule.state
    genome[layout.charge_index] = schedule.charge_power
    genome[layout.discharge_index] = schedule.discharge_power
    return genome


def check_bounds(genome, layout):
    """True when every gene lies within its declared bound."""
    genome = np.asarray(genome, dtype=float)
    return bool(np.all(genome >= layout.lower) and
                np.all(genome <= layout.upper))
