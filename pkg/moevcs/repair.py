"""Demand repair of genomes.

A uniform genome almost never ends an EV's stay at its required SoC, so
before evaluation every genome is mapped to a nearby one that does:

1. the net power of each parked slot is clamped, in time order, so that the
   SoC stays within ``[0, capacity]``;
2. the remaining energy gap of each EV is spread over its slots in
   proportion to the power room they have left, then clamped again;
3. whatever gap is left is closed exactly from the departure slot backwards,
   never pushing a later SoC out of its bounds.

Repaired powers are written back into the genome, so an archived genome
decodes to the schedule that was evaluated. Grid bounds are left to the
constraint violation. An EV whose demand cannot be reached in its window
keeps a residual gap.
"""
import logging

import numpy as np

from moevcs.encoding import (CHARGING, DISCHARGING, IDLE, decode_population,
                             layout_of)


logger = logging.getLogger(__name__)

# kWh
UNMET_TOLERANCE = 1e-9
# kWh kept clear of both SoC bounds, well inside the demand tolerance.
SOC_MARGIN = 1e-6
# kW
IDLE_POWER = 1e-9


class DemandRepair(object):
    """Repair operator bound to one scenario and its genome layout."""

    def __init__(self, scenario, layout=None):
        self.layout = layout if layout is not None else layout_of(scenario)
        requests = scenario.requests
        self.n_ev = len(requests)
        self.n_slots = scenario.grid.n_slots

        dt = scenario.grid.slot_duration
        self.soc_arrival = np.array([r.soc_arrival for r in requests],
                                    dtype=float)
        self.soc_required = np.array([r.soc_required for r in requests],
                                     dtype=float)
        capacity = np.array([r.battery.capacity for r in requests],
                            dtype=float)
        self.soc_low = np.full(self.n_ev, SOC_MARGIN)
        self.soc_high = capacity - SOC_MARGIN
        self.target = np.clip(self.soc_required, self.soc_low, self.soc_high)
        # kWh stored per kW of net power over one slot
        self.gain = np.array([r.battery.efficiency_phi * dt
                              for r in requests], dtype=float)

        self._ev = self.layout.entry_ev
        self._slot = self.layout.entry_slot - 1
        self.max_power = np.zeros((self.n_ev, self.n_slots))
        self.max_power[self._ev, self._slot] = \
            self.layout.upper[self.layout.charge_index]

    def __call__(self, population):
        return self.repair_population(population)

    def _net_power(self, population):
        states, charge, discharge = decode_population(population, self.layout)
        net = np.where(states == CHARGING, charge,
                       np.where(states == DISCHARGING, -discharge, 0.0))
        dense = np.zeros((len(population), self.n_ev, self.n_slots))
        dense[:, self._ev, self._slot] = net
        return states, dense

    def _trajectory(self, power):
        return self.soc_arrival[None, :, None] + \
            np.cumsum(self.gain[None, :, None] * power, axis=2)

    def _clamp(self, power):
        """Keep every SoC within bounds, walking the slots in order."""
        gain = self.gain[None, :]
        soc = np.broadcast_to(self.soc_arrival, power.shape[:2]).copy()
        for t in range(self.n_slots):
            limit = self.max_power[None, :, t]
            low = np.maximum(-limit, (self.soc_low[None, :] - soc) / gain)
            high = np.minimum(limit, (self.soc_high[None, :] - soc) / gain)
            power[:, :, t] = np.clip(power[:, :, t], low,
                                     np.maximum(low, high))
            soc = soc + gain * power[:, :, t]
        return power

    def _spread(self, power):
        """Share each gap over the slots, in proportion to their room."""
        gap = self.target[None, :] - self._trajectory(power)[:, :, -1]
        needed = gap / self.gain[None, :]
        room_up = self.max_power[None] - power
        room_down = self.max_power[None] + power
        room = np.where(needed[:, :, None] > 0, room_up, room_down)
        total = room.sum(axis=2)
        share = np.divide(np.abs(needed), total, out=np.zeros_like(total),
                          where=total > 0)
        share = np.minimum(share, 1.0) * np.sign(needed)
        return power + room * share[:, :, None]

    def _close(self, power):
        """Close the remaining gaps exactly, latest slots first."""
        gain = self.gain[None, :]
        gap = self.target[None, :] - self._trajectory(power)[:, :, -1]
        for t in range(self.n_slots - 1, -1, -1):
            later = self._trajectory(power)[:, :, t:]
            headroom = (self.soc_high[None, :, None] - later).min(axis=2)
            footroom = (later - self.soc_low[None, :, None]).min(axis=2)
            limit = self.max_power[None, :, t]

            up = np.minimum.reduce([limit - power[:, :, t], gap / gain,
                                    headroom / gain])
            down = np.minimum.reduce([limit + power[:, :, t], -gap / gain,
                                      footroom / gain])
            delta = np.where(gap > 0, np.maximum(up, 0.0),
                             np.where(gap < 0, -np.maximum(down, 0.0), 0.0))
            power[:, :, t] += delta
            gap = gap - gain * delta
        return power

    def repair_population(self, population):
        """Return repaired copies of a 2-D array of genomes."""
        population = np.atleast_2d(np.asarray(population, dtype=float))
        repaired = population.copy()
        if self.layout.n_entries == 0:
            return repaired

        states, power = self._net_power(population)
        power = self._clamp(power)
        power = self._clamp(self._spread(power))
        power = self._close(power)
        short = np.abs(self.target[None, :] -
                       self._trajectory(power)[:, :, -1]) > UNMET_TOLERANCE
        if short.any():
            logger.debug('%d EV stay(s) cannot reach their required SoC',
                         int(short.sum()))
        power = np.clip(power, -self.max_power[None], self.max_power[None])
        net = power[:, self._ev, self._slot]
        net[np.abs(net) < IDLE_POWER] = 0.0

        layout = self.layout
        state_genes = repaired[:, layout.state_index]
        charge_genes = repaired[:, layout.charge_index]
        discharge_genes = repaired[:, layout.discharge_index]

        charging, discharging = net > 0, net < 0
        state_genes[charging & (states != CHARGING)] = CHARGING
        state_genes[discharging & (states != DISCHARGING)] = DISCHARGING
        state_genes[(net == 0) & (states != IDLE)] = IDLE
        charge_genes[charging] = net[charging]
        discharge_genes[discharging] = -net[discharging]

        repaired[:, layout.state_index] = state_genes
        repaired[:, layout.charge_index] = charge_genes
        repaired[:, layout.discharge_index] = discharge_genes
        return repaired


def repair_population(population, scenario, layout=None):
    return DemandRepair(scenario, layout).repair_population(population)
