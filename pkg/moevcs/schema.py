"""Colander schemas for scenario documents and run settings.

Scenario schemas only check structure and types, and fill in defaults for
omitted parameter blocks. Semantic invariants (capacities, slot ranges...)
are reported by :func:`moevcs.model.validate_scenario` instead, so that an
invalid scenario can still be loaded and diagnosed.
"""
import dataclasses

import colander
from colander import SchemaNode, Float, Integer, String

from moevcs.model import (BatteryParams, EvRequest, Scenario, TariffParams,
                          TimeGrid)


class WholeNumber(Integer):
    """Integer type that rejects fractional values instead of truncating."""

    def deserialize(self, node, cstruct):
        if isinstance(cstruct, bool) or (isinstance(cstruct, float) and
                                         not cstruct.is_integer()):
            raise colander.Invalid(node, '%r is not an integer' % (cstruct,))
        return super(WholeNumber, self).deserialize(node, cstruct)


class ClockLabel(SchemaNode):
    """``HH:MM`` label of the first slot."""
    schema_type = String
    validator = colander.Regex(r'^\d{1,2}:\d{2}$', msg='Expected HH:MM')
    missing = TimeGrid.start_label

    def preparer(self, appstruct):
        if isinstance(appstruct, str):
            return appstruct.strip()
        return appstruct


class TimeGridSchema(colander.MappingSchema):
    n_slots = SchemaNode(WholeNumber())
    slot_duration = SchemaNode(Float(), missing=TimeGrid.slot_duration)
    start_label = ClockLabel()


class BatterySchema(colander.MappingSchema):
    capacity = SchemaNode(Float(), missing=BatteryParams.capacity)
    replacement_cost = SchemaNode(Float(),
                                  missing=BatteryParams.replacement_cost)
    degradation_k = SchemaNode(Float(), missing=BatteryParams.degradation_k)
    efficiency_phi = SchemaNode(Float(), missing=BatteryParams.efficiency_phi)
    max_power = SchemaNode(Float(), missing=BatteryParams.max_power)


class EvRequestSchema(colander.MappingSchema):
    id = SchemaNode(WholeNumber())
    arrival_slot = SchemaNode(WholeNumber())
    departure_slot = SchemaNode(WholeNumber())
    soc_arrival = SchemaNode(Float())
    soc_required = SchemaNode(Float())
    battery = BatterySchema(missing={})


class EvRequestList(colander.SequenceSchema):
    request = EvRequestSchema()


class BaseLoad(colander.SequenceSchema):
    kw = SchemaNode(Float())


class TariffSchema(colander.MappingSchema):
    spot_price = SchemaNode(Float(), missing=TariffParams.spot_price)
    fixed_coeff = SchemaNode(Float(), missing=TariffParams.fixed_coeff)
    linear_coeff = SchemaNode(Float(), missing=TariffParams.linear_coeff)
    quad_coeff = SchemaNode(Float(), missing=TariffParams.quad_coeff)
    x_min = SchemaNode(Float(), missing=TariffParams.x_min)
    x_max = SchemaNode(Float(), missing=TariffParams.x_max)


class ScenarioSchema(colander.MappingSchema):
    """Schema of a ``scenario.json`` document."""

    name = SchemaNode(String(), missing='scenario')
    grid = TimeGridSchema()
    base_load = BaseLoad()
    requests = EvRequestList(missing=())
    tariff = TariffSchema(missing={})


def deserialize_scenario(cstruct):
    """Build a :class:`Scenario` from a decoded JSON document.

    :raises colander.Invalid: if the document is structurally wrong.
    """
    appstruct = ScenarioSchema().deserialize(cstruct)
    requests = [EvRequest(battery=BatteryParams(**r.pop('battery')), **r)
                for r in (dict(r) for r in appstruct['requests'])]
    return Scenario(grid=TimeGrid(**appstruct['grid']),
                    base_load=appstruct['base_load'],
                    requests=requests,
                    tariff=TariffParams(**appstruct['tariff']),
                    name=appstruct['name'])


def serialize_scenario(scenario):
    """Plain JSON-compatible mapping of a scenario.

    Numbers are kept as Python numbers (not colander strings) so that a
    dump/load cycle is bit-exact.
    """
    return {
        'name': scenario.name,
        'grid': dataclasses.asdict(scenario.grid),
        'base_load': list(scenario.base_load),
        'requests': [dataclasses.asdict(r) for r in scenario.requests],
        'tariff': dataclasses.asdict(scenario.tariff),
    }


class Probability(SchemaNode):
    schema_type = Float
    validator = colander.Range(min=0.0, max=1.0)


class PositiveFloat(SchemaNode):
    schema_type = Float

    def validator(self, node, value):
        if not value > 0:
            raise colander.Invalid(node, '%r is not strictly positive' % value)


class PopulationSize(SchemaNode):
    schema_type = Integer

    def validator(self, node, value):
        if value < 4 or value % 2:
            raise colander.Invalid(node, 'Population size must be even '
                                   'and at least 4 (got %r)' % value)


class SettingsSchema(colander.MappingSchema):
    """Run settings, as read from the ``[moevcs]`` ini section."""

    population_size = PopulationSize()
    max_generations = SchemaNode(Integer(), validator=colander.Range(min=1))
    crossover_rate = Probability()
    mutation_probability = Probability()
    sbx_eta = PositiveFloat()
    pm_eta = PositiveFloat()
    epsilon = SchemaNode(Float(), validator=colander.Range(min=0.0))
    seed = SchemaNode(Integer(), validator=colander.Range(min=0))
    threads = SchemaNode(Integer(), validator=colander.Range(min=0))
    inject_baselines = SchemaNode(colander.Boolean())
    repair_demand = SchemaNode(colander.Boolean())
    soc_arrival_low = Probability()
    soc_arrival_high = Probability()

    def validator(self, node, value):
        if value['soc_arrival_low'] > value['soc_arrival_high']:
            error = colander.Invalid(node)
            error['soc_arrival_low'] = 'Must not exceed soc_arrival_high'
            raise error
