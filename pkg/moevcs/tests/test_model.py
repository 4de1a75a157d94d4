from moevcs.model import (BatteryParams, TariffParams, TimeGrid, occupancy,
                          parking_slots, validate_scenario)

from .support import make_request, make_scenario, tiny_scenario, unittest


class TimeGridTest(unittest.TestCase):
    def test_first_slot_has_start_label(self):
        self.assertEqual(TimeGrid().label(1), '01:00')

    def test_labels_wrap_around_midnight(self):
        grid = TimeGrid()
        self.assertEqual(grid.label(23), '23:00')
        self.assertEqual(grid.label(24), '00:00')
        self.assertEqual(grid.label(29), '05:00')

    def test_labels_follow_slot_duration(self):
        grid = TimeGrid(n_slots=4, slot_duration=0.25, start_label='08:30')
        self.assertEqual(grid.label(3), '09:00')

    def test_slots_are_one_based(self):
        self.assertEqual(TimeGrid(n_slots=3).slots(), [1, 2, 3])


class BatteryParamsTest(unittest.TestCase):
    def test_default_degradation_rate(self):
        self.assertAlmostEqual(BatteryParams().degradation_rate, 0.375,
                               places=12)

    def test_degradation_rate_scales_with_replacement_cost(self):
        battery = BatteryParams(replacement_cost=60000.0)
        self.assertAlmostEqual(battery.degradation_rate, 0.1875, places=12)


class EvRequestTest(unittest.TestCase):
    def setUp(self):
        self.request = make_request(1, 3, 10, 10.0, 50.0)

    def test_parking_span_is_inclusive(self):
        self.assertEqual(self.request.parking_span, 8)

    def test_energy_demand(self):
        self.assertEqual(self.request.energy_demand, 40.0)

    def test_parking_slots(self):
        self.assertEqual(parking_slots(self.request), list(range(3, 11)))


class OccupancyTest(unittest.TestCase):
    def test_counts_parked_evs_per_slot(self):
        scenario = make_scenario([0.0] * 5, [make_request(1, 1, 3, 0, 0),
                                             make_request(2, 2, 5, 0, 0)])
        self.assertEqual(occupancy(scenario).tolist(), [1, 2, 2, 1, 1])

    def test_windows_outside_the_grid_are_clipped(self):
        scenario = make_scenario([0.0] * 3, [make_request(1, 2, 6, 0, 0)])
        self.assertEqual(occupancy(scenario).tolist(), [0, 1, 1])


class ValidateScenarioTest(unittest.TestCase):
    def test_valid_scenario_has_no_violations(self):
        report = validate_scenario(tiny_scenario())
        self.assertTrue(report.valid)
        self.assertEqual(report.occupancy, (2, 2, 2, 2))
        self.assertEqual(report.total_dim, 24)

    def test_constraint_count(self):
        report = validate_scenario(tiny_scenario())
        # 2 equalities, 2 SoC bounds per parked slot, 2 grid bounds per slot
        self.assertEqual(report.n_constraints, 2 + 2 * 8 + 2 * 4)

    def test_empty_request_list_is_valid(self):
        report = validate_scenario(make_scenario([1.0, 2.0]))
        self.assertTrue(report.valid)
        self.assertEqual(report.total_dim, 0)

    def test_base_load_length_must_match_grid(self):
        scenario = make_scenario([1.0, 2.0], n_slots=3)
        report = validate_scenario(scenario)
        self.assertFalse(report.valid)
        self.assertIn('Scenario: len(base_load) == n_slots (2 != 3)',
                      report.violations)

    def test_negative_base_load_is_reported(self):
        report = validate_scenario(make_scenario([1.0, -2.0]))
        self.assertIn('Scenario: base_load >= 0 (slots 2)',
                      report.violations)

    def test_request_violations_name_the_ev(self):
        scenario = make_scenario([0.0] * 4, [
            make_request(7, 3, 2, 60.0, 40.0)])
        violations = validate_scenario(scenario).violations
        self.assertIn('EvRequest[7]: arrival_slot <= departure_slot',
                      violations)
        self.assertIn('EvRequest[7]: soc_arrival <= soc_required',
                      violations)
        self.assertIn('EvRequest[7]: soc_arrival <= battery.capacity',
                      violations)

    def test_departure_after_grid_is_reported(self):
        scenario = make_scenario([0.0] * 4, [make_request(1, 2, 5, 0, 0)])
        self.assertIn('EvRequest[1]: departure_slot <= n_slots',
                      validate_scenario(scenario).violations)

    def test_battery_violations(self):
        scenario = make_scenario([0.0], [
            make_request(1, 1, 1, 0, 0, efficiency_phi=1.5, max_power=0)])
        violations = validate_scenario(scenario).violations
        self.assertIn('EvRequest[1]: 0 < battery.efficiency_phi <= 1',
                      violations)
        self.assertIn('EvRequest[1]: battery.max_power > 0', violations)

    def test_duplicate_ids_are_reported(self):
        scenario = make_scenario([0.0] * 2, [make_request(1, 1, 1, 0, 0),
                                             make_request(1, 2, 2, 0, 0)])
        self.assertIn('EvRequest[1]: id is unique',
                      validate_scenario(scenario).violations)

    def test_tariff_violations(self):
        tariff = TariffParams(linear_coeff=-1.0, x_min=10.0, x_max=5.0)
        violations = validate_scenario(
            make_scenario([0.0], tariff=tariff)).violations
        self.assertIn('TariffParams: linear_coeff >= 0', violations)
        self.assertIn('TariffParams: x_min <= x_max', violations)

    def test_format_lists_violations(self):
        report = validate_scenario(make_scenario([1.0], n_slots=2))
        text = report.format()
        self.assertIn('valid: no', text)
        self.assertIn('total_dim: 0', text)
        self.assertIn('violation: Scenario: len(base_load)', text)
