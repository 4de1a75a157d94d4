import json
import os

import numpy as np

from moevcs.encoding import layout_of
from moevcs.errors import OccupancyError, ScenarioError
from moevcs.model import TimeGrid, validate_scenario
from moevcs.scenarios import (OccupancyProfile, arrivals_from_occupancy,
                              build_problem_set, builtin_profile,
                              dump_scenario, load_base_load_csv,
                              load_scenario, save_scenario,
                              synthetic_base_load)

from .support import TemporaryDirectoryMixin, unittest


class BuiltinProfileTest(unittest.TestCase):
    def test_profiles_span_the_day(self):
        for set_id in (1, 2, 3, 4):
            self.assertEqual(builtin_profile(set_id).n_slots, 29)

    def test_occupancy_at_22h(self):
        self.assertEqual(builtin_profile(1).at(22), 20)
        self.assertEqual(builtin_profile(4).at(22), 30)

    def test_occupancy_at_08h(self):
        self.assertEqual(builtin_profile(1).at(8), 13)
        self.assertEqual(builtin_profile(4).at(8), 20)

    def test_totals_match_user_counts(self):
        self.assertEqual(sum(builtin_profile(1).counts), 320)
        for set_id in (2, 3, 4):
            profile = builtin_profile(set_id)
            self.assertEqual(sum(profile.counts), 400)
            self.assertEqual(profile.n_users, 50)

    def test_unknown_set(self):
        self.assertRaises(ScenarioError, builtin_profile, 5)


class ArrivalsTest(unittest.TestCase):
    def test_constant_occupancy_arrives_at_once(self):
        solution = arrivals_from_occupancy(OccupancyProfile([10] * 8))
        self.assertEqual(solution.arrivals.tolist(), [10] + [0] * 7)
        self.assertFalse(solution.residuals.any())

    def test_set_1_arrivals(self):
        arrivals = arrivals_from_occupancy(builtin_profile(1)).arrivals
        self.assertEqual(arrivals.sum(), 40)
        self.assertEqual({slot: int(n) for slot, n in
                          enumerate(arrivals, start=1) if n},
                         {1: 10, 8: 3, 9: 7, 16: 3, 17: 7, 22: 10})

    def test_builtin_profiles_are_rebuilt_exactly(self):
        for set_id, users in ((1, 40), (2, 50), (3, 50), (4, 50)):
            solution = arrivals_from_occupancy(builtin_profile(set_id))
            self.assertEqual(solution.arrivals.sum(), users)
            self.assertFalse(solution.residuals.any())

    def test_late_arrival_is_infeasible(self):
        with self.assertRaises(OccupancyError) as cm:
            arrivals_from_occupancy(OccupancyProfile([0, 5]))
        self.assertEqual(cm.exception.slots, [2])

    def test_negative_counts_are_rejected(self):
        self.assertRaises(OccupancyError, arrivals_from_occupancy,
                          OccupancyProfile([3, -1, 0], stay_length=1))

    def test_unmatched_departures_leave_residuals(self):
        profile = OccupancyProfile([5, 2, 2, 0], stay_length=2)
        with self.assertLogs('moevcs.scenarios', 'WARNING'):
            solution = arrivals_from_occupancy(profile)
        self.assertEqual(solution.arrivals.tolist(), [5, 0, 5, 0])
        self.assertEqual(solution.residuals.tolist(), [0, 3, 3, 5])


class SyntheticBaseLoadTest(unittest.TestCase):
    def setUp(self):
        self.load = synthetic_base_load(TimeGrid())

    def test_one_value_per_slot(self):
        self.assertEqual(len(self.load), 29)

    def test_follows_the_clock(self):
        self.assertEqual(self.load[0], 30.0)     # 01:00
        self.assertEqual(self.load[6], 65.0)     # 07:00
        self.assertEqual(self.load[8], 100.0)    # 09:00
        self.assertEqual(self.load[16], 100.0)   # 17:00
        self.assertEqual(self.load[17], 82.5)    # 18:00
        self.assertEqual(self.load[23], 30.0)    # 00:00


class BuildProblemSetTest(unittest.TestCase):
    def test_set_1(self):
        scenario = build_problem_set(1)
        self.assertEqual(scenario.n_users, 40)
        report = validate_scenario(scenario)
        self.assertTrue(report.valid)
        self.assertEqual(report.total_dim, 960)
        self.assertEqual(layout_of(scenario).total_dim, 960)

    def test_sets_with_fifty_users(self):
        for set_id in (2, 3, 4):
            scenario = build_problem_set(set_id)
            self.assertEqual(scenario.n_users, 50)
            self.assertEqual(layout_of(scenario).total_dim, 1200)

    def test_occupancy_matches_profile(self):
        for set_id in (1, 2, 3, 4):
            report = validate_scenario(build_problem_set(set_id))
            self.assertEqual(report.occupancy,
                             builtin_profile(set_id).counts)

    def test_requests(self):
        scenario = build_problem_set(2, seed=5)
        for request in scenario.requests:
            self.assertEqual(request.parking_span, 8)
            self.assertEqual(request.soc_required, 50.0)
            self.assertTrue(10.0 <= request.soc_arrival <= 40.0)
        self.assertEqual([r.id for r in scenario.requests],
                         list(range(1, 51)))

    def test_arrival_soc_range(self):
        scenario = build_problem_set(1, soc_arrival_low=0.5,
                                     soc_arrival_high=0.5)
        self.assertEqual({r.soc_arrival for r in scenario.requests}, {25.0})

    def test_same_seed_same_scenario(self):
        self.assertEqual(build_problem_set(3, seed=9),
                         build_problem_set(3, seed=9))
        self.assertNotEqual(build_problem_set(3, seed=9),
                            build_problem_set(3, seed=10))

    def test_custom_base_load(self):
        scenario = build_problem_set(1, base_load=[1.0] * 29)
        np.testing.assert_array_equal(scenario.base_load_array,
                                      np.ones(29))


class ScenarioFilesTest(TemporaryDirectoryMixin, unittest.TestCase):
    def write(self, name, content):
        path = os.path.join(self.tmpdir, name)
        with open(path, 'w') as f:
            f.write(content)
        return path

    def test_base_load_csv_is_sorted_by_slot(self):
        path = self.write('base.csv', 'slot,kw\n2,20\n1,10.5\n3,30\n')
        self.assertEqual(load_base_load_csv(path), [10.5, 20.0, 30.0])

    def test_base_load_csv_needs_both_columns(self):
        path = self.write('base.csv', 'slot,power\n1,10\n')
        self.assertRaises(ScenarioError, load_base_load_csv, path)

    def test_base_load_csv_needs_every_slot(self):
        path = self.write('base.csv', 'slot,kw\n1,10\n3,30\n')
        self.assertRaises(ScenarioError, load_base_load_csv, path)

    def test_base_load_csv_length_is_checked(self):
        path = self.write('base.csv', 'slot,kw\n1,10\n2,30\n')
        self.assertRaises(ScenarioError, load_base_load_csv, path, 29)

    def test_missing_base_load_csv(self):
        self.assertRaises(ScenarioError, load_base_load_csv,
                          os.path.join(self.tmpdir, 'nope.csv'))

    def test_saved_scenario_loads_back(self):
        scenario = build_problem_set(4, seed=2)
        path = os.path.join(self.tmpdir, 'scenario.json')
        save_scenario(scenario, path)
        self.assertEqual(load_scenario(path), scenario)

    def test_dump_is_stable(self):
        self.assertEqual(dump_scenario(build_problem_set(1, seed=3)),
                         dump_scenario(build_problem_set(1, seed=3)))

    def test_corrupt_file(self):
        path = self.write('scenario.json', '{"grid": ')
        self.assertRaises(ScenarioError, load_scenario, path)

    def test_malformed_document(self):
        path = self.write('scenario.json', json.dumps({'base_load': [1]}))
        with self.assertRaises(ScenarioError) as cm:
            load_scenario(path)
        self.assertIn('grid', cm.exception.details)
