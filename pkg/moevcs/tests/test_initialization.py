import logging
import os

from moevcs import DEFAULT_SETTINGS, load_settings, setup_logging
from moevcs.errors import (ERRORS, EXIT_RUNTIME, EXIT_USAGE,
                           ConfigurationError, InfeasibleDemandError,
                           MoevcsError, ScenarioError)
from moevcs.moea import MoeaParams

from .support import TemporaryDirectoryMixin, mock, unittest


class SettingsTest(TemporaryDirectoryMixin, unittest.TestCase):
    def write_ini(self, content):
        path = os.path.join(self.tmpdir, 'moevcs.ini')
        with open(path, 'w') as f:
            f.write(content)
        return path

    def test_defaults(self):
        settings = load_settings()
        self.assertEqual(settings['population_size'], 1000)
        self.assertEqual(settings['max_generations'], 20000)
        self.assertEqual(settings['crossover_rate'], 0.95)
        self.assertEqual(settings['epsilon'], 0.1)
        self.assertFalse(settings['inject_baselines'])
        self.assertTrue(settings['repair_demand'])

    def test_ini_values_are_converted(self):
        ini = self.write_ini('[moevcs]\n'
                             'population_size = 50\n'
                             'crossover_rate = 0.8\n'
                             'inject_baselines = false\n')
        settings = load_settings(ini)
        self.assertEqual(settings['population_size'], 50)
        self.assertEqual(settings['crossover_rate'], 0.8)
        self.assertFalse(settings['inject_baselines'])
        self.assertEqual(settings['seed'], DEFAULT_SETTINGS['seed'])

    def test_overrides_win_over_the_ini(self):
        ini = self.write_ini('[moevcs]\nseed = 4\nmax_generations = 7\n')
        settings = load_settings(ini, seed=9, max_generations=None)
        self.assertEqual(settings['seed'], 9)
        self.assertEqual(settings['max_generations'], 7)

    def test_ini_without_the_section(self):
        ini = self.write_ini('[other]\nseed = 4\n')
        self.assertEqual(load_settings(ini)['seed'], 0)

    def test_invalid_values(self):
        with self.assertRaises(ConfigurationError) as cm:
            load_settings(population_size=5, crossover_rate=2)
        error = cm.exception
        self.assertEqual(error.errno, ERRORS.INVALID_CONFIGURATION)
        self.assertEqual(error.exit_code, EXIT_USAGE)
        self.assertEqual(sorted(error.details),
                         ['crossover_rate', 'population_size'])

    def test_arrival_soc_bounds_are_ordered(self):
        with self.assertRaises(ConfigurationError) as cm:
            load_settings(soc_arrival_low=0.9, soc_arrival_high=0.1)
        self.assertIn('soc_arrival_low', cm.exception.details)

    def test_params_from_settings(self):
        params = MoeaParams.from_settings(load_settings(seed=2),
                                          population_size=8)
        self.assertEqual(params.seed, 2)
        self.assertEqual(params.population_size, 8)
        self.assertEqual(params.pm_eta, 20.0)


class LoggingSetupTest(TemporaryDirectoryMixin, unittest.TestCase):
    def setUp(self):
        super(LoggingSetupTest, self).setUp()
        root = logging.getLogger()
        self.addCleanup(setattr, root, 'handlers', root.handlers[:])
        self.addCleanup(root.setLevel, root.level)

    def test_console_handler_by_default(self):
        setup_logging(level=logging.DEBUG)
        root = logging.getLogger()
        self.assertEqual(len(root.handlers), 1)
        self.assertIsInstance(root.handlers[0], logging.StreamHandler)
        self.assertEqual(root.level, logging.DEBUG)

    @mock.patch('logging.config.fileConfig')
    def test_ini_loggers_are_used(self, file_config):
        path = os.path.join(self.tmpdir, 'logging.ini')
        with open(path, 'w') as f:
            f.write('[loggers]\nkeys = root\n')
        setup_logging(path)
        file_config.assert_called_with(path, disable_existing_loggers=False)

    @mock.patch('logging.config.fileConfig')
    def test_ini_without_loggers(self, file_config):
        path = os.path.join(self.tmpdir, 'settings.ini')
        with open(path, 'w') as f:
            f.write('[moevcs]\nseed = 1\n')
        setup_logging(path)
        self.assertFalse(file_config.called)


class ErrorsTest(unittest.TestCase):
    def test_message_carries_the_errno(self):
        error = ScenarioError('Something broke')
        self.assertEqual(str(error), '[102] Something broke')
        self.assertEqual(error.exit_code, EXIT_RUNTIME)

    def test_demand_error_names_the_vehicle(self):
        error = InfeasibleDemandError('Too short', ev_id=7)
        self.assertEqual(error.ev_id, 7)
        self.assertIsInstance(error, MoevcsError)

    def test_errno_renders_as_a_number(self):
        error = ConfigurationError('Bad value')
        self.assertEqual(str(error), '[101] Bad value')
        self.assertNotIn('INVALID', str(error))

    def test_base_error_has_an_errno(self):
        error = MoevcsError('Unexpected')
        self.assertEqual(error.errno, ERRORS.UNDEFINED)
        self.assertEqual(str(error), '[999] Unexpected')
