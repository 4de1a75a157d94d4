import logging
import logging.config

try:
    from importlib import metadata
except ImportError:  # pragma: no cover
    import importlib_metadata as metadata

import colander
from konfig import Config

from moevcs import errors


# Module version, as defined in PEP-0396.
try:
    __version__ = metadata.version(__package__)
except metadata.PackageNotFoundError:  # pragma: no cover
    __version__ = '0.0.0.dev0'

# Main moevcs logger
logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s,%(msecs)03d %(levelname)-5.5s [%(name)s] %(message)s'
LOG_DATEFMT = '%H:%M:%S'

SETTINGS_SECTION = 'moevcs'

DEFAULT_SETTINGS = {
    'population_size': 1000,
    'max_generations': 20000,
    'crossover_rate': 0.95,
    'mutation_probability': 0.01,
    'sbx_eta': 15.0,
    'pm_eta': 20.0,
    'epsilon': 0.1,
    'seed': 0,
    'threads': 0,
    'inject_baselines': False,
    'repair_demand': True,
    'soc_arrival_low': 0.2,
    'soc_arrival_high': 0.8,
}


def read_ini_settings(ini_path):
    """Return the ``[moevcs]`` section of an ini file as a dict.

    A file without that section contributes nothing.
    """
    config = Config(ini_path)
    if not config.has_section(SETTINGS_SECTION):
        return {}
    return dict(config.get_map(SETTINGS_SECTION))


def load_settings(ini_path=None, **overrides):
    """Merge defaults, ini file and explicit overrides, then validate.

    Overrides set to ``None`` are ignored, so unset command-line flags keep
    the value coming from the ini file.
    """
    from moevcs.schema import SettingsSchema

    settings = DEFAULT_SETTINGS.copy()
    if ini_path:
        settings.update(read_ini_settings(ini_path))
    settings.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return SettingsSchema().deserialize(settings)
    except colander.Invalid as e:
        details = e.asdict()
        message = '; '.join('%s: %s' % item
                            for item in sorted(details.items()))
        raise errors.ConfigurationError(message, details=details)


def setup_logging(ini_path=None, level=logging.INFO):
    """Configure logging from the ini file when it declares loggers,
    otherwise log to the console with the default format.
    """
    if ini_path:
        config = Config(ini_path)
        if config.has_section('loggers'):
            logging.config.fileConfig(ini_path,
                                      disable_existing_loggers=False)
            return

    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATEFMT))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)
