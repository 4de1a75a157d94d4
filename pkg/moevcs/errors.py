"""Exceptions raised by moevcs.

Every error carries a stable ``errno`` (see ``docs/errors.rst``) and the
process exit code the command line uses when it escapes to the top level.
"""
from enum import IntEnum


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class ERRORS(IntEnum):
    INVALID_CONFIGURATION = 101
    INVALID_SCENARIO = 102
    DIMENSION_MISMATCH = 103
    INFEASIBLE_DEMAND = 104
    INFEASIBLE_OCCUPANCY = 105
    LAYOUT_MISMATCH = 106
    UNDEFINED = 999


class MoevcsError(Exception):
    errno = ERRORS.UNDEFINED
    exit_code = EXIT_RUNTIME

    def __init__(self, message, details=None):
        super(MoevcsError, self).__init__(message)
        self.message = message
        self.details = details

    def __str__(self):
        return '[%d] %s' % (self.errno, self.message)


class ConfigurationError(MoevcsError):
    """Invalid settings, parameters or command line."""
    errno = ERRORS.INVALID_CONFIGURATION
    exit_code = EXIT_USAGE


class ScenarioError(MoevcsError):
    """Scenario is malformed or violates its invariants."""
    errno = ERRORS.INVALID_SCENARIO


class DimensionMismatch(MoevcsError):
    errno = ERRORS.DIMENSION_MISMATCH


class InfeasibleDemandError(MoevcsError):
    """An EV energy demand cannot be met inside its parking window."""
    errno = ERRORS.INFEASIBLE_DEMAND

    def __init__(self, message, ev_id=None):
        super(InfeasibleDemandError, self).__init__(message,
                                                    details={'ev_id': ev_id})
        self.ev_id = ev_id


class OccupancyError(MoevcsError):
    """Occupancy profile cannot be produced by fixed-length stays."""
    errno = ERRORS.INFEASIBLE_OCCUPANCY

    def __init__(self, message, slots=()):
        super(OccupancyError, self).__init__(message,
                                             details={'slots': list(slots)})
        self.slots = list(slots)


class LayoutError(MoevcsError):
    """Schedule or genome does not belong to the given layout."""
    errno = ERRORS.LAYOUT_MISMATCH
