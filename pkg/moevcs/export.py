"""Result files of a run.

CSV files use ``.`` decimals, LF line endings and always carry a header.
``summary.json`` is documented in ``docs/results.rst``.
"""
import dataclasses
import json
import logging
import math
import os

import numpy as np
import pandas as pd

import moevcs
from moevcs.encoding import decode, layout_of
from moevcs.metrics import (OBJECTIVE_NAMES, objective_correlation,
                            objective_ranges, ordering_chains, select_extreme)
from moevcs.model import validate_scenario
from moevcs.objectives import Evaluator


logger = logging.getLogger(__name__)

FRONT_COLUMNS = ['f1', 'f2', 'f3', 'cv']
LOAD_PROFILE_COLUMNS = ['slot', 'base', 'ev_charge', 'ev_discharge', 'total']
TARIFF_COLUMNS = ['slot', 'price']
COMPARISON_COLUMNS = ['label', 'f1', 'f2', 'f3', 'cv']
PROGRESS_COLUMNS = ['generation', 'n_feasible', 'best_f1', 'best_f2',
                    'best_f3', 'hypervolume']

# Front members picked for detailed output, by the objective they minimise.
EXTREMES = (('MOMinObj13', 0), ('MOMinObj2', 1))


def write_csv(frame, path):
    frame.to_csv(path, index=False, lineterminator='\n')
    logger.info('Wrote %s', path)
    return path


def front_frame(solutions):
    """One row per front member, sorted by ``(f1, f2, f3)``."""
    rows = [tuple(s.objectives) + (s.cv,) for s in solutions]
    frame = pd.DataFrame(rows, columns=FRONT_COLUMNS, dtype=float)
    return frame.sort_values(['f1', 'f2', 'f3'], kind='mergesort') \
        .reset_index(drop=True)


def load_profile_frame(schedule, scenario):
    """Per-slot base load, EV charge, EV discharge (non-positive) and total."""
    terms = Evaluator(scenario, schedule.layout).schedule_terms(schedule)
    return pd.DataFrame({
        'slot': scenario.grid.slots(),
        'base': scenario.base_load_array,
        'ev_charge': terms.xc,
        'ev_discharge': terms.xd,
        'total': terms.load,
    }, columns=LOAD_PROFILE_COLUMNS)


def tariff_frame(schedule, scenario):
    """Endogenous price of every slot under ``schedule``."""
    terms = Evaluator(scenario, schedule.layout).schedule_terms(schedule)
    return pd.DataFrame({'slot': scenario.grid.slots(),
                         'price': terms.prices}, columns=TARIFF_COLUMNS)


def comparison_frame(rows):
    """``rows`` holds ``(label, objectives, cv)`` tuples."""
    return pd.DataFrame([(label,) + tuple(map(float, objectives)) +
                         (float(cv),) for label, objectives, cv in rows],
                        columns=COMPARISON_COLUMNS)


def progress_frame(history):
    return pd.DataFrame([dataclasses.astuple(stats) for stats in history],
                        columns=PROGRESS_COLUMNS)


def write_schedule(out_dir, label, schedule, scenario):
    """Schedule, load profile and tariff files of one labelled schedule."""
    return [
        write_csv(schedule.to_frame(),
                  os.path.join(out_dir, 'schedule_%s.csv' % label)),
        write_csv(load_profile_frame(schedule, scenario),
                  os.path.join(out_dir, 'load_profile_%s.csv' % label)),
        write_csv(tariff_frame(schedule, scenario),
                  os.path.join(out_dir, 'tou_tariff_%s.csv' % label)),
    ]


def _clean(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _objectives_dict(objectives, cv, **extra):
    values = dict(zip(OBJECTIVE_NAMES, map(float, objectives)))
    values['cv'] = float(cv)
    values.update(extra)
    return values


def build_summary(scenario, archive, params, baselines=(), wall_time=None):
    """JSON-compatible summary of a run."""
    report = validate_scenario(scenario)
    front = archive.solutions
    summary = {
        'version': moevcs.__version__,
        'scenario': {
            'name': scenario.name,
            'n_users': scenario.n_users,
            'n_slots': scenario.grid.n_slots,
            'total_dim': report.total_dim,
            'n_constraints': report.n_constraints,
        },
        'params': dataclasses.asdict(params),
        'wall_time': wall_time,
        'evaluations': archive.evaluations,
        'front_size': len(front),
        'feasible': archive.feasible,
        'ranges': {},
        'extremes': {},
        'objective_correlation_f1_f3': objective_correlation(front, 0, 2),
        'reference_point': archive.reference_point,
        'hypervolume': [stats.hypervolume for stats in archive.history],
        'baselines': {r.label: _objectives_dict(r.objectives, r.cv,
                                                feasible=r.feasible)
                      for r in baselines},
    }
    if front:
        summary['ranges'] = dict(zip(OBJECTIVE_NAMES,
                                     objective_ranges(front)))
        for index, name in enumerate(OBJECTIVE_NAMES):
            best = select_extreme(front, index)
            summary['extremes']['MOMinObj%d' % (index + 1)] = \
                _objectives_dict(best.objectives, best.cv)

    comparison = {r.label: r.objectives for r in baselines}
    if front:
        for label, index in EXTREMES:
            comparison[label] = select_extreme(front, index).objectives
    summary['orderings'] = ordering_chains(comparison)
    return _clean(summary)


def write_summary(summary, path):
    with open(path, 'w', newline='\n') as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write('\n')
    logger.info('Wrote %s', path)
    return path


def write_results(out_dir, scenario, archive, params, baselines=(),
                  wall_time=None):
    """Write every result file of a run into ``out_dir``.

    Returns the list of paths written.
    """
    os.makedirs(out_dir, exist_ok=True)
    layout = layout_of(scenario)
    front = archive.solutions
    written = [write_csv(front_frame(front),
                         os.path.join(out_dir, 'pareto_front.csv'))]

    rows = []
    if front:
        for label, index in EXTREMES:
            member = select_extreme(front, index)
            rows.append((label, member.objectives, member.cv))
            written.extend(write_schedule(out_dir, label,
                                          decode(member.genome, layout),
                                          scenario))
    for result in baselines:
        rows.append((result.label, result.objectives, result.cv))
        written.extend(write_schedule(out_dir, result.label,
                                      result.schedule, scenario))

    written.append(write_csv(comparison_frame(rows),
                             os.path.join(out_dir, 'comparison.csv')))
    written.append(write_csv(progress_frame(archive.history),
                             os.path.join(out_dir, 'progress.csv')))
    written.append(write_summary(
        build_summary(scenario, archive, params, baselines, wall_time),
        os.path.join(out_dir, 'summary.json')))
    return written
