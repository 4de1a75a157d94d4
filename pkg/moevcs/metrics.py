"""Pareto front analytics."""
import logging

import numpy as np
from pymoo.indicators.hv import HV
from scipy.stats import spearmanr

from moevcs.objectives import EvaluatedSolution


logger = logging.getLogger(__name__)

OBJECTIVE_NAMES = ('f1', 'f2', 'f3')


def objective_matrix(front):
    """Objective vectors of a front as a ``(n, m)`` float array.

    Accepts evaluated solutions, objective vectors or a plain array.
    """
    rows = [s.objectives if isinstance(s, EvaluatedSolution) else s
            for s in front]
    if not rows:
        return np.zeros((0, len(OBJECTIVE_NAMES)))
    return np.atleast_2d(np.asarray(rows, dtype=float))


def reference_point(objectives):
    """Nadir of ``objectives`` pushed out by 10% of its magnitude.

    Equals ``1.1 * nadir`` for positive components and stays worse than
    the nadir for negative ones. Zero components move by one unit.
    """
    nadir = np.max(np.atleast_2d(objectives), axis=0)
    margin = 0.1 * np.abs(nadir)
    return nadir + np.where(margin > 0, margin, 1.0)


def hypervolume(front, ref):
    """Volume dominated by ``front`` and bounded by ``ref`` (minimisation).

    Members that do not strictly dominate ``ref`` are excluded with a
    warning.
    """
    points = objective_matrix(front)
    if not len(points):
        return 0.0

    ref = np.asarray(ref, dtype=float)
    inside = np.all(points < ref, axis=1)
    if not inside.all():
        logger.warning('%d point(s) do not dominate the reference point %s '
                       'and are excluded', int((~inside).sum()), ref.tolist())
        points = points[inside]
        if not len(points):
            return 0.0
    return float(HV(ref_point=ref)(points))


def select_extreme(front, objective_index, direction='min'):
    """Member with the smallest (or largest) value of one objective.

    Ties go to the smaller f3, then to the smaller f1.
    """
    if not front:
        raise ValueError('Cannot select from an empty front')
    if direction not in ('min', 'max'):
        raise ValueError('direction must be "min" or "max"')

    points = objective_matrix(front)
    primary = points[:, objective_index]
    if direction == 'max':
        primary = -primary
    order = np.lexsort((points[:, 0], points[:, 2], primary))
    return front[order[0]]


def objective_ranges(front):
    """``(min, max)`` of every objective over the front."""
    points = objective_matrix(front)
    if not len(points):
        raise ValueError('Cannot compute ranges of an empty front')
    return [(float(lo), float(hi))
            for lo, hi in zip(points.min(axis=0), points.max(axis=0))]


def objective_correlation(front, first, second):
    """Spearman rank correlation of two objectives over a front.

    NaN when there are fewer than three members or one objective is
    constant.
    """
    points = objective_matrix(front)
    if len(points) < 3:
        return float('nan')
    a, b = points[:, first], points[:, second]
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return float('nan')
    return float(spearmanr(a, b)[0])


# (name, objective index, labels in non-decreasing order of that objective).
# Station profit is -f2.
ORDERINGS = (
    ('profit_B2_over_B1', 1, ('B2', 'B1')),
    ('profit_B4_over_MOMinObj2', 1, ('B4', 'MOMinObj2')),
    ('profit_MOMinObj2_over_B5', 1, ('MOMinObj2', 'B5')),
    ('user_cost', 0, ('B5', 'MOMinObj13', 'MOMinObj2', 'B1', 'B2')),
    ('network_impact', 2, ('B3', 'MOMinObj13', 'B1', 'B2')),
)


def ordering_chains(comparison, tolerance=1e-9):
    """Check the expected orderings of a comparison table.

    ``comparison`` maps labels to objective vectors. Each ordering is
    ``True`` or ``False``, or ``None`` when one of its labels is missing.
    """
    results = {}
    for name, index, labels in ORDERINGS:
        if not all(label in comparison for label in labels):
            results[name] = None
            continue
        values = [float(comparison[label][index]) for label in labels]
        results[name] = all(a <= b + tolerance * max(1.0, abs(b))
                            for a, b in zip(values, values[1:]))
    return results
