"""Command line front-end.

::

    moevcs run (--set K | --scenario FILE) --out DIR [options]
    moevcs scenario export --set K [--seed S] --out FILE
    moevcs scenario validate FILE

Exit codes: 0 on success, 1 on usage or configuration errors, 2 on runtime
errors (invalid or infeasible scenario...).
"""
import argparse
import dataclasses
import logging
import sys
import time

from moevcs import load_settings, setup_logging
from moevcs.baselines import BASELINE_LABELS, run_baselines
from moevcs.errors import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, MoevcsError
from moevcs.export import write_results
from moevcs.model import validate_scenario
from moevcs.moea import MoeaParams, evolve
from moevcs.scenarios import (PROFILES, build_problem_set, load_base_load_csv,
                              load_scenario, save_scenario)


logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """Parser exiting with the usage error code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))


def baseline_list(value):
    labels = [v.strip().upper() for v in value.split(',') if v.strip()]
    unknown = [label for label in labels if label not in BASELINE_LABELS]
    if unknown:
        raise argparse.ArgumentTypeError(
            'unknown baseline(s) %s, expected some of %s'
            % (', '.join(unknown), ','.join(BASELINE_LABELS).lower()))
    return labels


def build_parser():
    parser = ArgumentParser(prog='moevcs', description=(
        'Multi-objective scheduling of EV charging and discharging.'))
    parser.add_argument('--ini', help='settings and logging ini file')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='log every generation')
    commands = parser.add_subparsers(dest='command',
                                     parser_class=ArgumentParser)
    commands.required = True

    run = commands.add_parser('run', help='optimise a scenario')
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument('--set', type=int, choices=sorted(PROFILES),
                        dest='set_id', help='built-in problem set')
    source.add_argument('--scenario', help='scenario.json file')
    run.add_argument('--pop', type=int, help='population size')
    run.add_argument('--gens', type=int, help='number of generations')
    run.add_argument('--seed', type=int, help='random seed (default 0)')
    run.add_argument('--threads', type=int,
                     help='evaluation threads, 0 for one per core')
    run.add_argument('--out', required=True, help='output directory')
    run.add_argument('--baselines', type=baseline_list, default=[],
                     help='comma separated list among b1,b2,b3,b4,b5')
    run.add_argument('--base-load', help='slot,kw CSV replacing the base load')
    run.set_defaults(handler=cmd_run)

    scenario = commands.add_parser('scenario', help='scenario files')
    actions = scenario.add_subparsers(dest='action',
                                      parser_class=ArgumentParser)
    actions.required = True

    export = actions.add_parser('export', help='write a built-in scenario')
    export.add_argument('--set', type=int, choices=sorted(PROFILES),
                        dest='set_id', required=True)
    export.add_argument('--seed', type=int)
    export.add_argument('--out', required=True, help='scenario.json path')
    export.add_argument('--base-load', help='slot,kw CSV')
    export.set_defaults(handler=cmd_scenario_export)

    validate = actions.add_parser('validate', help='check a scenario file')
    validate.add_argument('path')
    validate.set_defaults(handler=cmd_scenario_validate)
    return parser


def _scenario_from_args(args, settings):
    base_load = None
    if args.base_load:
        base_load = load_base_load_csv(args.base_load)

    if getattr(args, 'scenario', None):
        scenario = load_scenario(args.scenario)
        if base_load is not None:
            scenario = dataclasses.replace(scenario, base_load=base_load)
        return scenario

    return build_problem_set(args.set_id, seed=settings['seed'],
                             base_load=base_load,
                             soc_arrival_low=settings['soc_arrival_low'],
                             soc_arrival_high=settings['soc_arrival_high'])


def cmd_run(args):
    settings = load_settings(args.ini, population_size=args.pop,
                             max_generations=args.gens, seed=args.seed,
                             threads=args.threads)
    params = MoeaParams.from_settings(settings).validate()
    scenario = _scenario_from_args(args, settings)

    logger.info('Optimising %s: %d EVs, population %d, %d generations, '
                'seed %d', scenario.name, scenario.n_users,
                params.population_size, params.max_generations, params.seed)
    started = time.perf_counter()
    archive = evolve(scenario, params)
    baselines = run_baselines(scenario, args.baselines, params)
    wall_time = time.perf_counter() - started

    write_results(args.out, scenario, archive, params, baselines, wall_time)
    if not archive.feasible:
        logger.warning('The final front holds infeasible solutions')
    logger.info('Done in %.1fs, %d solution(s) in the front', wall_time,
                len(archive.solutions))
    return EXIT_OK


def cmd_scenario_export(args):
    settings = load_settings(args.ini, seed=args.seed)
    scenario = _scenario_from_args(args, settings)
    save_scenario(scenario, args.out)
    return EXIT_OK


def cmd_scenario_validate(args):
    report = validate_scenario(load_scenario(args.path))
    print(report.format())
    return EXIT_OK if report.valid else EXIT_RUNTIME


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    setup_logging(args.ini, logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.handler(args)
    except MoevcsError as e:
        logger.error('%s', e)
        return e.exit_code


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())
