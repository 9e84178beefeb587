# app.py - Command-line entry point

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional

import click
import pandas as pd

from config import (
    COVERING_COLUMNS, EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RESOURCE_GUARD, EXPERIMENT_COLUMNS,
    BAND_PROFILE_COLUMNS, EXPLORATORY_ALPHA, MIN_FAMILY_SIZE, PARTITION_TOLERANCE, SWEEP_SIZE_LIMIT,
    UNIFORMITY_FACTOR,
)
from exceptions import (
    CheckFailure, ConfigError, CoverageError, GridMismatchError, GuardError, NonFiniteError, ParameterError,
    ResourceGuardError,
)
from models.experiment import ExperimentReport, TestFamily
from models.grid import GridSpec
from models.run_config import RunConfig
from models.space import SpaceParams
from models.symbol import SymbolSpec
from parsers.config_parser import RunConfigParser, load_calibration
from parsers.field_io import read_field, write_field
from analyzers.bapu_analyzer import BapuAnalyzer
from analyzers.covering_analyzer import CoveringAnalyzer
from analyzers.modulation_analyzer import ModulationAnalyzer, cached_bapu, lq_combine
from analyzers.operator_analyzer import PATHS, OperatorAnalyzer
from analyzers.symbol_catalog import SymbolCatalog
from analyzers.verification_analyzer import VerificationAnalyzer
from exporters.report_generator import ReportGenerator
from utils.logger import get_logger, set_console_level
from utils.validators import validate_sweep_size

logger = get_logger(__name__)

SWEEP_EXPERIMENTS = ('lifting', 'boundedness', 'maximal')


def exit_codes(command: Callable) -> Callable:
    """Map library errors onto the documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            command(*args, **kwargs)
        except ResourceGuardError as e:
            click.echo(f"resource guard: {e}", err=True)
            sys.exit(EXIT_RESOURCE_GUARD)
        except (ConfigError, GridMismatchError, ParameterError) as e:
            click.echo(f"config error: {e}", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
        except (CheckFailure, CoverageError, GuardError, NonFiniteError) as e:
            click.echo(f"check failed: {e}", err=True)
            sys.exit(EXIT_CHECK_FAILED)
        sys.exit(EXIT_OK)

    return wrapper


def run_options(command: Callable) -> Callable:
    """Options shared by the config-driven subcommands."""
    command = click.option('--jobs', type=int, default=None, help='Parallel family members')(command)
    command = click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=None,
                           help='Report format (overrides output.format)')(command)
    command = click.option('--output', type=click.Path(file_okay=False), default=None,
                           help='Output directory (overrides output.directory)')(command)
    command = click.option('--config', 'config_path', type=click.Path(dir_okay=False), required=True,
                           help='Run configuration file')(command)
    return command


class RunContext:
    """Config plus command-line overrides."""

    def __init__(self, config_path: str, output: Optional[str], fmt: Optional[str], jobs: Optional[int]):
        self.config: RunConfig = RunConfigParser.load(config_path)
        self.directory = output or self.config.output.directory
        self.fmt = fmt or self.config.output.fmt
        self.jobs = jobs if jobs is not None else self.config.output.jobs
        if self.jobs < 1:
            raise ConfigError("jobs must be positive", key='--jobs', value=self.jobs)

    def write(self, df: pd.DataFrame, name: str, columns: Optional[List[str]] = None) -> Path:
        return ReportGenerator.write_table(df, self.directory, name, self.fmt, columns)

    def symbol(self, name: Optional[str] = None) -> SymbolSpec:
        return SymbolCatalog.by_name(name or self.config.symbol.name, self.config.grid.dim,
                                     self.config.symbol.as_dict())

    def family(self, spectral_guard: bool = True, grid: Optional[GridSpec] = None) -> TestFamily:
        members = self.config.experiment.members
        if members < MIN_FAMILY_SIZE:
            logger.warning(f"family of {members} members is below the reporting minimum of {MIN_FAMILY_SIZE}")
        modulations = max(1, (members - 3) // 2)
        dilations = max(1, members - 3 - modulations)
        return TestFamily.standard(grid or self.config.grid, dilations, modulations, spectral_guard)


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Debug logging on stderr')
def cli(verbose: bool):
    """Numerical laboratory for mixed-norm alpha-modulation spaces and pseudodifferential operators."""
    if verbose:
        set_console_level(logging.DEBUG)


@cli.command('bapu-check')
@run_options
@exit_codes
def bapu_check(config_path, output, fmt, jobs):
    """Build the covering and partition of unity and run every admissibility check."""
    ctx = RunContext(config_path, output, fmt, jobs)
    config = ctx.config
    covering = CoveringAnalyzer.build_covering(config.covering_params, config.grid)
    ctx.write(pd.DataFrame([p.to_dict() for p in covering]), 'covering', COVERING_COLUMNS)

    admissibility = CoveringAnalyzer.admissibility_check(covering)
    if not admissibility.covers:
        raise CoverageError("covering leaves part of the covered ball uncovered",
                            node=admissibility.uncovered_node, value=admissibility.coverage_deficit)

    bapu = BapuAnalyzer.build_bapu(covering)
    deviation = BapuAnalyzer.partition_sum(bapu)
    checks = [
        {'check': 'partition_deviation', 'value': deviation, 'limit': PARTITION_TOLERANCE,
         'passed': deviation <= PARTITION_TOLERANCE},
        {'check': 'coverage_deficit', 'value': admissibility.coverage_deficit, 'limit': 0.0,
         'passed': admissibility.covers},
        {'check': 'overlap_max', 'value': admissibility.overlap_max, 'limit': None, 'passed': True},
        {'check': 'measure_comparability', 'value': admissibility.measure_comparability, 'limit': None,
         'passed': True},
    ]

    derivative = BapuAnalyzer.derivative_bound_check(bapu)
    ctx.write(derivative['rows'], 'derivative_bounds')
    checks.append(_uniformity_row('derivative_bounds', derivative))

    if covering.kind == 'alpha':
        rescaled = BapuAnalyzer.rescaled_window_check(bapu)
        ctx.write(rescaled['rows'], 'rescaled_windows')
        checks.append(_uniformity_row('rescaled_windows', rescaled))

        decay = BapuAnalyzer.dilated_window_decay_check(bapu)
        ctx.write(decay['rows'], 'window_decay')
        checks.append(_uniformity_row('window_decay', decay))

        norm_condition = BapuAnalyzer.bapu_norm_condition(bapu, config.space.p)
        ctx.write(norm_condition['rows'], 'norm_condition')
        checks.append({'check': 'norm_condition', 'value': norm_condition['spread'], 'limit': UNIFORMITY_FACTOR,
                       'passed': bool(norm_condition['uniform'])})
        checks.append({'check': 'norm_condition_shells', 'value': norm_condition['shell_spread'],
                       'limit': UNIFORMITY_FACTOR, 'passed': norm_condition['shell_spread'] <= UNIFORMITY_FACTOR})
    else:
        logger.info("dyadic covering: rescaled-window, decay and norm-condition checks apply to alpha < 1 only")

    table = pd.DataFrame(checks)
    ctx.write(table, 'checks')
    for row in checks:
        click.echo(f"{row['check']} = {row['value']} ({'ok' if row['passed'] else 'FAILED'})")
    failed = [row['check'] for row in checks if not row['passed']]
    if failed:
        raise CheckFailure("partition checks failed", check=','.join(failed))


def _uniformity_row(name: str, result: dict) -> dict:
    spread = result['spread']
    worst = max(spread.values()) if isinstance(spread, dict) and spread else spread
    return {'check': name, 'value': worst, 'limit': UNIFORMITY_FACTOR, 'passed': bool(result['uniform'])}


@cli.command('norm')
@run_options
@click.option('--input', 'input_path', type=click.Path(dir_okay=False), required=True, help='Field file')
@exit_codes
def norm(config_path, output, fmt, jobs, input_path):
    """Print the modulation quasi-norm of a field and write its band profile."""
    ctx = RunContext(config_path, output, fmt, jobs)
    config = ctx.config
    f = read_field(input_path, expected=config.grid)
    bapu = cached_bapu(config.covering_params, config.grid)
    profile = ModulationAnalyzer.band_profile(f, config.space, bapu)
    value = lq_combine(profile['weighted_term'].to_numpy(), config.space.q) if f.sup_norm > 0 else 0.0
    ctx.write(profile, 'band_profile', BAND_PROFILE_COLUMNS)
    click.echo(f"{value:.17g}")


@cli.command('apply')
@run_options
@click.option('--input', 'input_path', type=click.Path(dir_okay=False), required=True, help='Field file')
@click.option('--symbol', 'symbol_name', default=None, help='Catalog symbol (overrides symbol.name)')
@click.option('--path', 'path', type=click.Choice(PATHS), default='auto', help='Evaluation path')
@exit_codes
def apply(config_path, output, fmt, jobs, input_path, symbol_name, path):
    """Apply a catalog pseudodifferential operator to a field."""
    ctx = RunContext(config_path, output, fmt, jobs)
    f = read_field(input_path, expected=ctx.config.grid)
    sigma = ctx.symbol(symbol_name)
    plan = OperatorAnalyzer.plan(sigma, f.spec, path)
    g = OperatorAnalyzer.apply(sigma, f, plan.path)

    target = write_field(g, str(Path(ctx.directory) / f"applied.{Path(input_path).suffix.lstrip('.') or 'csv'}"))
    metadata = {
        'input': str(input_path),
        'output': str(target),
        'symbol': sigma.name,
        'symbol_params': dict(sigma.params),
        'order': sigma.order,
        'rho': sigma.rho,
        'path': plan.path,
        'cost': plan.cost,
        'grid': f.spec.header(),
    }
    sidecar = target.with_name(target.name + '.json')
    sidecar.write_text(json.dumps(metadata, indent=2), encoding='utf-8')
    click.echo(str(target))


def run_experiment(ctx: RunContext, name: str, space: SpaceParams, b: float, sigma: Optional[SymbolSpec] = None,
                   calibration: Optional[dict] = None, exploratory_alpha: Optional[float] = None) -> ExperimentReport:
    config = ctx.config
    if name == 'lifting':
        return VerificationAnalyzer.lifting_experiment(ctx.family(), b, space, calibration, ctx.jobs)
    if name == 'boundedness':
        return VerificationAnalyzer.boundedness_experiment(sigma or ctx.symbol(), b, ctx.family(), space,
                                                           calibration=calibration, jobs=ctx.jobs,
                                                           exploratory_alpha=exploratory_alpha)
    if name == 'maximal':
        p_grid = config.experiment.p_grid or (space.p,)
        return VerificationAnalyzer.maximal_experiment(ctx.family(spectral_guard=False), config.experiment.thetas,
                                                       p_grid, calibration, ctx.jobs)
    if name == 'composition':
        # second factor of the standard pair: (1 + sin x_1)/2 + 1
        sigma2 = SymbolCatalog.modulated(SymbolCatalog.identity(config.grid.dim), offset=1.0, name='raised_sine')
        member = next(iter(ctx.family()))
        f = VerificationAnalyzer.sample_member(config.grid, member)
        return VerificationAnalyzer.composition_experiment(sigma or ctx.symbol(), sigma2, f)
    if name == 'hypoelliptic':
        cutoff = config.symbol.as_dict().get('c')
        kwargs = {'cutoff': cutoff} if cutoff is not None else {}
        return VerificationAnalyzer.hypoelliptic_experiment(config.grid, space, calibration=calibration,
                                                            jobs=ctx.jobs, **kwargs)
    raise ConfigError(f"unknown experiment '{name}'", key='experiment.name', value=name)


@cli.command('verify')
@run_options
@click.option('--calibration', 'calibration_path', type=click.Path(dir_okay=False), default=None,
              help='Calibration file written by `calibrate`')
@exit_codes
def verify(config_path, output, fmt, jobs, calibration_path):
    """Run the configured experiment and assert its criteria."""
    ctx = RunContext(config_path, output, fmt, jobs)
    name = ctx.config.experiment.name
    if name is None:
        raise ConfigError("experiment.name is required for verify", key='experiment.name')
    calibration = load_calibration(calibration_path)
    report = run_experiment(ctx, name, ctx.config.space, ctx.config.experiment.b, calibration=calibration,
                            exploratory_alpha=EXPLORATORY_ALPHA)
    ReportGenerator.write_outputs(report, ctx.directory, ctx.fmt, EXPERIMENT_COLUMNS)
    click.echo(ReportGenerator.generate_summary_report(report), nl=False)
    if not report.passed:
        raise CheckFailure(f"{name} criteria failed", check=name, row=', '.join(report.failures))


@cli.command('sweep')
@run_options
@click.option('--calibration', 'calibration_path', type=click.Path(dir_okay=False), default=None,
              help='Calibration file written by `calibrate`')
@exit_codes
def sweep(config_path, output, fmt, jobs, calibration_path):
    """Run an experiment over the cartesian product of the sweep lists."""
    ctx = RunContext(config_path, output, fmt, jobs)
    config = ctx.config
    name = config.experiment.name or 'lifting'
    if name not in SWEEP_EXPERIMENTS:
        raise ConfigError(f"sweep supports {SWEEP_EXPERIMENTS}", key='experiment.name', value=name)
    is_valid, error = validate_sweep_size(config.sweep_size())
    if not is_valid:
        raise ResourceGuardError(error, cost=config.sweep_size(), limit=SWEEP_SIZE_LIMIT)

    calibration = load_calibration(calibration_path)
    frames = []
    aggregates = []
    failures = []
    for number, point in enumerate(config.sweep_points()):
        sigma = None
        if name == 'boundedness' and point.rho is not None:
            sigma = SymbolCatalog.modulated(SymbolCatalog.oscillatory(point.rho, config.grid.dim),
                                            name='modulated_oscillatory')
        report = run_experiment(ctx, name, point.space, point.b, sigma, calibration)
        labels = point.label()
        frames.append(report.table().assign(point=number, **{f"sweep_{k}": v for k, v in labels.items()}))
        aggregates.append({'point': number, **labels, **report.aggregates, 'passed': report.passed})
        if not report.passed:
            failures.append(f"point {number}: {', '.join(report.failures)}")

    ctx.write(pd.concat(frames, ignore_index=True), 'sweep', ['point'] + EXPERIMENT_COLUMNS)
    ctx.write(pd.DataFrame(aggregates), 'sweep_aggregates')
    click.echo(f"{len(aggregates)} sweep points")
    if failures:
        raise CheckFailure("sweep criteria failed", check=name, row='; '.join(failures))


@cli.command('calibrate')
@click.option('--output', type=click.Path(file_okay=False), default='output', help='Output directory')
@click.option('--jobs', type=int, default=1, help='Parallel family members')
@exit_codes
def calibrate(output, jobs):
    """Recompute the calibration constants (2x observed) and write calibration.json."""
    result = VerificationAnalyzer.calibrate(jobs=jobs)
    path = Path(output)
    path.mkdir(parents=True, exist_ok=True)
    target = path / 'calibration.json'
    target.write_text(json.dumps(result, indent=2, sort_keys=True), encoding='utf-8')
    click.echo(str(target))


if __name__ == '__main__':
    cli()
