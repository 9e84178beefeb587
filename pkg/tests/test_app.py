# tests/test_app.py

import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from app import cli
from config import EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RESOURCE_GUARD
from models.grid import GridSpec, SampledField
from analyzers.fourier_analyzer import FourierAnalyzer
from parsers.field_io import read_field, write_field
from tests.generators import gaussian


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_config(tmp_path):
    def write(text: str, name: str = 'run.cfg') -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


@pytest.fixture
def field_1d(tmp_path):
    grid = GridSpec.default(1)
    f = FourierAnalyzer.sample_function(grid, gaussian(0.5, omega=[2.0]))
    return f, str(write_field(f, str(tmp_path / 'input.csv')))


class TestBapuCheck:

    def test_default_partition(self, runner, write_config, tmp_path):
        out = tmp_path / 'out'
        result = runner.invoke(cli, ['bapu-check', '--config', write_config('space.alpha = 0.5'), '--output', str(out)])
        assert result.exit_code == EXIT_OK, result.output
        checks = pd.read_csv(out / 'checks.csv')
        assert checks['passed'].all()
        assert 'norm_condition_shells' in set(checks['check'])
        covering = pd.read_csv(out / 'covering.csv')
        assert list(covering.columns[:2]) == ['k', 'xi']
        assert len(covering) == 8

    def test_small_radius_reports_node(self, runner, write_config, tmp_path):
        config = write_config('space.alpha = 0.5\ncovering.A = 0.1')
        result = runner.invoke(cli, ['bapu-check', '--config', config, '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_CHECK_FAILED
        assert 'node' in result.output

    def test_invalid_exponent(self, runner, write_config, tmp_path):
        result = runner.invoke(cli, ['bapu-check', '--config', write_config('space.q = 0'),
                                     '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_CONFIG_ERROR


class TestNorm:

    def test_zero_field(self, runner, write_config, tmp_path):
        path = write_field(SampledField.zeros(GridSpec.default(1)), str(tmp_path / 'zero.csv'))
        result = runner.invoke(cli, ['norm', '--config', write_config(''), '--input', str(path),
                                     '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_OK, result.output
        assert result.output.strip().splitlines()[-1] == '0'

    def test_band_profile_written(self, runner, write_config, tmp_path, field_1d):
        _, path = field_1d
        out = tmp_path / 'out'
        result = runner.invoke(cli, ['norm', '--config', write_config('space.s = 1'), '--input', path,
                                     '--output', str(out)])
        assert result.exit_code == EXIT_OK, result.output
        value = float(result.output.strip().splitlines()[-1])
        profile = pd.read_csv(out / 'band_profile.csv')
        assert value == pytest.approx(np.sqrt((profile['weighted_term'] ** 2).sum()), rel=1e-12)

    def test_grid_mismatch(self, runner, write_config, tmp_path, field_1d):
        _, path = field_1d
        result = runner.invoke(cli, ['norm', '--config', write_config('grid.samples = 128'), '--input', path,
                                     '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_CONFIG_ERROR


class TestApply:

    def test_identity(self, runner, write_config, tmp_path, field_1d):
        f, path = field_1d
        out = tmp_path / 'out'
        result = runner.invoke(cli, ['apply', '--config', write_config(''), '--input', path, '--output', str(out)])
        assert result.exit_code == EXIT_OK, result.output
        g = read_field(str(out / 'applied.csv'))
        assert np.abs(g.values - f.values).max() <= 1e-10
        metadata = json.loads((out / 'applied.csv.json').read_text())
        assert metadata['path'] == 'multiplier'

    def test_lift_then_lower(self, runner, write_config, tmp_path, field_1d):
        f, path = field_1d
        up, down = tmp_path / 'up', tmp_path / 'down'
        result = runner.invoke(cli, ['apply', '--config', write_config('symbol.name = bessel\nsymbol.b = 2', 'up.cfg'),
                                     '--input', path, '--output', str(up)])
        assert result.exit_code == EXIT_OK, result.output
        result = runner.invoke(cli, ['apply', '--config', write_config('symbol.name = bessel\nsymbol.b = -2', 'down.cfg'),
                                     '--input', str(up / 'applied.csv'), '--output', str(down)])
        assert result.exit_code == EXIT_OK, result.output
        g = read_field(str(down / 'applied.csv'))
        assert np.abs(g.values - f.values).max() <= 1e-10

    def test_dense_path_guard(self, runner, write_config, tmp_path):
        path = write_field(SampledField.zeros(GridSpec.default(2)), str(tmp_path / 'zero2.csv'))
        result = runner.invoke(cli, ['apply', '--config', write_config('grid.dim = 2'), '--input', str(path),
                                     '--path', 'general', '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_RESOURCE_GUARD


class TestVerify:

    def test_lifting_zero_order(self, runner, write_config, tmp_path):
        out = tmp_path / 'out'
        config = write_config('space.s = 1\nexperiment.name = lifting\nexperiment.b = 0')
        result = runner.invoke(cli, ['verify', '--config', config, '--output', str(out)])
        assert result.exit_code == EXIT_OK, result.output
        assert 'passed = true' in result.output
        rows = pd.read_csv(out / 'lifting.csv')
        assert list(rows.columns[:7]) == ['experiment', 'member', 'family_params', 'input_norm', 'output_norm',
                                          'ratio', 'asserted']
        assert len(rows) == 12
        assert (out / 'lifting_summary.txt').exists()

    def test_boundedness_identity(self, runner, write_config, tmp_path):
        config = write_config('experiment.name = boundedness\nsymbol.name = identity')
        result = runner.invoke(cli, ['verify', '--config', config, '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_OK, result.output

    def test_json_format(self, runner, write_config, tmp_path):
        out = tmp_path / 'out'
        config = write_config('experiment.name = lifting')
        result = runner.invoke(cli, ['verify', '--config', config, '--output', str(out), '--format', 'json'])
        assert result.exit_code == EXIT_OK, result.output
        report = json.loads((out / 'lifting.json').read_text())
        assert report['summary']['passed'] is True
        assert len(report['rows']) == 12

    def test_needs_experiment_name(self, runner, write_config, tmp_path):
        result = runner.invoke(cli, ['verify', '--config', write_config(''), '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_CONFIG_ERROR


class TestSweep:

    SWEEP = 'space.s = 1\nexperiment.name = lifting\nexperiment.sweep_alpha = 0.25, 0.5, 0.75\nexperiment.sweep_b = 0, 1'

    def test_aggregates_are_reproducible(self, runner, write_config, tmp_path):
        config = write_config(self.SWEEP)
        first, second = tmp_path / 'first', tmp_path / 'second'
        for out in (first, second):
            result = runner.invoke(cli, ['sweep', '--config', config, '--output', str(out)])
            assert result.exit_code == EXIT_OK, result.output
        aggregates = pd.read_csv(first / 'sweep_aggregates.csv')
        assert len(aggregates) == 6
        assert (first / 'sweep_aggregates.csv').read_bytes() == (second / 'sweep_aggregates.csv').read_bytes()
        assert (first / 'sweep.csv').read_bytes() == (second / 'sweep.csv').read_bytes()

    def test_oversized_sweep(self, runner, write_config, tmp_path):
        values = ', '.join(str(v) for v in range(101))
        config = write_config(f"experiment.name = lifting\nexperiment.sweep_s = {values}\nexperiment.sweep_b = {values}")
        result = runner.invoke(cli, ['sweep', '--config', config, '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_RESOURCE_GUARD

    def test_unsupported_experiment(self, runner, write_config, tmp_path):
        config = write_config('experiment.name = hypoelliptic')
        result = runner.invoke(cli, ['sweep', '--config', config, '--output', str(tmp_path / 'out')])
        assert result.exit_code == EXIT_CONFIG_ERROR
