# tests/test_config_parser.py

import json
import math

import pytest

from config import CALIBRATION
from exceptions import ConfigError
from parsers.config_parser import RunConfigParser, load_calibration

VALID = """
# one-dimensional lifting run
grid.dim = 1
grid.half_width = 16
grid.samples = 256
space.alpha = 0.5
space.s = 1
space.p = 2
space.q = inf
covering.A = auto
symbol.name = bessel
symbol.b = 2
experiment.name = lifting
experiment.p_grid = 2; 4
output.format = json
"""


class TestParse:

    def test_valid_config(self):
        config, error = RunConfigParser.parse(VALID)
        assert error is None
        assert config.grid.shape == (256,)
        assert config.space.alpha == 0.5
        assert math.isinf(config.space.q)
        assert config.covering.radius_factor is None
        assert config.symbol.as_dict() == {'b': 2.0}
        assert config.experiment.name == 'lifting'
        assert [p.p for p in config.experiment.p_grid] == [(2.0,), (4.0,)]
        assert config.output.fmt == 'json'

    def test_defaults(self):
        config, error = RunConfigParser.parse('')
        assert error is None
        assert config.grid.dim == 1
        assert config.symbol.name == 'identity'
        assert config.experiment.name is None

    def test_scalar_exponent_is_broadcast(self):
        config, _ = RunConfigParser.parse('grid.dim = 2\nspace.p = 3')
        assert config.space.p.p == (3.0, 3.0)

    @pytest.mark.parametrize('text', [
        'grid.colour = 2',
        'plot.dim = 2',
        'dim = 2',
        'grid.dim = 1\ngrid.dim = 2',
        'space.q = 0',
        'space.alpha = 1.5',
        'space.p = 2, nan',
        'grid.samples = 255',
        'grid.dim = 4',
        'covering.A = -1',
        'experiment.name = spectrum',
        'output.format = xml',
        'space.s = abc',
        'output.seed = 3',
    ])
    def test_rejected(self, text):
        config, error = RunConfigParser.parse(text)
        assert config is None
        assert error

    def test_exponent_count_must_match(self):
        config, error = RunConfigParser.parse('grid.dim = 2\nspace.p = 1, 2, 3')
        assert config is None
        assert 'exponents' in error

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfigParser.load(str(tmp_path / 'absent.cfg'))


class TestSweep:

    def test_points_follow_key_order(self):
        text = 'experiment.sweep_b = 0, 1\nexperiment.sweep_alpha = 0.25, 0.5, 0.75'
        config, _ = RunConfigParser.parse(text)
        points = config.sweep_points()
        assert config.sweep_size() == 6
        assert [(pt.space.alpha, pt.b) for pt in points] == [
            (0.25, 0.0), (0.25, 1.0), (0.5, 0.0), (0.5, 1.0), (0.75, 0.0), (0.75, 1.0),
        ]

    def test_unswept_keys_keep_base_values(self):
        config, _ = RunConfigParser.parse('space.s = 3\nexperiment.sweep_q = 1, 2')
        points = config.sweep_points()
        assert {pt.space.s for pt in points} == {3.0}
        assert [pt.space.q for pt in points] == [1.0, 2.0]
        assert all(pt.rho is None for pt in points)

    def test_bad_sweep_values(self):
        config, error = RunConfigParser.parse('experiment.sweep_rho = 0, 0.5')
        assert config is None
        assert 'rho' in error


class TestCalibration:

    def test_committed_constants(self):
        assert load_calibration(None) == CALIBRATION

    def test_partial_file(self, tmp_path):
        path = tmp_path / 'calibration.json'
        path.write_text(json.dumps({'constants': {'maximal_c_cal': 20.0}}))
        constants = load_calibration(str(path))
        assert constants['maximal_c_cal'] == 20.0
        assert constants['lifting_s_cal'] == CALIBRATION['lifting_s_cal']

    @pytest.mark.parametrize('payload', [{'unknown': 1.0}, {'maximal_c_cal': -1.0}])
    def test_rejected(self, tmp_path, payload):
        path = tmp_path / 'calibration.json'
        path.write_text(json.dumps(payload))
        with pytest.raises(ConfigError):
            load_calibration(str(path))
