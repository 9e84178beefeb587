# tests/test_field_io.py

import numpy as np
import pytest

from exceptions import ConfigError, GridMismatchError
from models.grid import GridSpec, SampledField
from parsers.field_io import read_field, write_field


@pytest.fixture
def complex_field():
    grid = GridSpec(2, 4.0, 8)
    rng = np.random.default_rng(11)
    return SampledField(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))


class TestRoundTrip:

    @pytest.mark.parametrize('name', ['field.csv', 'field.npz'])
    def test_exact(self, tmp_path, complex_field, name):
        path = write_field(complex_field, str(tmp_path / name))
        back = read_field(str(path), expected=complex_field.spec)
        np.testing.assert_array_equal(back.values, complex_field.values)

    def test_csv_layout(self, tmp_path, complex_field):
        path = write_field(complex_field, str(tmp_path / 'field.csv'))
        lines = path.read_text().splitlines()
        assert lines[:3] == ['# dim = 2', '# half_width = 4.0', '# samples = 8']
        assert lines[3] == 'i_1,i_2,re,im'
        assert len(lines) == 4 + complex_field.spec.size

    def test_row_order_does_not_matter(self, tmp_path, complex_field):
        path = write_field(complex_field, str(tmp_path / 'field.csv'))
        lines = path.read_text().splitlines()
        path.write_text('\n'.join(lines[:4] + lines[4:][::-1]) + '\n')
        np.testing.assert_array_equal(read_field(str(path)).values, complex_field.values)


class TestValidation:

    def test_grid_mismatch(self, tmp_path, complex_field):
        path = write_field(complex_field, str(tmp_path / 'field.csv'))
        with pytest.raises(GridMismatchError):
            read_field(str(path), expected=GridSpec(2, 4.0, 16))

    def test_truncated(self, tmp_path, complex_field):
        path = write_field(complex_field, str(tmp_path / 'field.csv'))
        lines = path.read_text().splitlines()
        path.write_text('\n'.join(lines[:-5]) + '\n')
        with pytest.raises(GridMismatchError):
            read_field(str(path))

    def test_duplicate_node(self, tmp_path, complex_field):
        path = write_field(complex_field, str(tmp_path / 'field.csv'))
        lines = path.read_text().splitlines()
        lines[-1] = lines[-2]
        path.write_text('\n'.join(lines) + '\n')
        with pytest.raises(GridMismatchError):
            read_field(str(path))

    def test_missing_header(self, tmp_path):
        path = tmp_path / 'field.csv'
        path.write_text('i_1,re,im\n0,1,0\n')
        with pytest.raises(ConfigError):
            read_field(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_field(str(tmp_path / 'absent.csv'))

    def test_unknown_format(self, tmp_path, complex_field):
        with pytest.raises(ConfigError):
            write_field(complex_field, str(tmp_path / 'field.txt'), fmt='txt')
