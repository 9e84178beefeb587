# tests/test_fourier_analyzer.py

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from config import PLANCHEREL_TOLERANCE, ROUND_TRIP_TOLERANCE
from exceptions import GridMismatchError, NonFiniteError
from models.grid import GridSpec, SampledField, Spectrum
from analyzers.fourier_analyzer import FourierAnalyzer
from tests.generators import gaussian


class TestRoundTrip:

    @pytest.mark.parametrize('dim', [1, 2])
    def test_inverse_of_forward_is_identity(self, dim):
        grid = GridSpec.default(dim)
        f = FourierAnalyzer.sample_function(grid, gaussian(2.0, omega=[1.5] * dim))
        back = FourierAnalyzer.inverse_transform(FourierAnalyzer.forward_transform(f))
        assert np.abs(back.values - f.values).max() <= ROUND_TRIP_TOLERANCE * f.sup_norm

    @pytest.mark.parametrize('dim', [1, 2])
    def test_plancherel(self, dim):
        grid = GridSpec.default(dim)
        f = FourierAnalyzer.sample_function(grid, gaussian(0.5, shift=[0.3] * dim))
        spatial, spectral = FourierAnalyzer.plancherel_sums(f)
        assert abs(spatial - spectral) <= PLANCHEREL_TOLERANCE * spatial

    def test_zero_field(self, grid_1d):
        F = FourierAnalyzer.forward_transform(SampledField.zeros(grid_1d))
        assert not F.values.any()


class TestClosedForms:

    @pytest.mark.parametrize('dim', [1, 2])
    def test_gaussian_transform(self, dim):
        grid = GridSpec.default(dim)
        f = FourierAnalyzer.sample_function(grid, gaussian())
        F = FourierAnalyzer.forward_transform(f)
        xi2 = (grid.frequency_points() ** 2).sum(axis=-1)
        expected = 2.0 ** (-dim / 2.0) * np.exp(-xi2 / 4.0)
        np.testing.assert_allclose(F.values, expected, atol=1e-12)

    def test_modulation_shifts_the_peak(self, grid_1d):
        m = 20
        omega = m * grid_1d.freq_step
        f = FourierAnalyzer.sample_function(grid_1d, gaussian(omega=[omega]))
        F = FourierAnalyzer.forward_transform(f)
        assert int(np.argmax(np.abs(F.values))) == F.node_index((m,))[0]

    def test_node_index_outside_grid(self, grid_1d):
        F = Spectrum.zeros(grid_1d)
        with pytest.raises(GridMismatchError):
            F.node_index((grid_1d.samples,))


class TestLinearity:

    @settings(max_examples=25, deadline=None)
    @given(a=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
           b=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
    def test_forward_is_linear(self, a, b):
        grid = GridSpec(1, 8.0, 64)
        f = FourierAnalyzer.sample_function(grid, gaussian())
        g = FourierAnalyzer.sample_function(grid, gaussian(0.5, omega=[2.0]))
        combined = FourierAnalyzer.forward_transform(f.scaled(a) + g.scaled(b))
        separate = a * FourierAnalyzer.forward_transform(f).values + b * FourierAnalyzer.forward_transform(g).values
        np.testing.assert_allclose(combined.values, separate, atol=1e-12 * (1 + abs(a) + abs(b)))


class TestGuards:

    def test_non_finite_generator(self, grid_1d):
        with pytest.raises(NonFiniteError):
            FourierAnalyzer.sample_function(grid_1d, lambda x: np.full(x.shape[:-1], np.nan))

    def test_band_multiply_shape_mismatch(self, grid_1d):
        F = Spectrum.zeros(grid_1d)
        with pytest.raises(GridMismatchError):
            FourierAnalyzer.band_multiply(F, np.ones(grid_1d.samples + 2))

    def test_fields_on_different_grids(self, grid_1d):
        other = GridSpec(1, 8.0, grid_1d.samples)
        with pytest.raises(GridMismatchError):
            SampledField.zeros(grid_1d) + SampledField.zeros(other)

    def test_tail_mass_of_zero_spectrum(self, grid_1d):
        assert FourierAnalyzer.tail_mass(Spectrum.zeros(grid_1d), 1.0) == 0.0

    def test_boundary_level(self, grid_1d):
        assert FourierAnalyzer.boundary_level(SampledField.zeros(grid_1d)) == 0.0
        f = FourierAnalyzer.sample_function(grid_1d, gaussian())
        assert FourierAnalyzer.boundary_level(f) < 1e-12
        flat = FourierAnalyzer.sample_function(grid_1d, lambda x: np.ones(x.shape[:-1]))
        assert FourierAnalyzer.boundary_level(flat) == pytest.approx(1.0)
