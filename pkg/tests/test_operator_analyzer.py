# tests/test_operator_analyzer.py

import numpy as np
import pytest

from exceptions import NonFiniteError, ParameterError, ResourceGuardError
from models.grid import GridSpec
from models.symbol import SymbolSpec
from analyzers.fourier_analyzer import FourierAnalyzer
from analyzers.modulation_analyzer import ModulationAnalyzer
from analyzers.operator_analyzer import OperatorAnalyzer
from analyzers.symbol_catalog import SymbolCatalog
from tests.generators import gaussian


def max_error(a, b):
    return float(np.abs(a.values - b.values).max())


class TestMultipliers:

    def test_identity(self, gaussian_2d):
        out = OperatorAnalyzer.apply(SymbolCatalog.identity(2), gaussian_2d)
        assert max_error(out, gaussian_2d) <= 1e-10

    def test_bessel_group_law(self, grid_1d):
        f = FourierAnalyzer.sample_function(grid_1d, gaussian(0.5, omega=[2.0]))
        composed = OperatorAnalyzer.bessel_lift(OperatorAnalyzer.bessel_lift(f, 1.5), -0.5)
        direct = OperatorAnalyzer.bessel_lift(f, 1.0)
        assert max_error(composed, direct) <= 1e-10 * direct.sup_norm

    def test_lift_and_lower(self, gaussian_1d):
        back = OperatorAnalyzer.bessel_lift(OperatorAnalyzer.bessel_lift(gaussian_1d, 2.0), -2.0)
        assert max_error(back, gaussian_1d) <= 1e-10

    def test_non_finite_symbol(self, gaussian_1d):
        sigma = SymbolSpec('broken', 0.0, 1.0, 'multiplier',
                           lambda x, xi: np.where(xi[..., 0] > 3.0, np.inf, 1.0) + 0j)
        with pytest.raises(NonFiniteError):
            OperatorAnalyzer.apply(sigma, gaussian_1d)

    @pytest.mark.parametrize('index', [(-2,), (1,), (3,)])
    def test_commutes_with_band_projection(self, bapu_1d, index):
        f = FourierAnalyzer.sample_function(bapu_1d.grid, gaussian(0.5, omega=[4.0]))
        sigma = SymbolCatalog.bessel(1.5, 1)
        lifted_band = OperatorAnalyzer.apply(sigma, ModulationAnalyzer.band_project(f, index, bapu_1d))
        band_of_lift = ModulationAnalyzer.band_project(OperatorAnalyzer.apply(sigma, f), index, bapu_1d)
        assert max_error(lifted_band, band_of_lift) <= 1e-10 * max(band_of_lift.sup_norm, 1.0)

    def test_real_even_multiplier_is_self_adjoint(self, grid_1d):
        f = FourierAnalyzer.sample_function(grid_1d, gaussian(0.5, shift=[1.0], omega=[3.0]))
        g = FourierAnalyzer.sample_function(grid_1d, gaussian(2.0, shift=[-2.0], omega=[-5.0]))
        sigma = SymbolCatalog.bessel(-1.0, 1)
        left = np.vdot(g.values, OperatorAnalyzer.apply(sigma, f).values)
        right = np.vdot(OperatorAnalyzer.apply(sigma, g).values, f.values)
        assert abs(left - right) <= 1e-12 * abs(left)


class TestPlan:

    def test_auto_follows_kind(self, grid_1d):
        assert OperatorAnalyzer.plan(SymbolCatalog.bessel(1.0, 1), grid_1d).path == 'multiplier'
        modulated = SymbolCatalog.modulated(SymbolCatalog.bessel(1.0, 1))
        assert OperatorAnalyzer.plan(modulated, grid_1d).path == 'separable'

    def test_multiplier_path_needs_multiplier(self, grid_1d):
        modulated = SymbolCatalog.modulated(SymbolCatalog.bessel(1.0, 1))
        with pytest.raises(ParameterError):
            OperatorAnalyzer.plan(modulated, grid_1d, 'multiplier')

    def test_unknown_path(self, grid_1d):
        with pytest.raises(ParameterError):
            OperatorAnalyzer.plan(SymbolCatalog.identity(1), grid_1d, 'sparse')

    def test_general_cost(self, grid_2d):
        plan = OperatorAnalyzer.plan(SymbolCatalog.identity(2), grid_2d, 'general')
        assert plan.cost == grid_2d.size ** 2


class TestPathAgreement:

    def test_separable_matches_dense(self):
        grid = GridSpec(1, 16.0, 128)
        f = FourierAnalyzer.sample_function(grid, gaussian(omega=[2.0]))
        sigma = SymbolCatalog.modulated(SymbolCatalog.oscillatory(0.5, 1))
        fast = OperatorAnalyzer.apply(sigma, f, 'separable')
        dense = OperatorAnalyzer.apply(sigma, f, 'general')
        assert max_error(fast, dense) <= 1e-10 * max(fast.sup_norm, 1.0)

    def test_dense_limit(self, gaussian_2d):
        sigma = SymbolCatalog.modulated(SymbolCatalog.identity(2))
        with pytest.raises(ResourceGuardError):
            OperatorAnalyzer.apply(sigma, gaussian_2d, 'general')
