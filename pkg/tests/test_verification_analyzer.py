# tests/test_verification_analyzer.py

import math
from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from config import CALIBRATION, EXPLORATORY_ALPHA
from exceptions import GuardError
from models.experiment import FamilyMember, TestFamily
from models.grid import GridSpec, SampledField
from models.space import MixedExponents, SpaceParams
from analyzers.fourier_analyzer import FourierAnalyzer
from analyzers.symbol_catalog import SymbolCatalog
from analyzers.verification_analyzer import VerificationAnalyzer, ordered_map
from tests.generators import gaussian


@pytest.fixture(scope='module')
def family_1d(grid_1d):
    return TestFamily.standard(grid_1d)


@pytest.fixture(scope='module')
def family_2d(grid_2d):
    return TestFamily.standard(grid_2d)


class TestHarness:

    def test_ordered_map_keeps_order(self):
        assert ordered_map(lambda v: v * v, list(range(20)), jobs=4) == [v * v for v in range(20)]

    def test_member_boundary_guard(self, grid_1d):
        wide = FamilyMember('wide', 'dilated', (), lambda x: np.exp(-((x / 8.0) ** 2).sum(axis=-1)) + 0j)
        with pytest.raises(GuardError) as info:
            VerificationAnalyzer.sample_member(grid_1d, wide)
        assert info.value.member == 'wide'

    def test_family_is_large_enough(self, family_1d):
        assert len(family_1d) >= 12

    def test_calibration_doubles_measured_constants(self, monkeypatch, grid_2d):
        observed = {'lifting_experiment': 1.5, 'boundedness_experiment': 0.7,
                    'maximal_experiment': 4.0, 'hypoelliptic_experiment': 0.03}
        for name, statistic in observed.items():
            monkeypatch.setattr(VerificationAnalyzer, name,
                                lambda *args, statistic=statistic, **kwargs: SimpleNamespace(statistic=statistic))
        result = VerificationAnalyzer.calibrate(grid_2d=grid_2d)
        assert result['constants'] == {
            'lifting_s_cal': 3.0,
            'boundedness_c_cal': 1.4,
            'maximal_c_cal': 8.0,
            'hypoelliptic_factor': CALIBRATION['hypoelliptic_factor'],
        }
        assert result['observed']['hypoelliptic_factor'] == 0.03


class TestLifting:

    def test_zero_order_is_exact(self, family_1d, space_1d):
        report = VerificationAnalyzer.lifting_experiment(family_1d, 0.0, space_1d)
        assert report.passed
        np.testing.assert_allclose(report.rows['ratio'], 1.0, rtol=1e-10)

    def test_bounded_spread(self, family_1d, space_1d):
        report = VerificationAnalyzer.lifting_experiment(family_1d, 1.0, space_1d)
        assert report.passed
        assert 1.0 <= report.statistic <= CALIBRATION['lifting_s_cal']

    def test_scale_invariance(self, family_1d, space_1d):
        base = VerificationAnalyzer.lifting_experiment(family_1d, 1.0, space_1d)
        scaled = VerificationAnalyzer.lifting_experiment(family_1d, 1.0, space_1d, scale=5.0)
        np.testing.assert_allclose(scaled.rows['ratio'], base.rows['ratio'], rtol=1e-10)

    def test_sup_rows_are_exploratory(self, family_1d, space_1d):
        report = VerificationAnalyzer.lifting_experiment(family_1d, 1.0, space_1d.with_q(math.inf))
        assert not report.asserted
        assert not report.rows['asserted'].any()

    @pytest.mark.parametrize('alpha', [0.25, 0.5])
    @pytest.mark.parametrize('b', [-1.0, 1.0, 2.0])
    def test_mixed_exponents_in_two_dimensions(self, family_2d, alpha, b):
        space = SpaceParams(alpha, 2.0, MixedExponents((2.0, 4.0)), 2.0)
        report = VerificationAnalyzer.lifting_experiment(family_2d, b, space)
        assert report.passed
        assert report.meets_family_size
        assert 1.0 <= report.statistic <= CALIBRATION['lifting_s_cal']

    def test_zero_order_in_two_dimensions(self, family_2d):
        space = SpaceParams(0.5, 2.0, MixedExponents((2.0, 4.0)), 2.0)
        report = VerificationAnalyzer.lifting_experiment(family_2d, 0.0, space)
        assert report.statistic == pytest.approx(1.0, abs=1e-10)


class TestBoundedness:

    def test_identity(self, family_1d, space_1d):
        report = VerificationAnalyzer.boundedness_experiment(SymbolCatalog.identity(1), 0.0, family_1d, space_1d)
        assert report.passed
        np.testing.assert_allclose(report.rows['ratio'], 1.0, rtol=1e-10)

    def test_bessel_matches_lifting(self, family_1d, space_1d):
        bounded = VerificationAnalyzer.boundedness_experiment(SymbolCatalog.bessel(1.0, 1), 1.0, family_1d, space_1d)
        lifted = VerificationAnalyzer.lifting_experiment(family_1d, 1.0, space_1d)
        np.testing.assert_allclose(bounded.rows['ratio'], lifted.rows['ratio'], rtol=1e-12)
        assert (bounded.rows['symbol'] == 'bessel(b=1,dim=1)').all()

    def test_alpha_above_rho_is_exploratory(self, family_1d):
        space = SpaceParams(0.75, 0.0, MixedExponents((2.0,)), 2.0)
        sigma = SymbolCatalog.oscillatory(0.5, 1)
        report = VerificationAnalyzer.boundedness_experiment(sigma, 0.0, family_1d, space)
        assert not report.asserted
        assert report.passed

    def test_exploratory_alpha_rows_are_appended(self, family_1d, space_1d):
        sigma = SymbolCatalog.oscillatory(0.5, 1)
        report = VerificationAnalyzer.boundedness_experiment(sigma, 0.0, family_1d, space_1d.with_s(0.0),
                                                             exploratory_alpha=0.75)
        rows = report.rows
        assert report.asserted
        assert report.passed
        assert set(rows['alpha']) == {0.5, 0.75}
        assert rows.loc[rows['alpha'] == 0.5, 'asserted'].all()
        assert not rows.loc[rows['alpha'] == 0.75, 'asserted'].any()
        assert report.statistic == rows.loc[rows['alpha'] == 0.5, 'ratio'].max()
        assert report.member_count == len(family_1d)

    def test_exploratory_alpha_without_centers_is_skipped(self, family_1d, space_1d):
        # alpha = 0.9 puts the first center at 2^4.5, just past 0.9 * Nyquist of the 1D grid
        report = VerificationAnalyzer.boundedness_experiment(SymbolCatalog.identity(1), 0.0, family_1d, space_1d,
                                                             exploratory_alpha=EXPLORATORY_ALPHA)
        assert report.passed
        assert set(report.rows['alpha']) == {0.5}
        assert len(report.guards) == 1
        assert f"alpha={EXPLORATORY_ALPHA} skipped" in report.guards[0]

    def test_separable_oscillatory_in_two_dimensions(self, family_2d):
        sigma = SymbolCatalog.modulated(SymbolCatalog.oscillatory(0.5, 2), name='modulated_oscillatory')
        space = SpaceParams(0.5, 2.0, MixedExponents((2.0, 4.0)), 2.0)
        report = VerificationAnalyzer.boundedness_experiment(sigma, 0.0, family_2d, space,
                                                             exploratory_alpha=EXPLORATORY_ALPHA)
        assert report.asserted
        assert report.passed
        assert report.statistic <= CALIBRATION['boundedness_c_cal']
        # no lattice center fits inside the 2D grid at alpha = 0.9
        assert any('skipped' in guard for guard in report.guards)

    def test_identity_rows_in_two_dimensions(self, family_2d):
        space = SpaceParams(0.5, 2.0, MixedExponents((2.0, 4.0)), 2.0)
        report = VerificationAnalyzer.boundedness_experiment(SymbolCatalog.identity(2), 0.0, family_2d, space)
        np.testing.assert_allclose(report.rows['ratio'], 1.0, rtol=1e-10)


class TestMaximal:

    def test_ratios(self, grid_1d):
        family = TestFamily.standard(grid_1d, spectral_guard=False)
        report = VerificationAnalyzer.maximal_experiment(family, (0.5, 2.0), (MixedExponents((1.0,)),))
        rows = report.rows
        assert report.passed
        assert (rows.loc[rows['asserted'], 'ratio'] >= 1.0).all()
        # theta >= min p is reported but never asserted
        assert not rows.loc[rows['theta'] == 2.0, 'asserted'].any()
        modulated = rows[rows['member'].str.startswith('modulated')]
        assert modulated['peetre_ratio'].notna().all()
        assert rows.loc[~rows.index.isin(modulated.index), 'peetre_ratio'].isna().all()


class TestComposition:

    def test_multiplier_pair_is_exact(self, gaussian_1d):
        report = VerificationAnalyzer.composition_experiment(
            SymbolCatalog.bessel(2.0, 1), SymbolCatalog.bessel(-1.0, 1), gaussian_1d)
        assert report.passed
        assert (report.rows['ratio'] <= 1e-10).all()

    def test_residual_decreases(self, gaussian_1d):
        sigma1 = SymbolCatalog.bessel(2.0, 1)
        sigma2 = SymbolCatalog.modulated(SymbolCatalog.identity(1), offset=1.0)
        report = VerificationAnalyzer.composition_experiment(sigma1, sigma2, gaussian_1d, orders=(1, 2, 3))
        residuals = report.rows['output_norm'].to_numpy()
        assert report.passed
        assert residuals[1] < residuals[0]
        # the expansion of a second-order polynomial symbol terminates
        assert report.rows['ratio'].iloc[-1] <= 1e-8

    def test_flat_residuals_fail(self, gaussian_1d):
        # identity on the left: every correction term vanishes, so r_2 == r_1
        sigma2 = SymbolCatalog.modulated(SymbolCatalog.identity(1), offset=1.0)
        report = VerificationAnalyzer.composition_experiment(SymbolCatalog.identity(1), sigma2, gaussian_1d)
        residuals = report.rows['output_norm'].to_numpy()
        assert residuals[1] == residuals[0]
        assert not report.passed
        assert report.failures == ['N=1', 'N=2']

    def test_zero_input(self, grid_1d):
        report = VerificationAnalyzer.composition_experiment(
            SymbolCatalog.bessel(2.0, 1), SymbolCatalog.identity(1), SampledField.zeros(grid_1d))
        assert (report.rows['ratio'] == 0.0).all()


class TestHypoelliptic:

    def test_smoothing(self):
        report = VerificationAnalyzer.hypoelliptic_experiment()
        rows = report.rows.set_index('member')
        assert report.passed
        assert rows.loc['rough', 'ratio'] <= CALIBRATION['hypoelliptic_factor']
        assert rows.loc['eta_one', 'ratio'] <= 1e-6
        assert not rows.loc['low', 'asserted']
        assert {'regularity_lhs', 'regularity_rhs'} <= set(report.rows.columns)


class TestPathAgreement:

    def test_fast_matches_dense(self):
        grid = GridSpec(1, 16.0, 128)
        f = FourierAnalyzer.sample_function(grid, gaussian(omega=[1.5]))
        sigma = SymbolCatalog.modulated(SymbolCatalog.oscillatory(0.5, 1))
        assert VerificationAnalyzer.path_agreement(sigma, f) <= 1e-10


def test_report_table_puts_fixed_columns_first(family_1d, space_1d):
    report = VerificationAnalyzer.lifting_experiment(family_1d, 0.0, space_1d)
    table = report.table()
    assert list(table.columns[:3]) == ['experiment', 'member', 'family_params']
    assert isinstance(table, pd.DataFrame)
