# tests/test_bapu_analyzer.py

import math

import numpy as np
import pytest

from config import UNIFORMITY_FACTOR
from exceptions import CoverageError, ParameterError
from models.covering import CoveringParams
from models.grid import GridSpec
from models.space import MixedExponents
from analyzers.bapu_analyzer import BapuAnalyzer
from analyzers.covering_analyzer import CoveringAnalyzer
from analyzers.modulation_analyzer import cached_bapu


@pytest.fixture(scope='module')
def wide_bapu():
    # 0.9 * Nyquist ~ 271 keeps k = -16..16 at alpha = 1/2
    return cached_bapu(CoveringParams(0.5), GridSpec(1, 16.0, 3072))


@pytest.fixture(scope='module')
def uniform_bapu(grid_1d):
    return cached_bapu(CoveringParams(0.0), grid_1d)


def by_window(frame, *columns):
    return frame.set_index(['k', *columns])['constant']


class TestPartition:

    @pytest.mark.parametrize('alpha', [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_windows_sum_to_one(self, grid_1d, alpha):
        bapu = cached_bapu(CoveringParams(alpha), grid_1d)
        assert BapuAnalyzer.partition_sum(bapu) <= 1e-12

    def test_windows_are_nonnegative(self, bapu_1d):
        assert bapu_1d.stack().min() >= 0.0

    def test_zeroed_window_breaks_the_sum(self, bapu_1d):
        broken = bapu_1d.with_window_zeroed((2,))
        assert BapuAnalyzer.partition_sum(broken) > 0.1
        assert BapuAnalyzer.partition_sum(bapu_1d) <= 1e-12

    def test_unknown_window(self, bapu_1d):
        with pytest.raises(ParameterError):
            bapu_1d.window((99,))

    def test_small_radius_is_rejected(self, grid_1d):
        covering = CoveringAnalyzer.build_covering(CoveringParams(0.5, radius_factor=0.1), grid_1d)
        with pytest.raises(CoverageError) as info:
            BapuAnalyzer.build_bapu(covering)
        assert info.value.node is not None


class TestDerivativeBounds:

    def test_uniform_constants(self, bapu_1d):
        report = BapuAnalyzer.derivative_bound_check(bapu_1d)
        assert report['uniform']
        assert set(report['spread']) == {'1', '2'}
        assert (report['rows']['constant'] >= 0).all()

    def test_dyadic_shells(self, grid_1d):
        bapu = cached_bapu(CoveringParams(1.0), grid_1d)
        report = BapuAnalyzer.derivative_bound_check(bapu, max_order=1)
        assert all(math.isfinite(v) for v in report['spread'].values())

    def test_uniform_over_sixteen_windows(self, wide_bapu):
        report = BapuAnalyzer.derivative_bound_check(wide_bapu)
        assert max(abs(int(k)) for k in report['rows']['k']) == 16
        assert report['uniform']
        assert all(v <= UNIFORMITY_FACTOR for v in report['spread'].values())

    def test_translates_share_constants_at_alpha_zero(self, uniform_bapu):
        constants = by_window(BapuAnalyzer.derivative_bound_check(uniform_bapu)['rows'], 'beta')
        for beta in ('1', '2'):
            assert constants[('10', beta)] == pytest.approx(constants[('5', beta)], rel=1e-6)


class TestRescaledWindows:

    def test_bounded_support_and_derivatives(self, bapu_1d):
        report = BapuAnalyzer.rescaled_window_check(bapu_1d)
        frame = report['rows']
        assert (frame['measured_extent'] <= frame['support_radius'] * (1.0 + 1e-12)).all()
        assert math.isfinite(report['support_radius'])
        assert report['uniform']

    def test_dyadic_rejected(self, grid_1d):
        bapu = cached_bapu(CoveringParams(1.0), grid_1d)
        with pytest.raises(ParameterError):
            BapuAnalyzer.rescaled_window_check(bapu)

    def test_uniform_over_sixteen_windows(self, wide_bapu):
        report = BapuAnalyzer.rescaled_window_check(wide_bapu)
        frame = report['rows']
        assert report['uniform']
        assert (frame['measured_extent'] <= frame['support_radius'] * (1.0 + 1e-12)).all()
        assert report['support_radius'] == frame['support_radius'].max()


class TestDilatedDecay:

    def test_constants_are_uniform(self, bapu_1d):
        report = BapuAnalyzer.dilated_window_decay_check(bapu_1d)
        assert set(report['rows']['m']) == {2, 4}
        assert all(v <= UNIFORMITY_FACTOR for v in report['spread'].values())

    def test_zero_value_matches_quadrature(self, bapu_1d):
        frame = BapuAnalyzer.dilated_window_decay_check(bapu_1d, m_values=(2,))['rows']
        np.testing.assert_allclose(frame['mu_hat_zero'], frame['quadrature'], rtol=1e-2)

    def test_near_and_far_windows_decay_alike(self, wide_bapu):
        report = BapuAnalyzer.dilated_window_decay_check(wide_bapu)
        assert report['uniform']
        constants = by_window(report['rows'], 'm')
        near, far = constants[('1', 4)], constants[('8', 4)]
        assert max(near / far, far / near) <= UNIFORMITY_FACTOR


class TestNormCondition:

    @pytest.mark.parametrize('p', [(1.0,), (0.5,)])
    def test_bounded_over_windows(self, bapu_1d, p):
        report = BapuAnalyzer.bapu_norm_condition(bapu_1d, MixedExponents(p))
        assert report['uniform']
        assert 0.0 < report['max'] < math.inf
        assert (report['rows']['tail'] <= 1e-3).all()
        assert report['shell_spread'] <= UNIFORMITY_FACTOR
        assert set(report['shells']) == {0, 1, 2}

    @pytest.mark.parametrize('p', [(1.0,), (0.5,)])
    def test_shell_medians_over_sixteen_windows(self, wide_bapu, p):
        report = BapuAnalyzer.bapu_norm_condition(wide_bapu, MixedExponents(p))
        assert set(report['shells']) == {0, 1, 2, 3, 4}
        assert report['shell_spread'] <= UNIFORMITY_FACTOR
        assert report['uniform']

    @pytest.mark.parametrize('p', [(1.0, 1.0), (0.5, 2.0)])
    def test_mixed_exponents_in_two_dimensions(self, grid_2d, p):
        bapu = cached_bapu(CoveringParams(0.5), grid_2d)
        report = BapuAnalyzer.bapu_norm_condition(bapu, MixedExponents(p))
        assert report['uniform']
        assert 0.0 < report['max'] < math.inf

    def test_translates_share_values_at_alpha_zero(self, uniform_bapu):
        report = BapuAnalyzer.bapu_norm_condition(uniform_bapu, MixedExponents((1.0,)))
        constants = report['rows'].set_index('k')['constant']
        assert constants['10'] == pytest.approx(constants['5'], rel=1e-4)

    def test_dimension_mismatch(self, bapu_1d):
        with pytest.raises(ParameterError):
            BapuAnalyzer.bapu_norm_condition(bapu_1d, MixedExponents((1.0, 1.0)))
