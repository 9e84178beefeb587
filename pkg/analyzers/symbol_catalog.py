# analyzers/symbol_catalog.py - Named symbols with declared order and type

import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from config import HEAT_CUTOFF
from exceptions import ConfigError, ParameterError
from models.symbol import Amplitude, MultiIndex, SymbolSpec
from analyzers.bump_functions import japanese_bracket, smooth_step
from utils.logger import get_logger

logger = get_logger(__name__)


def _bessel_derivative(b: float) -> Callable:
    """Exact xi-derivatives of <xi>^b up to total order 2."""

    def derivative(x, xi, alpha: MultiIndex, beta: MultiIndex) -> Optional[np.ndarray]:
        if any(beta):
            return np.zeros(np.broadcast_shapes(x.shape[:-1], xi.shape[:-1]), dtype=complex)
        order = sum(alpha)
        bracket = japanese_bracket(xi)
        if order == 0:
            return bracket ** b + 0j
        if order == 1:
            j = alpha.index(1)
            return b * xi[..., j] * bracket ** (b - 2) + 0j
        if order == 2:
            axes = [j for j, a in enumerate(alpha) for _ in range(a)]
            j, l = axes
            value = b * (b - 2) * xi[..., j] * xi[..., l] * bracket ** (b - 4)
            if j == l:
                value = value + b * bracket ** (b - 2)
            return value + 0j
        return None

    return derivative


def _heat_derivative(x, xi, alpha: MultiIndex, beta: MultiIndex) -> Optional[np.ndarray]:
    shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-1])
    zero = np.zeros(shape, dtype=complex)
    if any(beta):
        return zero
    order = sum(alpha)
    if order == 0:
        return np.broadcast_to(1j * xi[..., 0] + (xi[..., 1:] ** 2).sum(axis=-1), shape) + 0j
    if order == 1:
        j = alpha.index(1)
        if j == 0:
            return zero + 1j
        return np.broadcast_to(2.0 * xi[..., j], shape) + 0j
    if order == 2 and alpha[0] == 0 and max(alpha) == 2:
        return zero + 2.0
    return zero


class SymbolCatalog:
    """Factory for the symbols used by the operator experiments."""

    @staticmethod
    def identity(dim: int) -> SymbolSpec:
        def evaluate(x, xi):
            return np.ones(np.broadcast_shapes(x.shape[:-1], xi.shape[:-1]), dtype=complex)

        def derivative(x, xi, alpha, beta):
            shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-1])
            return np.ones(shape, dtype=complex) if not any(alpha) and not any(beta) else np.zeros(shape, dtype=complex)

        return SymbolSpec('identity', 0.0, 1.0, 'multiplier', evaluate, derivative, params=(('dim', dim),))

    @staticmethod
    def bessel(b: float, dim: int) -> SymbolSpec:
        """<xi>^b, order b, rho = 1."""
        return SymbolSpec(
            name='bessel',
            order=float(b),
            rho=1.0,
            kind='multiplier',
            evaluator=lambda x, xi: japanese_bracket(xi) ** b + 0j,
            derivative=_bessel_derivative(b),
            params=(('b', float(b)), ('dim', dim)),
        )

    @staticmethod
    def heat(dim: int) -> SymbolSpec:
        """l(tau, xi) = i tau + |xi|^2 with tau the first frequency coordinate; order 2, rho = 1."""
        if dim < 2:
            raise ParameterError("the heat symbol needs one time and at least one space axis", parameter='dim', value=dim)
        return SymbolSpec(
            name='heat',
            order=2.0,
            rho=1.0,
            kind='multiplier',
            evaluator=lambda x, xi: 1j * xi[..., 0] + (xi[..., 1:] ** 2).sum(axis=-1),
            derivative=_heat_derivative,
            params=(('dim', dim),),
        )

    @staticmethod
    def heat_cutoff(zeta: np.ndarray, c: float) -> np.ndarray:
        """eta(zeta) = 1 - phi0(<zeta>/c): 0 for <zeta> <= c and 1 for <zeta> >= 2c."""
        return 1.0 - smooth_step(japanese_bracket(zeta) / c)

    @staticmethod
    def heat_parametrix(dim: int, c: float = HEAT_CUTOFF) -> SymbolSpec:
        """a = eta / (i tau + |xi|^2), order -1, rho = 1."""
        if not c > 0:
            raise ParameterError("cutoff must be positive", parameter='c', value=c)

        def evaluate(x, xi):
            eta = SymbolCatalog.heat_cutoff(xi, c)
            l_values = 1j * xi[..., 0] + (xi[..., 1:] ** 2).sum(axis=-1)
            safe = np.where(eta > 0, l_values, 1.0)
            return np.where(eta > 0, eta / safe, 0.0)

        return SymbolSpec('heat_parametrix', -1.0, 1.0, 'multiplier', evaluate, params=(('c', c), ('dim', dim)))

    @staticmethod
    def oscillatory(rho: float, dim: int) -> SymbolSpec:
        """e^{i <xi>^(1 - rho)} (1 - phi0(|xi|)), order 0, type rho."""
        if not 0.0 < rho <= 1.0:
            raise ParameterError("rho must lie in (0, 1]", parameter='rho', value=rho)

        def evaluate(x, xi):
            cut = 1.0 - smooth_step(np.sqrt((xi ** 2).sum(axis=-1)))
            return cut * np.exp(1j * japanese_bracket(xi) ** (1.0 - rho))

        return SymbolSpec('oscillatory', 0.0, rho, 'multiplier', evaluate, params=(('rho', rho), ('dim', dim)))

    @staticmethod
    def kernel(gamma: float, dim: int) -> SymbolSpec:
        """<xi>^(gamma/2 - 3/4) e^{i <xi>^(1/2)} (1 - phi0(|xi|)), order gamma/2 - 3/4, rho = 1/2."""
        order = gamma / 2.0 - 0.75

        def evaluate(x, xi):
            bracket = japanese_bracket(xi)
            cut = 1.0 - smooth_step(np.sqrt((xi ** 2).sum(axis=-1)))
            return cut * bracket ** order * np.exp(1j * np.sqrt(bracket))

        return SymbolSpec('kernel', order, 0.5, 'multiplier', evaluate, params=(('gamma', gamma), ('dim', dim)))

    @staticmethod
    def raised_sine(axis: int = 0, offset: float = 0.0) -> Amplitude:
        """a(x) = (1 + sin x_axis)/2 + offset."""
        return lambda x: 0.5 * (1.0 + np.sin(x[..., axis])) + offset

    @staticmethod
    def raised_sine_derivative(axis: int, beta: MultiIndex, x: np.ndarray, offset: float = 0.0) -> np.ndarray:
        order = sum(beta)
        if order == 0:
            return 0.5 * (1.0 + np.sin(x[..., axis])) + offset
        if beta[axis] != order:
            return np.zeros(x.shape[:-1])
        return 0.5 * np.sin(x[..., axis] + order * math.pi / 2.0)

    @staticmethod
    def modulated(multiplier: SymbolSpec, axis: int = 0, offset: float = 0.0, name: str = 'modulated') -> SymbolSpec:
        """a(x) m(xi) with a the raised sine; order and type of m."""
        if not multiplier.is_x_independent:
            raise ParameterError("modulated symbols take an x-independent factor", parameter='m', value=multiplier.name)
        amplitude = SymbolCatalog.raised_sine(axis, offset)

        def evaluate(x, xi):
            return amplitude(x) * multiplier(x, xi)

        def derivative(x, xi, alpha, beta):
            m_part = multiplier.analytic_derivative(x, xi, alpha, tuple(0 for _ in beta))
            if m_part is None:
                return None
            return SymbolCatalog.raised_sine_derivative(axis, beta, x, offset) * m_part

        return SymbolSpec(
            name=name,
            order=multiplier.order,
            rho=multiplier.rho,
            kind='separable',
            evaluator=evaluate,
            derivative=derivative,
            terms=((amplitude, multiplier),),
            params=(('axis', axis), ('offset', offset)) + multiplier.params,
        )

    @staticmethod
    def separable(terms: Sequence[Tuple[Amplitude, SymbolSpec]], name: str = 'separable') -> SymbolSpec:
        """sum_r a_r(x) m_r(xi); order is the largest term order, rho the smallest."""
        terms = tuple(terms)
        if not terms:
            raise ParameterError("separable symbols need at least one term", parameter='terms', value=0)
        for _, m in terms:
            if not m.is_x_independent:
                raise ParameterError("separable factors must be x-independent", parameter='m', value=m.name)

        def evaluate(x, xi):
            return sum(a(x) * m(x, xi) for a, m in terms)

        return SymbolSpec(
            name=name,
            order=max(m.order for _, m in terms),
            rho=min(m.rho for _, m in terms),
            kind='separable',
            evaluator=evaluate,
            terms=terms,
        )

    @staticmethod
    def by_name(name: str, dim: int, params: Optional[Dict[str, float]] = None) -> SymbolSpec:
        """
        Resolve a symbol from its catalog name and parameters.

        Args:
            name: One of identity, bessel, heat, heat_parametrix, oscillatory, kernel, modulated_bessel
            dim: Dimension n
            params: Catalog parameters (b, c, rho, gamma, axis, offset)

        Returns:
            SymbolSpec
        """
        params = dict(params or {})
        try:
            if name == 'identity':
                return SymbolCatalog.identity(dim)
            if name == 'bessel':
                return SymbolCatalog.bessel(float(params.get('b', 0.0)), dim)
            if name == 'heat':
                return SymbolCatalog.heat(dim)
            if name == 'heat_parametrix':
                return SymbolCatalog.heat_parametrix(dim, float(params.get('c', HEAT_CUTOFF)))
            if name == 'oscillatory':
                return SymbolCatalog.oscillatory(float(params.get('rho', 0.5)), dim)
            if name == 'kernel':
                return SymbolCatalog.kernel(float(params.get('gamma', 1.0)), dim)
            if name == 'modulated_bessel':
                return SymbolCatalog.modulated(
                    SymbolCatalog.bessel(float(params.get('b', 0.0)), dim),
                    axis=int(params.get('axis', 0)),
                    offset=float(params.get('offset', 0.0)),
                    name='modulated_bessel',
                )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad parameter for symbol '{name}': {e}", key='symbol', value=name)
        raise ConfigError(f"unknown symbol '{name}'", key='symbol', value=name)
