# analyzers/operator_analyzer.py - Pseudodifferential operators applied to sampled fields

import math
from dataclasses import dataclass

import numpy as np

from config import DENSE_BLOCK_ELEMENTS, DENSE_COST_LIMIT
from exceptions import NonFiniteError, ParameterError, ResourceGuardError
from models.grid import GridSpec, SampledField
from models.symbol import SymbolSpec
from analyzers.fourier_analyzer import FourierAnalyzer
from analyzers.symbol_catalog import SymbolCatalog
from utils.logger import get_logger

logger = get_logger(__name__)

PATHS = ('auto', 'multiplier', 'separable', 'general')


@dataclass(frozen=True)
class ApplicationPlan:
    """How T_sigma will be evaluated on a grid, and at what cost."""
    path: str
    grid: GridSpec
    cost: int
    terms: int = 1


def _finite(values: np.ndarray, operation: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("symbol produced NaN or Inf on the grid", operation=operation)
    return values


class OperatorAnalyzer:
    """
    Evaluates T_sigma f(x) = (2 pi)^(-n/2) int sigma(x, xi) f^(xi) e^{i x.xi} dxi.

    Multipliers and separable symbols go through the FFT; general symbols
    use the dense quadrature, guarded by N^(2n) <= DENSE_COST_LIMIT.
    """

    @staticmethod
    def plan(sigma: SymbolSpec, grid: GridSpec, path: str = 'auto') -> ApplicationPlan:
        """
        Choose the evaluation path for a symbol.

        Args:
            sigma: Symbol
            grid: Grid the operator acts on
            path: auto, multiplier, separable or general

        Returns:
            ApplicationPlan
        """
        if path not in PATHS:
            raise ParameterError(f"path must be one of {PATHS}", parameter='path', value=path)
        if path == 'auto':
            path = {'multiplier': 'multiplier', 'separable': 'separable'}.get(sigma.kind, 'general')
        if path == 'multiplier' and not sigma.is_x_independent:
            raise ParameterError("multiplier path needs an x-independent symbol", parameter='path', value=path)
        if path == 'separable' and sigma.kind == 'general':
            raise ParameterError("separable path needs a separable symbol", parameter='path', value=path)

        fft_cost = grid.size * max(1, int(math.log2(grid.size)))
        if path == 'general':
            cost = grid.size ** 2
        elif path == 'separable':
            cost = max(1, len(sigma.terms)) * fft_cost
        else:
            cost = fft_cost
        return ApplicationPlan(path=path, grid=grid, cost=cost, terms=max(1, len(sigma.terms)))

    @staticmethod
    def apply(sigma: SymbolSpec, f: SampledField, path: str = 'auto') -> SampledField:
        """Apply T_sigma along the planned path."""
        plan = OperatorAnalyzer.plan(sigma, f.spec, path)
        logger.debug(f"apply {sigma.label()} via {plan.path} (cost {plan.cost})")
        if plan.path == 'multiplier':
            return OperatorAnalyzer.apply_multiplier(sigma, f)
        if plan.path == 'separable':
            return OperatorAnalyzer.apply_separable(sigma, f)
        return OperatorAnalyzer.apply_general(sigma, f)

    @staticmethod
    def apply_multiplier(m: SymbolSpec, f: SampledField) -> SampledField:
        """F^-1(m f^) for an x-independent symbol."""
        values = _finite(m.multiplier_values(f.spec.frequency_points()), 'apply_multiplier')
        F = FourierAnalyzer.forward_transform(f)
        return FourierAnalyzer.inverse_transform(FourierAnalyzer.band_multiply(F, values))

    @staticmethod
    def apply_separable(sigma: SymbolSpec, f: SampledField) -> SampledField:
        """sum_r a_r(x) F^-1(m_r f^)."""
        if sigma.is_x_independent:
            return OperatorAnalyzer.apply_multiplier(sigma, f)
        points = f.spec.spatial_points()
        F = FourierAnalyzer.forward_transform(f)
        xi = f.spec.frequency_points()
        total = np.zeros(f.spec.shape, dtype=complex)
        for amplitude, multiplier in sigma.terms:
            m_values = _finite(multiplier.multiplier_values(xi), 'apply_separable')
            a_values = _finite(np.broadcast_to(np.asarray(amplitude(points), dtype=complex), f.spec.shape),
                               'apply_separable')
            band = FourierAnalyzer.inverse_transform(FourierAnalyzer.band_multiply(F, m_values))
            total += a_values * band.values
        return SampledField(f.spec, total)

    @staticmethod
    def apply_general(sigma: SymbolSpec, f: SampledField) -> SampledField:
        """
        Dense quadrature (2 pi)^(-n/2) dxi^n sum_m sigma(x_j, xi_m) f^(xi_m) e^{i x_j . xi_m}.

        Rows of x are processed in blocks of DENSE_BLOCK_ELEMENTS pairs.
        """
        spec = f.spec
        cost = spec.size ** 2
        if cost > DENSE_COST_LIMIT:
            raise ResourceGuardError("dense evaluation exceeds the cost limit", cost=cost, limit=DENSE_COST_LIMIT)

        F = FourierAnalyzer.forward_transform(f).values.reshape(-1)
        xi = spec.frequency_points().reshape(-1, spec.dim)
        x = spec.spatial_points().reshape(-1, spec.dim)
        scale = (2.0 * math.pi) ** (-spec.dim / 2.0) * spec.freq_cell_volume
        out = np.empty(x.shape[0], dtype=complex)
        block = max(1, DENSE_BLOCK_ELEMENTS // xi.shape[0])
        for start in range(0, x.shape[0], block):
            rows = x[start:start + block]
            symbol = _finite(sigma(rows[:, None, :], xi[None, :, :]), 'apply_general')
            phase = np.exp(1j * rows @ xi.T)
            out[start:start + block] = scale * (symbol * phase) @ F
        return SampledField(spec, out.reshape(spec.shape))

    @staticmethod
    def bessel_lift(f: SampledField, b: float) -> SampledField:
        """J^b f = F^-1(<xi>^b f^)."""
        return OperatorAnalyzer.apply_multiplier(SymbolCatalog.bessel(b, f.spec.dim), f)
